#include "dicke/metrology.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace dicke {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

double real_expectation(const CollectiveState& state, const OperatorSpec& op) {
  return expectation(state, op).real();
}

}  // namespace

DickeMoments dicke_moments(int n_spins, int m_z) {
  const CollectiveState state = basis_state(n_spins, m_z);
  DickeMoments m;
  m.jx2 = real_expectation(state, OperatorSpec::power(SpinAxis::x, 2));
  m.jy2 = real_expectation(state, OperatorSpec::power(SpinAxis::y, 2));
  m.jz2 = real_expectation(state, OperatorSpec::power(SpinAxis::z, 2));
  m.jz_jx2_jz = real_expectation(
      state, OperatorSpec::product({SpinAxis::z, SpinAxis::x, SpinAxis::x, SpinAxis::z}));
  const double jx4 = real_expectation(state, OperatorSpec::power(SpinAxis::x, 4));
  const double jz4 = real_expectation(state, OperatorSpec::power(SpinAxis::z, 4));
  m.var_jx2 = jx4 - m.jx2 * m.jx2;
  m.var_jz2 = jz4 - m.jz2 * m.jz2;
  return m;
}

double ramsey_expectation(int n_spins, double theta) {
  if (n_spins < 2 || n_spins % 2 != 0) {
    throw std::invalid_argument("ramsey_expectation: N must be even");
  }
  return 0.5 * n_spins * std::sin(theta);
}

ErrorPropagation error_propagation(const CollectiveState& state,
                                   const OperatorSpec& measured, double theta) {
  const CollectiveState rotated = rotate_y(state, theta);
  const double mean = expectation(rotated, measured).real();
  // <M^2> from the squared word list.
  OperatorSpec squared;
  for (const auto& a : measured.terms) {
    for (const auto& b : measured.terms) {
      OperatorSpec::Term t;
      t.coeff = a.coeff * b.coeff;
      t.word = a.word;
      t.word.insert(t.word.end(), b.word.begin(), b.word.end());
      squared.terms.push_back(std::move(t));
    }
  }
  const double second = expectation(rotated, squared).real();

  // d<M>/dtheta = <i [J_y, M]> on the rotated state.
  OperatorSpec commutator;
  for (const auto& term : measured.terms) {
    OperatorSpec::Term left;
    left.coeff = term.coeff * Complex(0.0, 1.0);
    left.word = term.word;
    left.word.insert(left.word.begin(), SpinAxis::y);
    OperatorSpec::Term right;
    right.coeff = term.coeff * Complex(0.0, -1.0);
    right.word = term.word;
    right.word.push_back(SpinAxis::y);
    commutator.terms.push_back(std::move(left));
    commutator.terms.push_back(std::move(right));
  }
  const double derivative = expectation(rotated, commutator).real();

  ErrorPropagation out;
  out.operator_variance = second - mean * mean;
  out.derivative = derivative;
  const double scale = std::max(1.0, std::abs(second));
  if (std::abs(derivative) < 1e-12 * scale) {
    out.divergent = true;
    out.delta_theta_sq = std::numeric_limits<double>::infinity();
  } else {
    out.delta_theta_sq = out.operator_variance / (derivative * derivative);
  }
  return out;
}

double jz2_variance(int n_spins, int m_z, double theta) {
  const double tan_theta = std::tan(theta);
  if (theta == 0.0 || tan_theta == 0.0) {
    throw std::invalid_argument("jz2_variance: tan(theta) must be nonzero");
  }
  const DickeMoments m = dicke_moments(n_spins, m_z);
  const double tan2 = tan_theta * tan_theta;
  const double f = m.var_jz2 / (m.var_jx2 * tan2) + tan2;
  const double bracket = m.var_jx2 * f + 4.0 * m.jx2 - 3.0 * m.jy2 -
                         2.0 * m.jz2 * (1.0 + m.jx2) + 6.0 * m.jz_jx2_jz;
  const double denom = m.jx2 - m.jz2;
  return bracket / (4.0 * denom * denom);
}

double min_variance(int n_spins, int m_z) {
  if (2 * std::abs(m_z) > n_spins) {
    throw std::invalid_argument("min_variance: |m_z| must be <= N/2");
  }
  const double n = n_spins;
  const double m2 = static_cast<double>(m_z) * m_z;
  const double denom = n * n + 2.0 * n - 12.0 * m2;
  if (!(denom > 0.0)) {
    throw std::domain_error("min_variance: outside the valid regime (N^2 + 2N - 12 m^2 <= 0)");
  }
  return (2.0 * m2 + 2.0) / denom + (64.0 * m2 * m2 - 16.0 * m2) / (denom * denom);
}

SensitivityReport minimize_jz2_variance(int n_spins, int m_z) {
  SensitivityReport report;
  report.n_spins = n_spins;
  report.m_z = m_z;
  report.moments = dicke_moments(n_spins, m_z);
  report.closed_form_min = min_variance(n_spins, m_z);

  const auto objective = [&](double theta) { return jz2_variance(n_spins, m_z, theta); };

  const auto golden = [&](double a, double b) {
    const double inv_phi = 0.6180339887498948482045868343656;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = objective(c), fd = objective(d);
    while (b - a > 1e-8) {
      if (fc < fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - inv_phi * (b - a);
        fc = objective(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + inv_phi * (b - a);
        fd = objective(d);
      }
    }
    return 0.5 * (a + b);
  };

  const double lo = 1e-9;
  const double hi = 0.5 * kPi - 1e-9;
  double theta = golden(lo, hi);
  double value = objective(theta);

  // Unimodality check: a coarse scan must not beat the golden-section
  // result; if it does, refine around the scan minimum instead.
  double scan_theta = theta;
  double scan_value = value;
  for (int i = 1; i < 256; ++i) {
    const double candidate = lo + (hi - lo) * i / 256.0;
    const double v = objective(candidate);
    if (v < scan_value) {
      scan_value = v;
      scan_theta = candidate;
    }
  }
  if (scan_value < value * (1.0 - 1e-9)) {
    const double step = (hi - lo) / 256.0;
    theta = golden(std::max(lo, scan_theta - step), std::min(hi, scan_theta + step));
    value = objective(theta);
  }
  report.theta_opt = theta;
  report.variance_at_opt = value;
  return report;
}

}  // namespace dicke
