#include "dicke/collective_spin.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>
#include <string>

namespace dicke {

namespace {

void check_even(int n_spins, const char* who) {
  if (n_spins < 2 || n_spins % 2 != 0) {
    throw std::invalid_argument(std::string(who) +
                                ": spin number must be even and >= 2, got " +
                                std::to_string(n_spins));
  }
}

void check_positive(int n_spins, const char* who) {
  if (n_spins < 1) {
    throw std::invalid_argument(std::string(who) + ": spin number must be >= 1");
  }
}

Complex i_pow(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

// Bessel J_0..J_kmax(a) for a > 0 by Miller's downward recurrence.
std::vector<double> bessel_j_sequence(double a, int kmax) {
  const int start = kmax + 40 + static_cast<int>(2.0 * std::sqrt(static_cast<double>(kmax) + a));
  std::vector<double> j(start + 2, 0.0);
  j[start + 1] = 0.0;
  j[start] = 1e-300;
  for (int k = start; k >= 1; --k) {
    j[k - 1] = (2.0 * k / a) * j[k] - j[k + 1];
    if (std::abs(j[k - 1]) > 1e280) {
      for (int l = k - 1; l <= start + 1; ++l) j[l] *= 1e-280;
    }
  }
  double norm = j[0];
  for (int k = 2; k <= start; k += 2) norm += 2.0 * j[k];
  j.resize(kmax + 1);
  for (double& v : j) v /= norm;
  return j;
}

// Gauge transform taking J_y to a real symmetric tridiagonal matrix T with
// zero diagonal and subdiagonal c_k/2: T = D J_y D^+ with D = diag(i^k).
Eigen::VectorXd jy_tridiagonal_subdiag(int n_spins) {
  Eigen::VectorXd sub(n_spins);
  for (int k = 0; k < n_spins; ++k) sub[k] = 0.5 * ladder_coefficient(n_spins, k);
  return sub;
}

// exp(-i theta T) v by Chebyshev expansion with Bessel coefficients,
// valid since spec(T) = {-N/2, ..., N/2}. O(dim * |theta| N / 2) time.
VectorXc chebyshev_exp_tridiagonal(const Eigen::VectorXd& sub, double radius,
                                   double theta, const VectorXc& v) {
  const double a = std::abs(theta) * radius;
  if (a == 0.0) return v;
  const int n = static_cast<int>(v.size());
  const int kmax =
      static_cast<int>(std::ceil(a + 14.0 * std::cbrt(a + 1.0) + 30.0));
  const std::vector<double> bes = bessel_j_sequence(a, kmax);
  // phase per order: exp(-i a x) = sum_k (2 - d_k0) (-i)^k J_k(a) T_k(x);
  // theta < 0 flips to +i.
  const Complex unit = theta > 0 ? Complex(0.0, -1.0) : Complex(0.0, 1.0);

  auto apply_x = [&](const VectorXc& w) {
    VectorXc out(n);
    for (int r = 0; r < n; ++r) {
      Complex acc(0.0, 0.0);
      if (r > 0) acc += sub[r - 1] * w[r - 1];
      if (r < n - 1) acc += sub[r] * w[r + 1];
      out[r] = acc / radius;
    }
    return out;
  };

  VectorXc tkm1 = v;            // T_0(X) v
  VectorXc tk = apply_x(v);     // T_1(X) v
  VectorXc result = bes[0] * v;
  Complex ik = unit;
  result += 2.0 * bes[1] * ik * tk;
  for (int k = 2; k <= kmax; ++k) {
    VectorXc tkp1 = 2.0 * apply_x(tk) - tkm1;
    tkm1.swap(tk);
    tk.swap(tkp1);
    ik *= unit;
    result += 2.0 * bes[k] * ik * tk;
  }
  return result;
}

}  // namespace

Complex unit_phase_pow2(long numerator, int log2_denominator) {
  const long period = 2L << log2_denominator;
  long r = numerator % period;
  if (r < 0) r += period;
  if (r == 0) return {1.0, 0.0};
  if (2 * r == period) return {-1.0, 0.0};
  constexpr double pi = 3.141592653589793238462643383279502884;
  return std::polar(1.0, pi * std::ldexp(static_cast<double>(r), -log2_denominator));
}

double stable_sum(const Eigen::VectorXd& values) {
  double sum = 0.0, comp = 0.0;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const double y = values[i] - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

CollectiveState::CollectiveState(int n, VectorXc amps, SpinParity parity)
    : n_spins(n), amplitudes(std::move(amps)) {
  if (parity == SpinParity::even_only) {
    check_even(n, "CollectiveState");
  } else {
    check_positive(n, "CollectiveState");
  }
  if (amplitudes.size() != n + 1) {
    throw std::invalid_argument("CollectiveState: expected " + std::to_string(n + 1) +
                                " amplitudes, got " + std::to_string(amplitudes.size()));
  }
}

double CollectiveState::norm_sq() const {
  return stable_sum(amplitudes.cwiseAbs2());
}

CollectiveState CollectiveState::normalized() const {
  CollectiveState out = *this;
  out.amplitudes /= std::sqrt(norm_sq());
  return out;
}

int basis_index(int n_spins, int m_z) {
  check_even(n_spins, "basis_index");
  if (2 * std::abs(m_z) > n_spins) {
    throw std::invalid_argument("basis_index: |m_z| must be <= N/2, got m_z = " +
                                std::to_string(m_z) + " for N = " + std::to_string(n_spins));
  }
  return m_z + n_spins / 2;
}

CollectiveState basis_state(int n_spins, int m_z) {
  const int idx = basis_index(n_spins, m_z);
  VectorXc amps = VectorXc::Zero(n_spins + 1);
  amps[idx] = 1.0;
  return CollectiveState(n_spins, std::move(amps));
}

CollectiveState basis_state_at_index(int n_spins, int index) {
  check_positive(n_spins, "basis_state_at_index");
  if (index < 0 || index > n_spins) {
    throw std::invalid_argument("basis_state_at_index: index out of range");
  }
  VectorXc amps = VectorXc::Zero(n_spins + 1);
  amps[index] = 1.0;
  return CollectiveState(n_spins, std::move(amps), SpinParity::any);
}

double log_binomial(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

CollectiveState binomial_amplitude_state(int n_spins, double p, SpinParity parity) {
  if (parity == SpinParity::even_only) {
    check_even(n_spins, "binomial_amplitude_state");
  } else {
    check_positive(n_spins, "binomial_amplitude_state");
  }
  if (p < 0.0 || p > 1.0) {
    throw std::invalid_argument("binomial_amplitude_state: p must be in [0, 1]");
  }
  const int dim = n_spins + 1;
  // Amplitude at index k (m_z = k - N/2) is sqrt(C(N,k) p^k (1-p)^{N-k});
  // index counts spins in |0>. Work in log space, then renormalize so the
  // sum of squares is 1 to machine precision for any N.
  Eigen::VectorXd logp(dim);
  const double logp0 = p > 0.0 ? std::log(p) : 0.0;
  const double logp1 = p < 1.0 ? std::log1p(-p) : 0.0;
  for (int k = 0; k < dim; ++k) {
    if ((p == 0.0 && k > 0) || (p == 1.0 && k < n_spins)) {
      logp[k] = -1e30;
      continue;
    }
    logp[k] = log_binomial(n_spins, k) + k * logp0 + (n_spins - k) * logp1;
  }
  const double lmax = logp.maxCoeff();
  Eigen::VectorXd w = (logp.array() - lmax).exp();
  const double total = stable_sum(w);
  VectorXc amps(dim);
  const double scale = 1.0 / std::sqrt(total);
  for (int k = 0; k < dim; ++k) amps[k] = Complex(std::sqrt(w[k]) * scale, 0.0);
  return CollectiveState(n_spins, std::move(amps), parity);
}

CollectiveState initial_plus_state(int n_spins) {
  return binomial_amplitude_state(n_spins, 0.5);
}

CollectiveState plus_state_any_parity(int n_spins) {
  return binomial_amplitude_state(n_spins, 0.5, SpinParity::any);
}

double ladder_coefficient(int n_spins, int k) {
  if (k < 0 || k >= n_spins) return 0.0;
  return std::sqrt(static_cast<double>(n_spins - k) * (k + 1.0));
}

CollectiveOperators build_collective_operators(int n_spins) {
  check_even(n_spins, "build_collective_operators");
  const int dim = n_spins + 1;
  CollectiveOperators ops;
  ops.n_spins = n_spins;
  ops.jz = MatrixXc::Zero(dim, dim);
  ops.jplus = MatrixXc::Zero(dim, dim);
  ops.jminus = MatrixXc::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) ops.jz(k, k) = k - 0.5 * n_spins;
  for (int k = 0; k + 1 < dim; ++k) {
    const double c = ladder_coefficient(n_spins, k);
    ops.jplus(k + 1, k) = c;
    ops.jminus(k, k + 1) = c;
  }
  ops.jx = 0.5 * (ops.jplus + ops.jminus);
  ops.jy = Complex(0.0, -0.5) * (ops.jplus - ops.jminus);
  return ops;
}

CollectiveState apply_jz(const CollectiveState& state) {
  CollectiveState out = state;
  for (int k = 0; k < state.dim(); ++k) out.amplitudes[k] *= state.mz_at(k);
  return out;
}

CollectiveState apply_jx(const CollectiveState& state) {
  const int dim = state.dim();
  CollectiveState out = state;
  for (int r = 0; r < dim; ++r) {
    Complex acc(0.0, 0.0);
    if (r > 0) acc += 0.5 * ladder_coefficient(state.n_spins, r - 1) * state.amplitudes[r - 1];
    if (r < dim - 1) acc += 0.5 * ladder_coefficient(state.n_spins, r) * state.amplitudes[r + 1];
    out.amplitudes[r] = acc;
  }
  return out;
}

CollectiveState apply_jy(const CollectiveState& state) {
  const int dim = state.dim();
  CollectiveState out = state;
  const Complex ihalf(0.0, 0.5);
  for (int r = 0; r < dim; ++r) {
    Complex acc(0.0, 0.0);
    // J_y = (J_+ - J_-) / (2i): row r gets -i/2 c_{r-1} a_{r-1} + i/2 c_r a_{r+1}.
    if (r > 0) acc -= ihalf * ladder_coefficient(state.n_spins, r - 1) * state.amplitudes[r - 1];
    if (r < dim - 1) acc += ihalf * ladder_coefficient(state.n_spins, r) * state.amplitudes[r + 1];
    out.amplitudes[r] = acc;
  }
  return out;
}

CollectiveState apply_jz_phase(const CollectiveState& state, double phi, double offset) {
  if (!std::isfinite(phi) || !std::isfinite(offset)) {
    throw std::invalid_argument("apply_jz_phase: phi and offset must be finite");
  }
  CollectiveState out = state;
  for (int k = 0; k < state.dim(); ++k) {
    out.amplitudes[k] *= std::polar(1.0, phi * (state.mz_at(k) - offset));
  }
  return out;
}

namespace {

// Threshold below which the dense eigendecomposition of the tridiagonal
// form is cheap; above it the Chebyshev propagator wins by orders of
// magnitude (the eigensolver's vector accumulation is O(N^3)).
constexpr int kEigenRotationMaxDim = 600;

VectorXc rotate_y_impl(int n_spins, const VectorXc& amps, double theta) {
  const int dim = n_spins + 1;
  // Gauge: w = D psi with D = diag(i^k) turns J_y into the real symmetric
  // tridiagonal T, so e^{-i theta J_y} psi = D^+ e^{-i theta T} D psi.
  VectorXc w(dim);
  for (int k = 0; k < dim; ++k) w[k] = i_pow(k) * amps[k];
  const Eigen::VectorXd sub = jy_tridiagonal_subdiag(n_spins);

  VectorXc rotated;
  if (dim <= kEigenRotationMaxDim) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(Eigen::VectorXd::Zero(dim), sub,
                              Eigen::ComputeEigenvectors);
    const Eigen::MatrixXd& q = es.eigenvectors();
    VectorXc coeffs = q.transpose() * w;
    for (int k = 0; k < dim; ++k) {
      coeffs[k] *= std::polar(1.0, -theta * es.eigenvalues()[k]);
    }
    rotated = q * coeffs;
  } else {
    rotated = chebyshev_exp_tridiagonal(sub, 0.5 * n_spins, theta, w);
  }
  for (int k = 0; k < dim; ++k) rotated[k] *= std::conj(i_pow(k));
  return rotated;
}

}  // namespace

CollectiveState rotate_y(const CollectiveState& state, double theta) {
  if (!std::isfinite(theta)) throw std::invalid_argument("rotate_y: non-finite angle");
  CollectiveState out = state;
  if (theta == 0.0) return out;
  out.amplitudes = rotate_y_impl(state.n_spins, state.amplitudes, theta);
  return out;
}

MatrixXc rotation_y_matrix(int n_spins, double theta) {
  const int dim = n_spins + 1;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(Eigen::VectorXd::Zero(dim), jy_tridiagonal_subdiag(n_spins),
                            Eigen::ComputeEigenvectors);
  const Eigen::MatrixXd& q = es.eigenvectors();
  VectorXc phases(dim);
  for (int k = 0; k < dim; ++k) phases[k] = std::polar(1.0, -theta * es.eigenvalues()[k]);
  MatrixXc core = q * phases.asDiagonal() * q.transpose();
  MatrixXc out(dim, dim);
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) {
      out(r, c) = std::conj(i_pow(r)) * core(r, c) * i_pow(c);
    }
  }
  return out;
}

OperatorSpec OperatorSpec::product(std::vector<SpinAxis> word, Complex coeff) {
  OperatorSpec spec;
  spec.terms.push_back(Term{coeff, std::move(word)});
  return spec;
}

OperatorSpec OperatorSpec::power(SpinAxis axis, int exponent, Complex coeff) {
  return product(std::vector<SpinAxis>(exponent, axis), coeff);
}

Complex expectation(const CollectiveState& state, const OperatorSpec& op) {
  Complex total(0.0, 0.0);
  for (const auto& term : op.terms) {
    CollectiveState work = state;
    for (auto it = term.word.rbegin(); it != term.word.rend(); ++it) {
      switch (*it) {
        case SpinAxis::x: work = apply_jx(work); break;
        case SpinAxis::y: work = apply_jy(work); break;
        case SpinAxis::z: work = apply_jz(work); break;
      }
    }
    total += term.coeff * state.amplitudes.dot(work.amplitudes);
  }
  return total;
}

Complex expectation(const CollectiveState& state, const MatrixXc& op) {
  if (op.rows() != state.dim() || op.cols() != state.dim()) {
    throw std::invalid_argument("expectation: operator dimension mismatch");
  }
  return state.amplitudes.dot(op * state.amplitudes);
}

double fidelity(const CollectiveState& state, int m_z) {
  const int idx = basis_index(state.n_spins, m_z);
  return std::norm(state.amplitudes[idx]);
}

double fidelity(const std::vector<CollectiveState>& ensemble, int m_z) {
  if (ensemble.empty()) throw std::invalid_argument("fidelity: empty ensemble");
  double acc = 0.0;
  for (const auto& state : ensemble) acc += fidelity(state, m_z);
  return acc / static_cast<double>(ensemble.size());
}

double overlap_magnitude(const CollectiveState& a, const CollectiveState& b) {
  if (a.n_spins != b.n_spins) {
    throw std::invalid_argument("overlap_magnitude: dimension mismatch");
  }
  return std::abs(a.amplitudes.dot(b.amplitudes));
}

}  // namespace dicke
