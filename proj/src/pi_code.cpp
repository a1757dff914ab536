#include "dicke/pi_code.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dicke {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Diagonal factor of (1 - e^{i 2 pi / 3 J_z})/2 at ladder index k for N = 9.
Complex nine_qubit_filter(int k) {
  // J_z eigenvalue is k - 4.5; exact reduction of (2/3)(k - 4.5) mod 2.
  const int doubled = 2 * k - 9;       // 2 m_z, odd integer
  int r = ((doubled % 6) + 6) % 6;     // phase angle is pi/3 * (2 m_z) mod 2 pi
  const Complex phase = std::polar(1.0, kPi * r / 3.0);
  return 0.5 * (1.0 - phase);
}

}  // namespace

int PiCodeParams::total_spins() const {
  const double raw = static_cast<double>(g) * n * u;
  const int rounded = static_cast<int>(std::lround(raw));
  if (std::abs(raw - rounded) > 1e-9 || rounded < 1) {
    throw std::invalid_argument("PiCodeParams: N = g*n*u must be a positive integer");
  }
  return rounded;
}

void PiCodeParams::validate() const {
  if (g <= 1 || n <= 1) throw std::invalid_argument("PiCodeParams: g and n must be > 1");
  if (u < 1.0) throw std::invalid_argument("PiCodeParams: u must be >= 1");
  (void)total_spins();
}

CodeWords codewords(const PiCodeParams& params) {
  params.validate();
  const int n_total = params.total_spins();
  VectorXc zero = VectorXc::Zero(n_total + 1);
  VectorXc one = VectorXc::Zero(n_total + 1);
  const double norm = std::sqrt(std::ldexp(1.0, params.n - 1));
  for (int j = 0; j <= params.n; ++j) {
    const double amp = std::exp(0.5 * log_binomial(params.n, j)) / norm;
    if (j % 2 == 0) {
      zero[params.support_index(j)] = amp;
    } else {
      one[params.support_index(j)] = amp;
    }
  }
  return CodeWords{CollectiveState(n_total, std::move(zero), SpinParity::any),
                   CollectiveState(n_total, std::move(one), SpinParity::any)};
}

CollectiveState probe_state(const PiCodeParams& params) {
  params.validate();
  const int n_total = params.total_spins();
  VectorXc amps = VectorXc::Zero(n_total + 1);
  const double norm = std::sqrt(std::ldexp(1.0, params.n));
  for (int j = 0; j <= params.n; ++j) {
    amps[params.support_index(j)] = std::exp(0.5 * log_binomial(params.n, j)) / norm;
  }
  return CollectiveState(n_total, std::move(amps), SpinParity::any);
}

MatrixXc y_projector(int n_spins, double theta) {
  if (!std::isfinite(theta)) throw std::invalid_argument("y_projector: non-finite angle");
  const MatrixXc plus = rotation_y_matrix(n_spins, theta);
  const MatrixXc minus = rotation_y_matrix(n_spins, -theta);
  return 0.5 * (plus + minus);
}

CollectiveState apply_y_projector(const CollectiveState& state, double theta) {
  CollectiveState out = state;
  out.amplitudes =
      0.5 * (rotate_y(state, theta).amplitudes + rotate_y(state, -theta).amplitudes);
  return out;
}

PiCodePreparation prepare_9qubit(int applications, double theta) {
  if (applications < 1) throw std::invalid_argument("prepare_9qubit: M must be >= 1");
  const PiCodeParams params{3, 3, 1.0};
  CollectiveState state = plus_state_any_parity(9);
  state = apply_y_projector(state, theta);
  double success = state.norm_sq();
  state.amplitudes /= std::sqrt(success);
  for (int rep = 0; rep < applications; ++rep) {
    for (int k = 0; k < state.dim(); ++k) state.amplitudes[k] *= nine_qubit_filter(k);
    const double kept = state.norm_sq();
    success *= kept;
    state.amplitudes /= std::sqrt(kept);
  }
  PiCodePreparation out;
  out.fidelity_vs_probe = std::abs(probe_state(params).amplitudes.dot(state.amplitudes));
  out.success_probability = success;
  out.state = std::move(state);
  return out;
}

double ladder_residual(const PiCodeParams& params, const CollectiveState& state) {
  const int base = params.support_index(0);
  const double a0 = state.amplitudes[base].real();
  if (std::abs(a0) < 1e-300) return 1e300;
  double residual = 0.0;
  for (int j = 1; j <= params.n; ++j) {
    const double target = std::exp(0.5 * log_binomial(params.n, j));
    const double achieved = state.amplitudes[params.support_index(j)].real() / a0;
    residual += (achieved - target) * (achieved - target);
  }
  return residual;
}

namespace {

double angles_objective(const PiCodeParams& params, const std::vector<double>& angles) {
  CollectiveState state = plus_state_any_parity(params.total_spins());
  for (double theta : angles) state = apply_y_projector(state, theta);
  return ladder_residual(params, state);
}

// Nelder-Mead over [0, pi/2]^L followed by coordinate-wise golden-section
// refinement; restarted from seeded random points.
std::vector<double> nelder_mead(const PiCodeParams& params, std::vector<double> start,
                                double* best_value) {
  const int dim = static_cast<int>(start.size());
  const auto clamp = [](std::vector<double>& x) {
    for (double& v : x) v = std::clamp(v, 0.0, 0.5 * kPi);
  };
  std::vector<std::vector<double>> simplex(dim + 1, start);
  for (int i = 0; i < dim; ++i) {
    simplex[i + 1][i] += simplex[i + 1][i] > 0.25 * kPi ? -0.1 : 0.1;
  }
  std::vector<double> values(dim + 1);
  for (int i = 0; i <= dim; ++i) values[i] = angles_objective(params, simplex[i]);

  for (int iter = 0; iter < 400 * dim; ++iter) {
    int worst = 0, best = 0;
    for (int i = 1; i <= dim; ++i) {
      if (values[i] > values[worst]) worst = i;
      if (values[i] < values[best]) best = i;
    }
    if (values[worst] - values[best] < 1e-14) break;
    std::vector<double> centroid(dim, 0.0);
    for (int i = 0; i <= dim; ++i) {
      if (i == worst) continue;
      for (int k = 0; k < dim; ++k) centroid[k] += simplex[i][k] / dim;
    }
    std::vector<double> reflected(dim);
    for (int k = 0; k < dim; ++k) reflected[k] = 2.0 * centroid[k] - simplex[worst][k];
    clamp(reflected);
    const double fr = angles_objective(params, reflected);
    if (fr < values[best]) {
      std::vector<double> expanded(dim);
      for (int k = 0; k < dim; ++k) expanded[k] = centroid[k] + 2.0 * (reflected[k] - centroid[k]);
      clamp(expanded);
      const double fe = angles_objective(params, expanded);
      simplex[worst] = fe < fr ? expanded : reflected;
      values[worst] = std::min(fe, fr);
    } else if (fr < values[worst]) {
      simplex[worst] = reflected;
      values[worst] = fr;
    } else {
      std::vector<double> contracted(dim);
      for (int k = 0; k < dim; ++k) {
        contracted[k] = centroid[k] + 0.5 * (simplex[worst][k] - centroid[k]);
      }
      const double fk = angles_objective(params, contracted);
      if (fk < values[worst]) {
        simplex[worst] = contracted;
        values[worst] = fk;
      } else {
        for (int i = 0; i <= dim; ++i) {
          if (i == best) continue;
          for (int k = 0; k < dim; ++k) {
            simplex[i][k] = simplex[best][k] + 0.5 * (simplex[i][k] - simplex[best][k]);
          }
          values[i] = angles_objective(params, simplex[i]);
        }
      }
    }
  }
  int best = 0;
  for (int i = 1; i <= dim; ++i) {
    if (values[i] < values[best]) best = i;
  }
  *best_value = values[best];
  return simplex[best];
}

void golden_refine(const PiCodeParams& params, std::vector<double>& angles,
                   double* value) {
  const double inv_phi = 0.6180339887498948482045868343656;
  for (int coord = 0; coord < static_cast<int>(angles.size()); ++coord) {
    double a = std::max(0.0, angles[coord] - 0.05);
    double b = std::min(0.5 * kPi, angles[coord] + 0.05);
    const auto eval = [&](double theta) {
      std::vector<double> probe = angles;
      probe[coord] = theta;
      return angles_objective(params, probe);
    };
    double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
    double fc = eval(c), fd = eval(d);
    while (b - a > 1e-9) {
      if (fc < fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - inv_phi * (b - a);
        fc = eval(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + inv_phi * (b - a);
        fd = eval(d);
      }
    }
    const double candidate = 0.5 * (a + b);
    const double fv = eval(candidate);
    if (fv < *value) {
      angles[coord] = candidate;
      *value = fv;
    }
  }
}

}  // namespace

AngleSearchResult find_angles(const PiCodeParams& params, int n_projectors,
                              double residual_threshold) {
  params.validate();
  if (n_projectors < 1) throw std::invalid_argument("find_angles: L must be >= 1");
  AngleSearchResult result;
  result.residual = 1e300;
  Rng rng(0x5eedu);
  constexpr int kRestarts = 32;
  for (int attempt = 0; attempt < kRestarts; ++attempt) {
    std::vector<double> start(n_projectors);
    for (double& v : start) v = rng.uniform() * 0.5 * kPi;
    double value = 0.0;
    std::vector<double> angles = nelder_mead(params, std::move(start), &value);
    golden_refine(params, angles, &value);
    if (value < result.residual) {
      result.residual = value;
      result.angles = std::move(angles);
    }
  }
  result.converged = result.residual < residual_threshold;
  return result;
}

StabilizerOutcome stabilizer_measure(const CollectiveState& state,
                                     const PiCodeParams& params, int a, Rng& rng) {
  params.validate();
  const int n_total = params.total_spins();
  if (state.n_spins != n_total) {
    throw std::invalid_argument("stabilizer_measure: state dimension mismatch");
  }
  // S(a) has phase exp(i 2 pi a k / g) at ladder index k = m_z + N/2;
  // the +1 eigenspace is exactly { k : a k = 0 mod g }.
  Eigen::VectorXd kernel_weight(state.dim());
  for (int k = 0; k < state.dim(); ++k) {
    const bool in_kernel = (static_cast<long>(a) * k) % params.g == 0;
    kernel_weight[k] = in_kernel ? std::norm(state.amplitudes[k]) : 0.0;
  }
  const double p_plus = stable_sum(kernel_weight);
  StabilizerOutcome out;
  out.state = state;
  const bool plus = rng.uniform() < p_plus;
  out.outcome = plus ? +1 : -1;
  out.probability = plus ? p_plus : 1.0 - p_plus;
  const double scale = 1.0 / std::sqrt(out.probability);
  for (int k = 0; k < state.dim(); ++k) {
    const bool in_kernel = (static_cast<long>(a) * k) % params.g == 0;
    out.state.amplitudes[k] = (in_kernel == plus) ? state.amplitudes[k] * scale : 0.0;
  }
  return out;
}

PiCodePreparation prepare_probe(const PiCodeParams& params,
                                const std::vector<double>& angles, int rounds) {
  params.validate();
  if (rounds < 1) throw std::invalid_argument("prepare_probe: rounds must be >= 1");
  CollectiveState state = plus_state_any_parity(params.total_spins());
  for (double theta : angles) state = apply_y_projector(state, theta);
  double success = state.norm_sq();
  state.amplitudes /= std::sqrt(success);
  // Deterministic +1 post-selection on each stabilizer, round-robin.
  for (int round = 0; round < rounds; ++round) {
    for (int a = 1; a < params.g; ++a) {
      double kept = 0.0;
      for (int k = 0; k < state.dim(); ++k) {
        if ((static_cast<long>(a) * k) % params.g == 0) {
          kept += std::norm(state.amplitudes[k]);
        } else {
          state.amplitudes[k] = 0.0;
        }
      }
      success *= kept;
      state.amplitudes /= std::sqrt(kept);
    }
  }
  PiCodePreparation out;
  out.fidelity_vs_probe = std::abs(probe_state(params).amplitudes.dot(state.amplitudes));
  out.success_probability = success;
  out.state = std::move(state);
  return out;
}

}  // namespace dicke
