#include "dicke/adiabatic.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace dicke {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

void check_mz(double m_z, int n_spins, const char* who) {
  if (std::abs(m_z) > 0.5 * n_spins + 1e-12) {
    throw std::invalid_argument(std::string(who) + ": |m_z| must be <= N/2");
  }
}

// (m^2 - m)/2, always a nonnegative integer for integer m.
long triangular(long m) { return m * (m - 1) / 2; }

}  // namespace

void AdiabaticParams::validate() const {
  if (n_spins < 2) throw std::invalid_argument("AdiabaticParams: N must be >= 2");
  if (!(g > 0.0)) throw std::invalid_argument("AdiabaticParams: g must be > 0");
  if (!(omega2 > omega1)) {
    throw std::invalid_argument("AdiabaticParams: omega2 must exceed omega1");
  }
}

double effective_coupling(double m_z, int n_spins, double g) {
  check_mz(m_z, n_spins, "effective_coupling");
  const double j = 0.5 * n_spins;
  const double radicand = j * (j + 1.0) - m_z * (m_z - 1.0);
  return g * std::sqrt(radicand);
}

SubspaceEigenvalues subspace_eigenvalues(double m_z, double omega,
                                         const AdiabaticParams& params) {
  params.validate();
  check_mz(m_z, params.n_spins, "subspace_eigenvalues");
  if (m_z == -0.5 * params.n_spins) {
    throw std::invalid_argument(
        "subspace_eigenvalues: m_z = -N/2 does not couple to the ancilla");
  }
  const double coupling = effective_coupling(m_z, params.n_spins, params.g);
  const double detuning = 0.5 * (params.omega2 - omega);
  const double split = std::sqrt(coupling * coupling + detuning * detuning);
  const double base =
      0.5 * params.omega2 + (0.5 * params.n_spins - m_z) * params.omega1;
  return SubspaceEigenvalues{base + split, base - split};
}

AccumulatedPhase accumulated_phase(double m_z, double dt,
                                   const AdiabaticParams& params) {
  check_mz(m_z, params.n_spins, "accumulated_phase");
  AccumulatedPhase out;
  out.exact = -effective_coupling(m_z, params.n_spins, params.g) * dt;
  const double n = params.n_spins;
  const double root = std::sqrt(n * (n + 2.0));
  out.taylor = params.g * dt * ((m_z * m_z - m_z) / root - 0.5 * root);
  out.difference = out.exact - out.taylor;
  return out;
}

VectorXc effective_unitary_diagonal(int n_spins, double g, double dt) {
  if (dt < 0.0) throw std::invalid_argument("effective_unitary_diagonal: dt must be >= 0");
  const int dim = n_spins + 1;
  VectorXc diag(dim);
  for (int idx = 0; idx < dim; ++idx) {
    const double m = idx - 0.5 * n_spins;
    diag[idx] = std::polar(1.0, g * dt / n_spins * (m * m - m));
  }
  return diag;
}

AdiabaticPlan make_adiabatic_plan(int n_spins, double g) {
  if (n_spins < 4 || n_spins % 2 != 0) {
    throw std::invalid_argument("make_adiabatic_plan: N must be even and >= 4");
  }
  if (!(g > 0.0)) throw std::invalid_argument("make_adiabatic_plan: g must be > 0");
  AdiabaticPlan plan;
  plan.n_spins = n_spins;
  plan.g = g;
  plan.center_m = std::lround(2.0 * std::sqrt(static_cast<double>(n_spins)));
  plan.window_max =
      std::min<long>(std::lround(4.0 * std::sqrt(static_cast<double>(n_spins))), n_spins / 2);
  const unsigned long mu_max = static_cast<unsigned long>(triangular(plan.window_max));
  plan.n_rounds = std::max(1, static_cast<int>(std::bit_width(mu_max)));
  plan.dwell_times.resize(plan.n_rounds);
  for (int j = 1; j <= plan.n_rounds; ++j) {
    // gamma-equivalent: g dt_j / N * (m^2 - m) = pi 2^{1-j} * (m^2 - m)/2.
    plan.dwell_times[j - 1] = kPi * n_spins / (std::ldexp(1.0, j) * g);
  }
  return plan;
}

PreparationRecord adiabatic_preparation(int n_spins, double g, Rng& rng) {
  const AdiabaticPlan plan = make_adiabatic_plan(n_spins, g);
  const double p = static_cast<double>(plan.center_m) / n_spins + 0.5;
  CollectiveState state = binomial_amplitude_state(n_spins, p);
  const int dim = state.dim();
  const long half_n = n_spins / 2;

  PreparationRecord rec;
  long a = 0;
  for (int j = 1; j <= plan.n_rounds; ++j) {
    // Measurement pair of U_j = exp(i pi 2^{1-j} (T - A_{j-1})) with T the
    // diagonal integer operator (J_z^2 - J_z)/2.
    VectorXc kept(dim);
    double p0 = 0.0;
    for (int k = 0; k < dim; ++k) {
      const Complex u = unit_phase_pow2(triangular(k - half_n) - a, j - 1);
      kept[k] = 0.5 * (state.amplitudes[k] + u * state.amplitudes[k]);
      p0 += std::norm(kept[k]);
    }
    const double p1 = 1.0 - p0;
    const int bit = rng.uniform() < p0 ? 0 : 1;
    if (bit == 0) {
      state.amplitudes = kept / std::sqrt(p0);
    } else {
      for (int k = 0; k < dim; ++k) {
        const Complex u = unit_phase_pow2(triangular(k - half_n) - a, j - 1);
        kept[k] = 0.5 * (state.amplitudes[k] - u * state.amplitudes[k]);
      }
      state.amplitudes = kept / std::sqrt(p1);
    }
    a += static_cast<long>(bit) << (j - 1);
    rec.bits.push_back(bit);
    rec.accumulators.push_back(a);
    rec.born_probs.push_back(bit == 0 ? p0 : p1);
  }

  // Invert the triangular eigenvalue on the m >= 1 branch.
  const long disc = 1 + 8 * a;
  const long root = std::lround(std::sqrt(static_cast<double>(disc)));
  const bool invertible = root * root == disc && (1 + root) % 2 == 0;
  long decoded_m = invertible ? (1 + root) / 2 : 0;
  const bool in_window = invertible && decoded_m >= 1 && decoded_m <= plan.window_max;

  rec.final_state = std::move(state);
  rec.accepted = in_window;
  if (in_window) {
    rec.decoded_mz = decoded_m;
    rec.fidelity = fidelity(rec.final_state, static_cast<int>(decoded_m));
  } else {
    rec.decoded_mz = 0;
    rec.fidelity = 0.0;
  }
  return rec;
}

}  // namespace dicke
