#include "dicke/oracle.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

namespace dicke {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

void check_oracle_size(int n_spins) {
  if (n_spins < 2 || n_spins > kMaxOracleSpins) {
    throw std::invalid_argument("oracle: N must be in [2, 12]");
  }
}

int popcount(std::size_t x) { return std::popcount(x); }

}  // namespace

FullState FullState::spins_only(int n_spins) {
  check_oracle_size(n_spins);
  FullState s;
  s.n_spins = n_spins;
  s.with_ancilla = false;
  s.amplitudes = VectorXc::Zero(1L << n_spins);
  return s;
}

FullState FullState::with_ancilla_zero(int n_spins) {
  check_oracle_size(n_spins);
  FullState s;
  s.n_spins = n_spins;
  s.with_ancilla = true;
  s.amplitudes = VectorXc::Zero(1L << (n_spins + 1));
  return s;
}

double FullState::norm_sq() const {
  return stable_sum(amplitudes.cwiseAbs2());
}

double symmetrize_check(const FullState& state) {
  const int n = state.n_spins;
  const std::size_t spin_dim = 1uL << n;
  const std::size_t blocks = state.with_ancilla ? 2 : 1;
  double worst = 0.0;
  for (int i = 0; i + 1 < n; ++i) {
    const std::size_t bi = 1uL << i;
    const std::size_t bj = 1uL << (i + 1);
    double acc = 0.0;
    for (std::size_t blk = 0; blk < blocks; ++blk) {
      const std::size_t base = blk * spin_dim;
      for (std::size_t x = 0; x < spin_dim; ++x) {
        const bool vi = x & bi;
        const bool vj = x & bj;
        if (vi == vj) continue;
        const std::size_t swapped = x ^ bi ^ bj;
        acc += std::norm(state.amplitudes[base + swapped] - state.amplitudes[base + x]);
      }
    }
    worst = std::max(worst, std::sqrt(acc));
  }
  return worst;
}

FullState embed(const CollectiveState& state) {
  check_oracle_size(state.n_spins);
  const int n = state.n_spins;
  FullState full = FullState::spins_only(n);
  // Hamming weight w <-> index i = N - w (i counts spins in |0>).
  std::vector<double> inv_sqrt_count(n + 1);
  for (int w = 0; w <= n; ++w) {
    inv_sqrt_count[w] = std::exp(-0.5 * log_binomial(n, w));
  }
  for (std::size_t x = 0; x < full.dim(); ++x) {
    const int w = popcount(x);
    full.amplitudes[x] = state.amplitudes[n - w] * inv_sqrt_count[w];
  }
  return full;
}

CollectiveState project(const FullState& state) {
  if (state.with_ancilla) {
    throw std::invalid_argument("project: trace out the ancilla first");
  }
  const int n = state.n_spins;
  VectorXc amps = VectorXc::Zero(n + 1);
  for (std::size_t x = 0; x < state.dim(); ++x) {
    amps[n - popcount(x)] += state.amplitudes[x];
  }
  for (int w = 0; w <= n; ++w) {
    amps[n - w] *= std::exp(-0.5 * log_binomial(n, w));
  }
  return CollectiveState(n, std::move(amps),
                         n % 2 == 0 ? SpinParity::even_only : SpinParity::any);
}

namespace {

// m_z eigenvalue of bitstring x: (#zeros - #ones)/2; doubled to stay integral.
inline long doubled_mz(std::size_t x, int n) { return n - 2L * popcount(x); }

struct CircuitEngine {
  const PreparationPlan& plan;
  double gate_gamma;
  const std::vector<double>* deviations;  // nullptr = uniform coupling
  bool include_unconditional;

  // Applies the evolution of the coupling Hamiltonian for time t: the
  // ancilla-|1> block gets exp(+i gamma t J_z / ...) phases, the |0> block
  // the opposite sign, matching e^{-i H_I t} up to the echo convention.
  void apply_controlled_rotation(FullState& psi, double t) const {
    const int n = psi.n_spins;
    const std::size_t spin_dim = 1uL << n;
    for (std::size_t x = 0; x < spin_dim; ++x) {
      double h = 0.5 * static_cast<double>(doubled_mz(x, n));
      if (deviations != nullptr) {
        for (int i = 0; i < n; ++i) {
          const double z = (x >> i) & 1 ? -0.5 : 0.5;
          h += (*deviations)[i] * z;
        }
      }
      const double angle = gate_gamma * t * h;
      const Complex conditional = std::polar(1.0, angle);
      if (include_unconditional) {
        const Complex frame = std::polar(1.0, -0.5 * angle);
        psi.amplitudes[x] *= frame;
        psi.amplitudes[spin_dim + x] *= frame * conditional;
      } else {
        psi.amplitudes[spin_dim + x] *= conditional;
      }
    }
  }

  void hadamard_ancilla(FullState& psi) const {
    const std::size_t spin_dim = 1uL << psi.n_spins;
    const double inv_sqrt2 = 0.7071067811865475244008443621048;
    for (std::size_t x = 0; x < spin_dim; ++x) {
      const Complex a0 = psi.amplitudes[x];
      const Complex a1 = psi.amplitudes[spin_dim + x];
      psi.amplitudes[x] = (a0 + a1) * inv_sqrt2;
      psi.amplitudes[spin_dim + x] = (a0 - a1) * inv_sqrt2;
    }
  }

  void rz_ancilla(FullState& psi, double theta) const {
    // Convention: |1> picks up e^{-i theta}, which reproduces the
    // projector pair (I +- e^{i(gamma t J_z - theta)})/2 after the
    // closing Hadamard.
    const std::size_t spin_dim = 1uL << psi.n_spins;
    const Complex phase = std::polar(1.0, -theta);
    for (std::size_t x = 0; x < spin_dim; ++x) psi.amplitudes[spin_dim + x] *= phase;
  }

  // Measures the ancilla, collapses, renormalizes; one uniform consumed.
  int measure_ancilla(FullState& psi, Rng& rng, double* born_prob) const {
    const std::size_t spin_dim = 1uL << psi.n_spins;
    Eigen::VectorXd w0(spin_dim);
    for (std::size_t x = 0; x < spin_dim; ++x) w0[x] = std::norm(psi.amplitudes[x]);
    const double p0 = stable_sum(w0);
    const int bit = rng.uniform() < p0 ? 0 : 1;
    const double p = bit == 0 ? p0 : 1.0 - p0;
    const double scale = 1.0 / std::sqrt(p);
    for (std::size_t x = 0; x < spin_dim; ++x) {
      if (bit == 0) {
        psi.amplitudes[x] *= scale;
        psi.amplitudes[spin_dim + x] = 0.0;
      } else {
        psi.amplitudes[x] = psi.amplitudes[spin_dim + x] * scale;
        psi.amplitudes[spin_dim + x] = 0.0;
      }
    }
    *born_prob = p;
    return bit;
  }
};

FullState drop_ancilla(const FullState& psi) {
  FullState out = FullState::spins_only(psi.n_spins);
  const std::size_t spin_dim = out.dim();
  for (std::size_t x = 0; x < spin_dim; ++x) out.amplitudes[x] = psi.amplitudes[x];
  return out;
}

FullRunRecord run_circuit(const PreparationPlan& plan, double gate_gamma,
                          const std::vector<double>* deviations, Rng& rng,
                          bool include_unconditional) {
  check_oracle_size(plan.n_spins);
  const int n = plan.n_spins;
  FullState psi = FullState::with_ancilla_zero(n);
  {
    // |+>^N on the spins, ancilla |0>.
    const FullState plus = embed(initial_plus_state(n));
    for (std::size_t x = 0; x < plus.dim(); ++x) psi.amplitudes[x] = plus.amplitudes[x];
  }
  const CircuitEngine engine{plan, gate_gamma, deviations, include_unconditional};
  FullRunRecord rec;
  long a = 0;
  for (int j = 1; j <= plan.n_rounds; ++j) {
    engine.hadamard_ancilla(psi);
    engine.apply_controlled_rotation(psi, plan.round_times[j - 1]);
    engine.rz_ancilla(psi, feedback_angle(j, a + plan.target_offset));
    engine.hadamard_ancilla(psi);
    double born = 0.0;
    const int bit = engine.measure_ancilla(psi, rng, &born);
    a += static_cast<long>(bit) << (j - 1);
    rec.bits.push_back(bit);
    rec.accumulators.push_back(a);
    rec.born_probs.push_back(born);
  }
  rec.decoded_mz = plan.target_offset + decode(a, plan.n_rounds);
  rec.final_state = drop_ancilla(psi);
  rec.symmetry_deviation = symmetrize_check(rec.final_state);
  const CollectiveState target =
      basis_state(n, static_cast<int>(rec.decoded_mz));
  const FullState target_full = embed(target);
  rec.fidelity = std::norm(target_full.amplitudes.dot(rec.final_state.amplitudes));
  return rec;
}

}  // namespace

FullRunRecord full_pe_run(const PreparationPlan& plan, Rng& rng,
                          bool include_unconditional) {
  return run_circuit(plan, plan.gamma, nullptr, rng, include_unconditional);
}

NonuniformReport nonuniform_pe_run(const PreparationPlan& plan, double gate_gamma,
                                   const std::vector<double>& deviations, Rng& rng) {
  if (static_cast<int>(deviations.size()) != plan.n_spins) {
    throw std::invalid_argument("nonuniform_pe_run: need one deviation per spin");
  }
  NonuniformReport report;
  report.record = run_circuit(plan, gate_gamma, &deviations, rng, true);
  const int n = plan.n_spins;
  report.dicke_overlaps.resize(n + 1);
  for (int idx = 0; idx <= n; ++idx) {
    const FullState basis_full = embed(basis_state_at_index(n, idx));
    report.dicke_overlaps[idx] =
        std::norm(basis_full.amplitudes.dot(report.record.final_state.amplitudes));
  }
  report.symmetry_deviation = report.record.symmetry_deviation;
  double smallness = 0.0;
  for (double d : deviations) smallness += std::abs(d) * 0.5;
  report.smallness = smallness;
  report.perturbative_regime = smallness < 0.1;
  return report;
}

}  // namespace dicke
