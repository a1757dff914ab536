#pragma once

#include <vector>

#include "dicke/phase_estimation.hpp"

namespace dicke {

// Explicit 2^N (or 2^{N+1} with ancilla) state vector for small N. Bit i
// of the basis index is spin i (0 = spin up = |0>); the ancilla, when
// present, is the highest bit.
struct FullState {
  int n_spins = 0;
  bool with_ancilla = false;
  VectorXc amplitudes;

  static FullState spins_only(int n_spins);
  static FullState with_ancilla_zero(int n_spins);
  std::size_t dim() const { return amplitudes.size(); }
  double norm_sq() const;
};

inline constexpr int kMaxOracleSpins = 12;

// Max over adjacent transpositions of || SWAP_{i,i+1} psi - psi ||.
double symmetrize_check(const FullState& state);

// Isometry between the symmetric subspace and the full space:
// |N, m_z> maps to the uniform superposition of the C(N, N/2 - m_z)
// bitstrings of Hamming weight N/2 - m_z.
FullState embed(const CollectiveState& state);
CollectiveState project(const FullState& state);

struct FullRunRecord {
  std::vector<int> bits;
  std::vector<long> accumulators;
  std::vector<double> born_probs;
  long decoded_mz = 0;
  double fidelity = 0.0;        // vs embedded |N, decoded_mz>
  double symmetry_deviation = 0.0;
  FullState final_state;
};

// Literal circuit simulation of one preparation run: explicit ancilla,
// Hadamards, the controlled rotation including the unconditional
// e^{-i (gamma t / 2) J_z} factor, feedback R_z, ancilla measurement.
// Consumes one uniform per measurement (same discipline as run_round).
FullRunRecord full_pe_run(const PreparationPlan& plan, Rng& rng,
                          bool include_unconditional = true);

struct NonuniformReport {
  FullRunRecord record;
  std::vector<double> dicke_overlaps;  // |<N,m_z|psi>|^2, index m_z + N/2
  double symmetry_deviation = 0.0;
  double smallness = 0.0;              // sum_i |delta_i / (2 gamma)|
  bool perturbative_regime = false;    // smallness << 1 (threshold 0.1)
};

// Per-spin couplings gamma_i = gate_gamma * (1 + deviations[i]); the plan
// (round times, feedback) is left untouched, which is exactly the
// over-rotation effect of non-equidistant spins.
NonuniformReport nonuniform_pe_run(const PreparationPlan& plan, double gate_gamma,
                                   const std::vector<double>& deviations, Rng& rng);

}  // namespace dicke
