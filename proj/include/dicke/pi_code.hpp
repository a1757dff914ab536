#pragma once

#include <vector>

#include "dicke/collective_spin.hpp"
#include "dicke/rng.hpp"

namespace dicke {

// Parameters of the permutation-invariant code: codewords live on the
// m_z = g*j - N/2 ladder, j = 0..n, with N = g*n*u. u is a rational >= 1
// given as a value for which N comes out integral; N may be odd (the
// flagship 9-qubit code has N = 9), so this module relaxes the even-N
// restriction of the preparation modules.
struct PiCodeParams {
  int g = 0;
  int n = 0;
  double u = 1.0;

  int total_spins() const;  // N = g*n*u, validated integral
  void validate() const;
  int support_index(int j) const { return g * j; }  // index of m_z = g*j - N/2
};

// Logical code words: |0_L> (|1_L>) has amplitude sqrt(C(n,j)/2^{n-1}) at
// m_z = g*j - N/2 for even (odd) j.
struct CodeWords {
  CollectiveState zero_logical;
  CollectiveState one_logical;
};
CodeWords codewords(const PiCodeParams& params);

// |+_L>: amplitude sqrt(C(n,j)/2^n) on every ladder point.
CollectiveState probe_state(const PiCodeParams& params);

// The averaging operator (e^{-i theta J_y} + e^{i theta J_y}) / 2:
// Hermitian, eigenvalues cos(theta * k) in [-1, 1].
MatrixXc y_projector(int n_spins, double theta);
CollectiveState apply_y_projector(const CollectiveState& state, double theta);

// The 9-qubit pipeline: y-averaging at the given angle on |+>^9, then M
// applications of (1 - e^{i 2 pi/3 J_z})/2, renormalizing throughout.
// fidelity_vs_probe is the square-root fidelity |<probe|state>| (the pure
// state value of Tr sqrt(sqrt(rho) sigma sqrt(rho))).
struct PiCodePreparation {
  CollectiveState state;
  double fidelity_vs_probe = 0.0;
  double success_probability = 0.0;  // cumulative post-selection probability
};
PiCodePreparation prepare_9qubit(int applications, double theta = 0.57056);

// Angles theta_1..theta_L minimizing the squared residual between the
// achieved and target amplitude ratios on the ladder support after
// applying the product of y-projectors to |+>^N. Non-convergence is
// reported through the residual, not thrown.
struct AngleSearchResult {
  std::vector<double> angles;
  double residual = 0.0;
  bool converged = false;  // residual below threshold
};
AngleSearchResult find_angles(const PiCodeParams& params, int n_projectors,
                              double residual_threshold = 1e-6);

// Ratio residual of a state against the C(n,j) ladder targets.
double ladder_residual(const PiCodeParams& params, const CollectiveState& state);

// Born measurement of "phase = 1" vs "phase != 1" for the stabilizer
// S(a) = exp(i (2 a pi / g)(J_z + N/2)); +1 means the state was projected
// onto the kernel of S - I.
struct StabilizerOutcome {
  int outcome = +1;  // +1 or -1
  double probability = 0.0;
  CollectiveState state;
};
StabilizerOutcome stabilizer_measure(const CollectiveState& state,
                                     const PiCodeParams& params, int a, Rng& rng);

// Generalized post-selected preparation: y-projector angles, then
// `rounds` round-robin sweeps of +1 post-selection on S(a), a = 1..g-1.
PiCodePreparation prepare_probe(const PiCodeParams& params,
                                const std::vector<double>& angles, int rounds);

}  // namespace dicke
