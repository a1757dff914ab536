#pragma once

#include <vector>

#include "dicke/phase_estimation.hpp"

namespace dicke {

// Two-level avoided-crossing model of the flux-tuned controlled rotation.
// g is the single-spin coupling (rad/s); omega1 < omega2 are the two
// transition frequencies (validation only).
struct AdiabaticParams {
  int n_spins = 0;
  double g = 0.0;
  double dwell_time = 0.0;  // seconds at the avoided crossing
  double omega1 = 0.0;
  double omega2 = 0.0;

  void validate() const;
};

// G(m_z) = g sqrt(N/2 (N/2 + 1) - m_z (m_z - 1)).
double effective_coupling(double m_z, int n_spins, double g);

// Eigenvalues of the two-level block at flux-qubit frequency omega:
// omega2/2 +- sqrt(G^2 + ((omega2 - omega)/2)^2) + (N/2 - m_z) omega1.
// m_z = -N/2 decouples and is rejected.
struct SubspaceEigenvalues {
  double upper = 0.0;
  double lower = 0.0;
  double gap() const { return upper - lower; }
};
SubspaceEigenvalues subspace_eigenvalues(double m_z, double omega,
                                         const AdiabaticParams& params);

// Conditional phase accumulated during a dwell of length dt: the exact
// -G(m_z) dt and its large-N Taylor form
// g dt ((m_z^2 - m_z)/sqrt(N(N+2)) - sqrt(N(N+2))/2).
struct AccumulatedPhase {
  double exact = 0.0;
  double taylor = 0.0;
  double difference = 0.0;
};
AccumulatedPhase accumulated_phase(double m_z, double dt, const AdiabaticParams& params);

// Diagonal of the conditional branch of V(dt): exp(i g dt / N (m^2 - m))
// per m_z (the m_z-independent part is compensated exactly in software).
VectorXc effective_unitary_diagonal(int n_spins, double g, double dt);

// Round schedule for phase estimation built on V: bits of the integer
// eigenvalue (m^2 - m)/2 are resolved over the window 0 <= m <= 4 sqrt(N),
// with dwell times dt_j = pi N / (2^j g).
struct AdiabaticPlan {
  int n_spins = 0;
  double g = 0.0;
  long center_m = 0;      // 2 sqrt(N), rounded
  long window_max = 0;    // min(4 sqrt(N), N/2), rounded
  int n_rounds = 0;       // bits of the largest window eigenvalue
  std::vector<double> dwell_times;
};
AdiabaticPlan make_adiabatic_plan(int n_spins, double g);

// Full preparation run: rotated-product initial state centered at
// 2 sqrt(N), V-based phase estimation, inversion of the decoded
// (m^2 - m)/2 eigenvalue on the m >= 1 branch. Records decoding to a
// non-invertible eigenvalue are marked ambiguous (accepted = false).
PreparationRecord adiabatic_preparation(int n_spins, double g, Rng& rng);

}  // namespace dicke
