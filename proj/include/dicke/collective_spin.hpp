#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace dicke {

using Complex = std::complex<double>;
using VectorXc = Eigen::VectorXcd;
using MatrixXc = Eigen::MatrixXcd;

// Numerically careful sum (Kahan). Needed so norms stay exact to ~1e-15
// even for states with 2^20 amplitudes.
double stable_sum(const Eigen::VectorXd& values);

// exp(i pi k / 2^p) for integer k, with the angle reduced in integer
// arithmetic first so lattice values come out as exact +-1.
Complex unit_phase_pow2(long numerator, int log2_denominator);

enum class SpinParity { even_only, any };

// State of N spins restricted to the permutation-symmetric subspace,
// stored as N+1 amplitudes over the J_z eigenbasis. Index i corresponds
// to eigenvalue m_z = i - N/2 (half-integer when N is odd).
//
// Values are immutable by convention: operations return new states.
struct CollectiveState {
  int n_spins = 0;
  VectorXc amplitudes;

  CollectiveState() = default;
  CollectiveState(int n, VectorXc amps, SpinParity parity = SpinParity::even_only);

  int dim() const { return n_spins + 1; }
  double mz_at(int index) const { return index - 0.5 * n_spins; }
  double norm_sq() const;
  CollectiveState normalized() const;
};

// Index of |N, m_z> within the amplitude vector; throws on odd N or
// out-of-range m_z.
int basis_index(int n_spins, int m_z);

// |N, m_z> basis vector. The any-parity overload takes the index directly
// (m_z = index - N/2) and is what the permutation-invariant-code module uses.
CollectiveState basis_state(int n_spins, int m_z);
CollectiveState basis_state_at_index(int n_spins, int index);

// (|0>+|1>)/sqrt(2) tensor N: binomial amplitudes sqrt(C(N,k)/2^N).
CollectiveState initial_plus_state(int n_spins);
CollectiveState plus_state_any_parity(int n_spins);

// Product state (sqrt(p)|0> + sqrt(1-p)|1>)^N; amplitudes are computed in
// log space and renormalized, so this is usable up to N ~ 10^6.
CollectiveState binomial_amplitude_state(int n_spins, double p,
                                         SpinParity parity = SpinParity::even_only);

// log C(n, k)
double log_binomial(int n, int k);

// Ladder coefficient <k+1| J_+ |k> = sqrt((N-k)(k+1)) for J = N/2.
double ladder_coefficient(int n_spins, int k);

// Dense collective operators in the Dicke basis (small-N use: tests,
// metrology moments, explicit checks). J_z is diagonal with entries m_z,
// J_+/J_- are the standard angular-momentum ladder operators.
struct CollectiveOperators {
  int n_spins = 0;
  MatrixXc jx, jy, jz, jplus, jminus;
};
CollectiveOperators build_collective_operators(int n_spins);

// O(N) applications exploiting the diagonal/tridiagonal structure.
CollectiveState apply_jz(const CollectiveState& state);
CollectiveState apply_jx(const CollectiveState& state);
CollectiveState apply_jy(const CollectiveState& state);

// Multiplies amplitude at m_z by exp(i phi (m_z - offset)). O(N).
CollectiveState apply_jz_phase(const CollectiveState& state, double phi, double offset);

// e^{-i theta J_y} |state>. Uses an eigendecomposition of the (gauge
// transformed) real symmetric tridiagonal representation of J_y for small
// dimensions and a Chebyshev expansion of the propagator for large ones;
// both are accurate to ~1e-12 in the unitarity defect.
CollectiveState rotate_y(const CollectiveState& state, double theta);

// Dense rotation matrix e^{-i theta J_y} (small N).
MatrixXc rotation_y_matrix(int n_spins, double theta);

// Symbolic polynomial in J_x, J_y, J_z. A term is coeff * (product of
// factors applied left to right as written), e.g. {Jz,Jx,Jx,Jz} is
// J_z J_x^2 J_z. Evaluation uses O(N) structured applications.
enum class SpinAxis { x, y, z };
struct OperatorSpec {
  struct Term {
    Complex coeff{1.0, 0.0};
    std::vector<SpinAxis> word;
  };
  std::vector<Term> terms;

  static OperatorSpec product(std::vector<SpinAxis> word, Complex coeff = {1.0, 0.0});
  static OperatorSpec power(SpinAxis axis, int exponent, Complex coeff = {1.0, 0.0});
};

Complex expectation(const CollectiveState& state, const OperatorSpec& op);
Complex expectation(const CollectiveState& state, const MatrixXc& op);

// |<N, m_z|state>|^2 for a pure state, or the ensemble average for a set
// of trajectories (uniform weights).
double fidelity(const CollectiveState& state, int m_z);
double fidelity(const std::vector<CollectiveState>& ensemble, int m_z);

// |<a|b>|
double overlap_magnitude(const CollectiveState& a, const CollectiveState& b);

}  // namespace dicke
