#pragma once

#include "dicke/collective_spin.hpp"

namespace dicke {

// Exact moments of a Dicke state |N, m_z> entering the J_z^2-measurement
// variance, computed by structured operator applications.
struct DickeMoments {
  double jx2 = 0.0;        // <J_x^2>
  double jy2 = 0.0;        // <J_y^2>
  double jz2 = 0.0;        // <J_z^2>
  double jz_jx2_jz = 0.0;  // <J_z J_x^2 J_z>
  double var_jx2 = 0.0;    // <J_x^4> - <J_x^2>^2
  double var_jz2 = 0.0;    // <J_z^4> - <J_z^2>^2
};
DickeMoments dicke_moments(int n_spins, int m_z);

struct SensitivityReport {
  int n_spins = 0;
  int m_z = 0;
  double theta_opt = 0.0;
  double variance_at_opt = 0.0;
  double closed_form_min = 0.0;
  DickeMoments moments;
};

// Ramsey baseline <J_z(theta)> = (N/2) sin(theta).
double ramsey_expectation(int n_spins, double theta);

// Error-propagation variance of the angle estimate when measuring the
// Hermitian operator `measured` on exp(-i theta J_y) |state|: the
// derivative uses the exact commutator form d<M>/dtheta = <i[J_y, M]>.
// A vanishing derivative is reported as divergent, not thrown.
struct ErrorPropagation {
  double operator_variance = 0.0;
  double derivative = 0.0;
  double delta_theta_sq = 0.0;  // +inf when divergent
  bool divergent = false;
};
ErrorPropagation error_propagation(const CollectiveState& state,
                                   const OperatorSpec& measured, double theta);

// The J_z^2-measurement variance of the angle estimate for a Dicke probe,
// assembled term by term from the exact moments. theta = 0 is singular and
// rejected.
double jz2_variance(int n_spins, int m_z, double theta);

// Closed-form minimal variance
// (2 m^2 + 2)/(N^2 + 2N - 12 m^2) + (64 m^4 - 16 m^2)/(N^2 + 2N - 12 m^2)^2;
// requires a positive denominator.
double min_variance(int n_spins, int m_z);

// Golden-section minimization of jz2_variance over theta in (0, pi/2),
// with a dense-scan fallback if the initial bracket is not unimodal.
SensitivityReport minimize_jz2_variance(int n_spins, int m_z);

}  // namespace dicke
