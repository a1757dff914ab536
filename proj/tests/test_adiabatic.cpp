#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dicke/adiabatic.hpp"

using namespace dicke;

namespace {
const AdiabaticParams kParams{400, 1e5, 1e-6, 2.0e9, 3.5e9};
}

TEST_CASE("effective coupling formula and symmetry") {
  // G(N/2) = g sqrt(N) exactly
  CHECK(effective_coupling(200.0, 400, 1e5) == 1e5 * std::sqrt(400.0));
  // m = 0 plug-in
  CHECK(effective_coupling(0.0, 400, 1e5) ==
        doctest::Approx(1e5 * std::sqrt(200.0 * 201.0)).epsilon(1e-15));
  // G(m) = G(1 - m)
  for (int m = -199; m <= 200; ++m) {
    CHECK(effective_coupling(m, 400, 1e5) ==
          doctest::Approx(effective_coupling(1 - m, 400, 1e5)).epsilon(1e-14));
  }
  // maximum at m = 1/2, strictly larger than any integer m value
  const double peak = effective_coupling(0.5, 400, 1e5);
  for (int m = -200; m <= 200; ++m) {
    CHECK(effective_coupling(m, 400, 1e5) < peak);
  }
  // G(-N/2) = 0: the all-ones state does not couple
  CHECK(effective_coupling(-200.0, 400, 1e5) == doctest::Approx(0.0));
  CHECK_THROWS_AS(effective_coupling(201.0, 400, 1e5), std::invalid_argument);
}

TEST_CASE("two-level eigenvalues") {
  // at the crossing the gap is 2 G(m_z)
  for (double m : {0.0, 5.0, 40.0}) {
    const SubspaceEigenvalues ev = subspace_eigenvalues(m, kParams.omega2, kParams);
    CHECK(ev.gap() ==
          doctest::Approx(2.0 * effective_coupling(m, 400, kParams.g)).epsilon(1e-12));
  }
  // decoupled limit: eigenvalues reduce to the diagonal entries
  AdiabaticParams weak = kParams;
  weak.g = 1e-12;
  const double omega = 2.5e9;
  const SubspaceEigenvalues ev = subspace_eigenvalues(10.0, omega, weak);
  const double base = (200.0 - 10.0) * weak.omega1;
  CHECK(ev.lower == doctest::Approx(base + 0.5 * omega).epsilon(1e-9));
  CHECK(ev.upper == doctest::Approx(base + weak.omega2 - 0.5 * omega).epsilon(1e-9));
  // for m = O(sqrt N) the coupling (half-gap) is close to g N / 2, so the
  // crossing stays wide open
  const double gap = subspace_eigenvalues(40.0, kParams.omega2, kParams).gap();
  CHECK(std::abs(0.5 * gap - kParams.g * 400.0 / 2.0) / (0.5 * gap) < 0.05);
  CHECK_THROWS_AS(subspace_eigenvalues(-200.0, kParams.omega2, kParams),
                  std::invalid_argument);
}

TEST_CASE("accumulated phase: exact vs Taylor") {
  CHECK(accumulated_phase(7.0, 0.0, kParams).exact == 0.0);
  CHECK(accumulated_phase(7.0, 0.0, kParams).taylor == 0.0);

  // N = 400, m = 40: relative deviation below 1%
  const AccumulatedPhase at40 = accumulated_phase(40.0, 1e-6, kParams);
  CHECK(std::abs(at40.difference) / std::abs(at40.exact) < 0.01);

  // G symmetry: m = 0 and m = 1 give identical exact phases
  CHECK(accumulated_phase(0.0, 1e-6, kParams).exact ==
        doctest::Approx(accumulated_phase(1.0, 1e-6, kParams).exact).epsilon(1e-15));

  // deviation grows monotonically with |m - 1/2| on the window
  double prev = 0.0;
  for (int m = 1; m <= 80; ++m) {
    const AccumulatedPhase ph = accumulated_phase(m, 1e-6, kParams);
    const double dev = std::abs(ph.difference);
    CHECK(dev >= prev - 1e-12);
    prev = dev;
  }
}

TEST_CASE("effective unitary diagonal") {
  const VectorXc identity_like = effective_unitary_diagonal(400, 1e5, 0.0);
  for (int k = 0; k <= 400; ++k) CHECK(identity_like[k] == Complex(1.0, 0.0));

  const VectorXc v = effective_unitary_diagonal(400, 1e5, 3e-7);
  // m = 0 and m = 1 branches are degenerate
  CHECK(std::abs(v[200] - v[201]) == 0.0);
  CHECK(v[200] == Complex(1.0, 0.0));
  // plug-in at m = N/2
  const double expected = 1e5 * 3e-7 / 400.0 * (200.0 * 200.0 - 200.0);
  CHECK(std::arg(v[400]) ==
        doctest::Approx(std::fmod(expected + M_PI, 2 * M_PI) - M_PI).epsilon(1e-9));

  // additivity V(dt1) V(dt2) = V(dt1 + dt2)
  const VectorXc a = effective_unitary_diagonal(64, 1e5, 2e-7);
  const VectorXc b = effective_unitary_diagonal(64, 1e5, 5e-7);
  const VectorXc c = effective_unitary_diagonal(64, 1e5, 7e-7);
  for (int k = 0; k <= 64; ++k) CHECK(std::abs(a[k] * b[k] - c[k]) < 1e-12);
}

TEST_CASE("plan construction and window") {
  const AdiabaticPlan plan = make_adiabatic_plan(400, 1e5);
  CHECK(plan.center_m == 40);
  CHECK(plan.window_max == 80);
  CHECK(plan.n_rounds == 12);  // (80*79)/2 = 3160 needs 12 bits
  // dwell times resolve binary precision: g dt_j / N = pi / 2^j
  for (int j = 1; j <= plan.n_rounds; ++j) {
    CHECK(plan.g * plan.dwell_times[j - 1] / 400.0 ==
          doctest::Approx(M_PI / std::ldexp(1.0, j)).epsilon(1e-12));
  }
  // small N clips the window at N/2
  const AdiabaticPlan tiny = make_adiabatic_plan(16, 1e5);
  CHECK(tiny.window_max == 8);
}

TEST_CASE("initial state mass outside the window is negligible") {
  const AdiabaticPlan plan = make_adiabatic_plan(400, 1e5);
  const double p = static_cast<double>(plan.center_m) / 400.0 + 0.5;
  const CollectiveState init = binomial_amplitude_state(400, p);
  double outside = 0.0;
  for (int idx = 0; idx <= 400; ++idx) {
    const long m = idx - 200;
    if (m < 0 || m > plan.window_max) outside += std::norm(init.amplitudes[idx]);
  }
  CHECK(outside < 1e-3);
}

TEST_CASE("preparation run decodes the triangular eigenvalue") {
  int accepted = 0;
  double fid_sum = 0.0;
  for (int t = 0; t < 200; ++t) {
    Rng rng = Rng::for_trial(606060, t);
    const PreparationRecord rec = adiabatic_preparation(400, 1e5, rng);
    if (rec.accepted) {
      ++accepted;
      fid_sum += rec.fidelity;
      CHECK(rec.decoded_mz >= 1);
      CHECK(rec.decoded_mz <= 80);
    }
  }
  REQUIRE(accepted > 190);
  CHECK(fid_sum / accepted >= 0.99);
}

TEST_CASE("a state on the degenerate pair cannot be split") {
  // inputs supported on m in {0, 1} see identical phases in every round:
  // the first stored Born probability is exactly one for all dwell times
  const int n = 16;
  VectorXc amps = VectorXc::Zero(n + 1);
  amps[n / 2] = std::sqrt(0.5);      // m = 0
  amps[n / 2 + 1] = std::sqrt(0.5);  // m = 1
  const CollectiveState pair(n, amps);
  for (double dt : {1e-7, 3e-7, 9e-7}) {
    const VectorXc v = effective_unitary_diagonal(n, 1e5, dt);
    CHECK(std::abs(v[n / 2] - v[n / 2 + 1]) == 0.0);
  }
  (void)pair;
}
