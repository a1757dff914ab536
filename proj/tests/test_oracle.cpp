#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <cmath>

#include "dicke/oracle.hpp"

using namespace dicke;

namespace {

CollectiveState random_symmetric_state(int n, Rng& rng) {
  VectorXc amps(n + 1);
  for (int i = 0; i <= n; ++i) amps[i] = Complex(rng.normal(), rng.normal());
  CollectiveState s(n, amps);
  return s.normalized();
}

}  // namespace

TEST_CASE("symmetrize_check flags asymmetric states only") {
  CHECK(symmetrize_check(embed(initial_plus_state(6))) < 1e-13);

  FullState lopsided = FullState::spins_only(2);
  lopsided.amplitudes[0b01] = 1.0;  // |0...01>
  CHECK(symmetrize_check(lopsided) > 0.1);
}

TEST_CASE("embedding |4,0> gives the six weight-2 bitstrings") {
  const FullState full = embed(basis_state(4, 0));
  const double amp = 1.0 / std::sqrt(6.0);
  int hits = 0;
  for (std::size_t x = 0; x < full.dim(); ++x) {
    if (std::popcount(x) == 2) {
      ++hits;
      CHECK(full.amplitudes[x].real() == doctest::Approx(amp).epsilon(1e-13));
    } else {
      CHECK(std::abs(full.amplitudes[x]) == 0.0);
    }
  }
  CHECK(hits == 6);

  // |N, N/2> is |0...0>
  const FullState top = embed(basis_state(4, 2));
  CHECK(std::abs(top.amplitudes[0]) == doctest::Approx(1.0));
}

TEST_CASE("embed then project is the identity on the symmetric subspace") {
  Rng rng(21);
  for (int n : {2, 5, 8}) {
    VectorXc amps(n + 1);
    for (int i = 0; i <= n; ++i) amps[i] = Complex(rng.normal(), rng.normal());
    CollectiveState s(n, amps, n % 2 == 0 ? SpinParity::even_only : SpinParity::any);
    s = s.normalized();
    const CollectiveState round_trip = project(embed(s));
    CHECK((round_trip.amplitudes - s.amplitudes).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("full-state circuit matches the collective simulator seed for seed") {
  for (int n : {2, 4, 6, 8, 10}) {
    const PreparationPlan plan = make_plan(n, 2e6);
    for (int seed = 0; seed < 100; ++seed) {
      Rng rng_full = Rng::for_trial(555, seed);
      Rng rng_coll = Rng::for_trial(555, seed);
      const FullRunRecord full = full_pe_run(plan, rng_full);
      const PreparationRecord coll = run_preparation(plan, rng_coll);
      REQUIRE(full.bits == coll.bits);
      CHECK(full.decoded_mz == coll.decoded_mz);
      for (std::size_t j = 0; j < full.born_probs.size(); ++j) {
        CHECK(std::abs(full.born_probs[j] - coll.born_probs[j]) < 1e-10);
      }
      CHECK(std::abs(full.fidelity - coll.fidelity) < 1e-10);
      CHECK(full.fidelity == doctest::Approx(1.0).epsilon(1e-10));
      CHECK(full.symmetry_deviation < 1e-12);
    }
  }
}

TEST_CASE("unconditional rotation factor changes no Born probability") {
  const PreparationPlan plan = make_plan(8, 3e6);
  for (int seed = 0; seed < 25; ++seed) {
    Rng with_factor = Rng::for_trial(9000, seed);
    Rng without_factor = Rng::for_trial(9000, seed);
    const FullRunRecord a = full_pe_run(plan, with_factor, true);
    const FullRunRecord b = full_pe_run(plan, without_factor, false);
    REQUIRE(a.bits == b.bits);
    for (std::size_t j = 0; j < a.born_probs.size(); ++j) {
      CHECK(std::abs(a.born_probs[j] - b.born_probs[j]) < 1e-12);
    }
  }
}

TEST_CASE("zero deviations reduce to the uniform circuit") {
  const PreparationPlan plan = make_plan(6, 1e6);
  const std::vector<double> zero(6, 0.0);
  Rng a = Rng::for_trial(4242, 0), b = Rng::for_trial(4242, 0);
  const NonuniformReport report = nonuniform_pe_run(plan, plan.gamma, zero, a);
  const FullRunRecord uniform = full_pe_run(plan, b);
  CHECK(report.record.bits == uniform.bits);
  CHECK((report.record.final_state.amplitudes - uniform.final_state.amplitudes).norm() <
        1e-12);
  CHECK(report.smallness == 0.0);
}

TEST_CASE("uniform deviation is a rescaled coupling and keeps permutation symmetry") {
  const PreparationPlan plan = make_plan(6, 1e6);
  const double eps = 0.02;
  const std::vector<double> uniform_dev(6, eps);
  const std::vector<double> zero(6, 0.0);
  for (int seed = 0; seed < 10; ++seed) {
    Rng a = Rng::for_trial(808, seed), b = Rng::for_trial(808, seed);
    const NonuniformReport dev_run = nonuniform_pe_run(plan, plan.gamma, uniform_dev, a);
    const NonuniformReport scaled_run =
        nonuniform_pe_run(plan, plan.gamma * (1.0 + eps), zero, b);
    REQUIRE(dev_run.record.bits == scaled_run.record.bits);
    CHECK((dev_run.record.final_state.amplitudes -
           scaled_run.record.final_state.amplitudes)
              .norm() < 1e-12);
    CHECK(dev_run.symmetry_deviation < 1e-12);
  }
}

TEST_CASE("small random deviations keep a dominant Dicke overlap") {
  const int n = 8;
  const PreparationPlan plan = make_plan(n, 1e6);
  Rng dev_rng(31);
  int healthy = 0;
  const int runs = 20;
  for (int seed = 0; seed < runs; ++seed) {
    std::vector<double> devs(n);
    for (double& d : devs) d = dev_rng.normal(0.0, 0.01);
    double smallness = 0.0;
    for (double d : devs) smallness += std::abs(d) / 2.0;
    Rng rng = Rng::for_trial(606, seed);
    const NonuniformReport report = nonuniform_pe_run(plan, plan.gamma, devs, rng);
    CHECK(report.perturbative_regime);
    CHECK(report.smallness == doctest::Approx(smallness));
    double max_overlap = 0.0;
    for (double o : report.dicke_overlaps) max_overlap = std::max(max_overlap, o);
    if (smallness < 0.05 && max_overlap > 0.9) ++healthy;
  }
  CHECK(healthy >= runs * 3 / 4);
}

TEST_CASE("oracle size limits") {
  CHECK_THROWS_AS(FullState::spins_only(14), std::invalid_argument);
  CHECK_THROWS_AS(embed(basis_state(14, 0)), std::invalid_argument);
}
