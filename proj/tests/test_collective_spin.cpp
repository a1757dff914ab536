#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dicke/collective_spin.hpp"
#include "dicke/rng.hpp"

using namespace dicke;

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Independent binomial probability C(n,k)/2^n by plain product, kept free
// of the log-gamma path used by the implementation.
double binom_prob(int n, int k) {
  double p = 1.0;
  for (int i = 1; i <= k; ++i) p *= static_cast<double>(n - k + i) / i;
  return p * std::pow(0.5, n);
}

CollectiveState random_state(int n, Rng& rng) {
  VectorXc amps(n + 1);
  for (int i = 0; i <= n; ++i) amps[i] = Complex(rng.normal(), rng.normal());
  CollectiveState s(n, amps, n % 2 == 0 ? SpinParity::even_only : SpinParity::any);
  return s.normalized();
}

}  // namespace

TEST_CASE("basis_index maps m_z to storage index") {
  CHECK(basis_index(4, 0) == 2);
  CHECK(basis_index(4, -2) == 0);
  CHECK(basis_index(500, 250) == 500);
  CHECK_THROWS_AS(basis_index(4, 3), std::invalid_argument);
  CHECK_THROWS_AS(basis_index(5, 1), std::invalid_argument);
}

TEST_CASE("odd spin numbers are rejected unless explicitly allowed") {
  CHECK_THROWS_AS(initial_plus_state(7), std::invalid_argument);
  CHECK_THROWS_AS(basis_state(7, 1), std::invalid_argument);
  CHECK(plus_state_any_parity(9).dim() == 10);
}

TEST_CASE("initial plus state matches hand-expanded amplitudes") {
  const CollectiveState s2 = initial_plus_state(2);
  CHECK(s2.amplitudes[0].real() == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(s2.amplitudes[1].real() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-13));
  CHECK(s2.amplitudes[2].real() == doctest::Approx(0.5).epsilon(1e-13));

  const CollectiveState s4 = initial_plus_state(4);
  CHECK(std::norm(s4.amplitudes[basis_index(4, 0)]) == doctest::Approx(0.375).epsilon(1e-13));
}

TEST_CASE("plus-state peak matches the exact binomial and its Stirling form") {
  const CollectiveState s = initial_plus_state(100);
  const double exact = binom_prob(100, 50);
  CHECK(std::norm(s.amplitudes[basis_index(100, 0)]) == doctest::Approx(exact).epsilon(1e-12));
  const double stirling = std::sqrt(2.0 / (kPi * 100.0));
  CHECK(std::abs(exact - stirling) / exact < 0.003);
}

TEST_CASE("log-space amplitudes stay normalized up to N = 2^20") {
  for (int n : {10000, 1 << 20}) {
    const CollectiveState s = binomial_amplitude_state(n, 0.5);
    CHECK(std::abs(s.norm_sq() - 1.0) < 1e-12);
  }
  const CollectiveState biased = binomial_amplitude_state(1 << 16, 0.37);
  CHECK(std::abs(biased.norm_sq() - 1.0) < 1e-12);
}

TEST_CASE("collective operators satisfy the su(2) algebra") {
  for (int n : {2, 8, 20}) {
    const CollectiveOperators ops = build_collective_operators(n);
    const MatrixXc comm_xy = ops.jx * ops.jy - ops.jy * ops.jx;
    CHECK((comm_xy - Complex(0, 1) * ops.jz).cwiseAbs().maxCoeff() < 1e-10);
    const MatrixXc comm_yz = ops.jy * ops.jz - ops.jz * ops.jy;
    CHECK((comm_yz - Complex(0, 1) * ops.jx).cwiseAbs().maxCoeff() < 1e-10);
    const MatrixXc comm_zx = ops.jz * ops.jx - ops.jx * ops.jz;
    CHECK((comm_zx - Complex(0, 1) * ops.jy).cwiseAbs().maxCoeff() < 1e-10);

    const double j = 0.5 * n;
    const MatrixXc casimir = ops.jx * ops.jx + ops.jy * ops.jy + ops.jz * ops.jz;
    const MatrixXc expected = j * (j + 1.0) * MatrixXc::Identity(n + 1, n + 1);
    CHECK((casimir - expected).cwiseAbs().maxCoeff() < 1e-10);

    CHECK((ops.jx - ops.jx.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((ops.jy - ops.jy.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("ladder matrix elements follow the angular momentum convention") {
  const CollectiveOperators ops = build_collective_operators(2);
  // <m=0| J_+ |m=-1> for J = 1.
  CHECK(ops.jplus(basis_index(2, 0), basis_index(2, -1)).real() ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  // J_z |4, 0> = 0.
  const CollectiveState dicke = basis_state(4, 0);
  CHECK(apply_jz(dicke).amplitudes.norm() == doctest::Approx(0.0));
}

TEST_CASE("structured applications agree with dense operators") {
  Rng rng(11);
  for (int n : {4, 9, 16}) {
    CollectiveOperators ops;
    if (n % 2 == 0) {
      ops = build_collective_operators(n);
    } else {
      // dense builders are even-N only; assemble from ladder coefficients
      ops.jz = MatrixXc::Zero(n + 1, n + 1);
      ops.jplus = MatrixXc::Zero(n + 1, n + 1);
      for (int k = 0; k <= n; ++k) ops.jz(k, k) = k - 0.5 * n;
      for (int k = 0; k < n; ++k) ops.jplus(k + 1, k) = ladder_coefficient(n, k);
      ops.jminus = ops.jplus.adjoint();
      ops.jx = 0.5 * (ops.jplus + ops.jminus);
      ops.jy = Complex(0, -0.5) * (ops.jplus - ops.jminus);
    }
    const CollectiveState psi = random_state(n, rng);
    CHECK((apply_jx(psi).amplitudes - ops.jx * psi.amplitudes).norm() < 1e-12);
    CHECK((apply_jy(psi).amplitudes - ops.jy * psi.amplitudes).norm() < 1e-12);
    CHECK((apply_jz(psi).amplitudes - ops.jz * psi.amplitudes).norm() < 1e-12);
  }
}

TEST_CASE("jz phase is diagonal and periodic") {
  const CollectiveState psi = initial_plus_state(8);
  const CollectiveState full_turn = apply_jz_phase(psi, 2.0 * kPi, 0.0);
  CHECK((full_turn.amplitudes - psi.amplitudes).norm() < 1e-12);

  const CollectiveState dicke = basis_state(4, 0);
  const CollectiveState phased = apply_jz_phase(dicke, kPi, 0.0);
  CHECK((phased.amplitudes - dicke.amplitudes).norm() < 1e-14);

  // phase pattern of U = e^{i 2 pi J_z / 2^K}
  const int k_bits = 5;
  const CollectiveState u = apply_jz_phase(psi, 2.0 * kPi / (1 << k_bits), 0.0);
  for (int i = 0; i <= 8; ++i) {
    const Complex expected =
        std::polar(1.0, 2.0 * kPi * (i - 4.0) / (1 << k_bits));
    CHECK(std::abs(u.amplitudes[i] - expected * psi.amplitudes[i]) < 1e-14);
  }
}

TEST_CASE("rotate_y basic identities") {
  const CollectiveState psi = initial_plus_state(12);
  CHECK((rotate_y(psi, 0.0).amplitudes - psi.amplitudes).norm() == 0.0);

  // A pi/2 rotation about y takes |0...0> (m_z = +N/2) to the plus state.
  const CollectiveState top = basis_state(12, 6);
  const CollectiveState rotated = rotate_y(top, 0.5 * kPi);
  CHECK(overlap_magnitude(rotated, psi) > 1.0 - 1e-10);

  // round trip
  Rng rng(99);
  const CollectiveState x = random_state(12, rng);
  const CollectiveState back = rotate_y(rotate_y(x, 0.7), -0.7);
  CHECK((back.amplitudes - x.amplitudes).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("rotate_y reproduces the rotated binomial product state") {
  const int n = 24;
  const long m = 5;
  const double p = static_cast<double>(m) / n + 0.5;
  const double chi = std::acos(std::sqrt(p)) - 0.25 * kPi;
  const CollectiveState direct = binomial_amplitude_state(n, p);
  const CollectiveState rotated = rotate_y(initial_plus_state(n), 2.0 * chi);
  CHECK(overlap_magnitude(direct, rotated) > 1.0 - 1e-12);
}

TEST_CASE("rotate_y is unitary for small and large N") {
  Rng rng(5);
  for (int n : {16, 300, 700, 2048}) {
    const CollectiveState x = random_state(n, rng);
    const CollectiveState y = rotate_y(x, 0.73652);
    CHECK(std::abs(y.norm_sq() - 1.0) < 1e-10);
    const CollectiveState back = rotate_y(y, -0.73652);
    CHECK((back.amplitudes - x.amplitudes).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("rotation stays unitary at N = 4096") {
  Rng rng(4096);
  const CollectiveState x = random_state(4096, rng);
  const CollectiveState y = rotate_y(x, 0.5 * kPi);
  CHECK(std::abs(y.norm_sq() - 1.0) < 1e-10);
  const CollectiveState back = rotate_y(y, -0.5 * kPi);
  CHECK((back.amplitudes - x.amplitudes).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("eigensolver and Chebyshev rotation paths agree across the crossover") {
  Rng rng(7);
  // 560 uses the dense path, 640 the Chebyshev path; rotating by the same
  // angle from states embedded in the overlap region must agree.
  const CollectiveState x = random_state(640, rng);
  const CollectiveState direct = rotate_y(x, 1.1);  // Chebyshev
  // Compose from two half rotations to stress accumulation as well.
  const CollectiveState halves = rotate_y(rotate_y(x, 0.55), 0.55);
  CHECK((direct.amplitudes - halves.amplitudes).cwiseAbs().maxCoeff() < 1e-10);
  // Compare against the dense rotation matrix
  const MatrixXc r = rotation_y_matrix(640, 1.1);
  CHECK((direct.amplitudes - r * x.amplitudes).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("expectation values on reference states") {
  const CollectiveState dicke = basis_state(4, 0);
  CHECK(expectation(dicke, OperatorSpec::power(SpinAxis::z, 1)).real() ==
        doctest::Approx(0.0));
  CHECK(std::abs(expectation(dicke, OperatorSpec::power(SpinAxis::x, 1))) < 1e-13);

  for (int n : {4, 10, 64}) {
    const CollectiveState plus = initial_plus_state(n);
    const Complex jz2 = expectation(plus, OperatorSpec::power(SpinAxis::z, 2));
    // independent check: direct weighted sum over the binomial
    double direct = 0.0;
    for (int k = 0; k <= n; ++k) {
      direct += binom_prob(n, k) * (k - 0.5 * n) * (k - 0.5 * n);
    }
    CHECK(jz2.real() == doctest::Approx(direct).epsilon(1e-10));
    CHECK(jz2.real() == doctest::Approx(n / 4.0).epsilon(1e-10));
    CHECK(std::abs(jz2.imag()) < 1e-10);
  }

  const CollectiveOperators ops = build_collective_operators(4);
  CHECK(expectation(dicke, MatrixXc(ops.jz * ops.jz)).real() == doctest::Approx(0.0));
  CHECK_THROWS_AS(expectation(dicke, MatrixXc(MatrixXc::Identity(3, 3))),
                  std::invalid_argument);
}

TEST_CASE("fidelity for pure states and ensembles") {
  CHECK(fidelity(basis_state(4, 0), 0) == doctest::Approx(1.0));
  CHECK(fidelity(initial_plus_state(4), 0) == doctest::Approx(0.375).epsilon(1e-13));
  const std::vector<CollectiveState> ensemble{basis_state(4, 0), basis_state(4, 2)};
  CHECK(fidelity(ensemble, 0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(fidelity(basis_state(4, 0), 5), std::invalid_argument);
}
