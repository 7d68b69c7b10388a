#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <complex>
#include <vector>

#include "krylovlab/errors.hpp"
#include "krylovlab/numerics.hpp"

using namespace krylovlab;

namespace {

ComplexMatrix random_hermitian(int n, Rng& rng) {
  ComplexMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = {rng.gaussian(0, 1), rng.gaussian(0, 1)};
  return (m + m.adjoint()).eval() / 2.0;
}

// Characteristic-polynomial eigenvalue oracle for n <= 4: coefficients via
// Faddeev-LeVerrier, roots via Durand-Kerner. Independent of any
// eigendecomposition routine.
std::vector<double> charpoly_eigenvalues(const ComplexMatrix& h) {
  const int n = static_cast<int>(h.rows());
  REQUIRE(n <= 4);
  // p(x) = x^n + c[1] x^{n-1} + ... + c[n]
  std::vector<std::complex<double>> c(n + 1, 0.0);
  c[0] = 1.0;
  ComplexMatrix m = ComplexMatrix::Zero(n, n);
  for (int k = 1; k <= n; ++k) {
    m = (h * m).eval();
    m.diagonal().array() += c[k - 1];
    c[k] = -(h * m).trace() / static_cast<double>(k);
  }
  // Durand-Kerner from staggered complex starts
  std::vector<std::complex<double>> r(n);
  for (int i = 0; i < n; ++i) r[i] = std::pow(std::complex<double>(0.4, 0.9), i + 1);
  auto eval = [&](std::complex<double> x) {
    std::complex<double> acc = 0.0;
    for (int k = 0; k <= n; ++k) acc = acc * x + c[k];
    return acc;
  };
  for (int iter = 0; iter < 500; ++iter) {
    double moved = 0.0;
    for (int i = 0; i < n; ++i) {
      std::complex<double> denom = 1.0;
      for (int j = 0; j < n; ++j)
        if (j != i) denom *= r[i] - r[j];
      const std::complex<double> delta = eval(r[i]) / denom;
      r[i] -= delta;
      moved = std::max(moved, std::abs(delta));
    }
    if (moved < 1e-14) break;
  }
  std::vector<double> out;
  for (const auto& z : r) out.push_back(z.real());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("already-diagonal matrix") {
  ComplexMatrix h = ComplexMatrix::Zero(3, 3);
  h(0, 0) = 3;
  h(1, 1) = 1;
  h(2, 2) = 2;
  const auto eig = hermitian_eigh(h);
  CHECK(eig.eigenvalues[0] == doctest::Approx(1));
  CHECK(eig.eigenvalues[1] == doctest::Approx(2));
  CHECK(eig.eigenvalues[2] == doctest::Approx(3));
  // columns are permuted identity columns
  for (int c = 0; c < 3; ++c) {
    int ones = 0;
    for (int r = 0; r < 3; ++r) {
      const double a = std::abs(eig.eigenvectors(r, c));
      CHECK((a < 1e-12 || a == doctest::Approx(1.0)));
      if (a > 0.5) ++ones;
    }
    CHECK(ones == 1);
  }
}

TEST_CASE("pauli-x") {
  ComplexMatrix h(2, 2);
  h << 0, 1, 1, 0;
  const auto eig = hermitian_eigh(h);
  CHECK(eig.eigenvalues[0] == doctest::Approx(-1));
  CHECK(eig.eigenvalues[1] == doctest::Approx(1));
  const double s = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(eig.eigenvectors(0, 0)) == doctest::Approx(s));
  CHECK(std::abs(eig.eigenvectors(1, 0)) == doctest::Approx(s));
  CHECK((eig.eigenvectors.col(0).real().prod()) == doctest::Approx(-0.5));  // (1,-1)/sqrt2 pattern
  CHECK((eig.eigenvectors.col(1).real().prod()) == doctest::Approx(0.5));
}

TEST_CASE("random 8x8 reconstruction residual <= 1e-10") {
  Rng rng(5);
  const ComplexMatrix h = random_hermitian(8, rng);
  const auto eig = hermitian_eigh(h);
  const ComplexMatrix rec =
      eig.eigenvectors * eig.eigenvalues.asDiagonal() * eig.eigenvectors.adjoint();
  CHECK((rec - h).cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(unitarity_residual(eig.eigenvectors) <= 1e-10);
  for (int i = 0; i + 1 < 8; ++i) CHECK(eig.eigenvalues[i] <= eig.eigenvalues[i + 1]);
}

TEST_CASE("eigenvalues match characteristic-polynomial oracle (n <= 4)") {
  Rng rng(17);
  for (int n = 2; n <= 4; ++n) {
    for (int rep = 0; rep < 5; ++rep) {
      const ComplexMatrix h = random_hermitian(n, rng);
      const auto eig = hermitian_eigh(h);
      const auto roots = charpoly_eigenvalues(h);
      for (int i = 0; i < n; ++i) CHECK(std::abs(eig.eigenvalues[i] - roots[i]) < 1e-8);
    }
  }
}

TEST_CASE("phase convention makes the decomposition bit-deterministic") {
  Rng rng(9);
  const ComplexMatrix h = random_hermitian(6, rng);
  const auto a = hermitian_eigh(h);
  const auto b = hermitian_eigh(h);
  CHECK(a.eigenvalues == b.eigenvalues);
  CHECK(a.eigenvectors == b.eigenvectors);
  // largest component of each column is real positive
  for (int c = 0; c < 6; ++c) {
    Eigen::Index imax;
    a.eigenvectors.col(c).cwiseAbs().maxCoeff(&imax);
    CHECK(a.eigenvectors(imax, c).imag() == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(a.eigenvectors(imax, c).real() > 0);
  }
}

TEST_CASE("input validation") {
  ComplexMatrix bad(2, 2);
  bad << 0, 1, 2, 0;  // not Hermitian
  CHECK_THROWS_AS(hermitian_eigh(bad), std::invalid_argument);
  CHECK_THROWS_AS(hermitian_eigh(ComplexMatrix(2, 3)), std::invalid_argument);
  Rng rng(0);
  CHECK_THROWS_AS(haar_unitary(0, rng), std::invalid_argument);
}

TEST_CASE("inputs are not mutated") {
  Rng rng(13);
  const ComplexMatrix h = random_hermitian(5, rng);
  const ComplexMatrix copy = h;
  (void)hermitian_eigh(h);
  CHECK(h == copy);
}

TEST_CASE("haar unitary: n=1 unit modulus, n=16 unitary") {
  Rng rng(2);
  const ComplexMatrix u1 = haar_unitary(1, rng);
  CHECK(std::abs(std::abs(u1(0, 0)) - 1.0) < 1e-12);
  const ComplexMatrix u = haar_unitary(16, rng);
  for (int c = 0; c < 16; ++c) CHECK(std::abs(u.col(c).norm() - 1.0) < 1e-12);
  CHECK(unitarity_residual(u) <= 1e-10);
}

TEST_CASE("haar moment: mean |U_ij|^2 = 1/16 over 1e4 draws") {
  Rng rng(4);
  const int n = 16, draws = 10'000;
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
  for (int d = 0; d < draws; ++d) acc += haar_unitary(n, rng).cwiseAbs2();
  acc /= draws;
  CHECK((acc.array() - 1.0 / n).abs().maxCoeff() < 0.002);
}
