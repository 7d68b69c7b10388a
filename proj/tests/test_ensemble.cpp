#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "krylovlab/ensemble.hpp"

using namespace krylovlab;

namespace {

// Exact antiderivative of sqrt(4 - E^2): E/2 sqrt(4-E^2) + 2 asin(E/2).
double semicircle_cdf_part(double e) {
  e = std::clamp(e, -2.0, 2.0);
  return (e / 2.0 * std::sqrt(4.0 - e * e) + 2.0 * std::asin(e / 2.0)) / (2.0 * M_PI);
}

double semicircle_bin_average(double lo, double hi) {
  return (semicircle_cdf_part(hi) - semicircle_cdf_part(lo)) / (hi - lo);
}

}  // namespace

TEST_CASE("construction is exactly Hermitian with real diagonal") {
  Rng rng(1);
  const auto s = sample_gue(2, rng);
  CHECK(s.h(0, 0).imag() == 0.0);
  CHECK(s.h(1, 1).imag() == 0.0);
  CHECK(s.h(0, 1) == std::conj(s.h(1, 0)));
  CHECK(hermiticity_residual(s.h) == 0.0);
}

TEST_CASE("n < 2 rejected") {
  Rng rng(1);
  CHECK_THROWS_AS(sample_gue(1, rng), std::invalid_argument);
}

TEST_CASE("entry variances match the GUE convention (n=64, 200 seeds)") {
  const int n = 64, m = 200;
  double diag2 = 0.0, off2 = 0.0;
  std::size_t diag_n = 0, off_n = 0;
  for (int s = 0; s < m; ++s) {
    Rng rng = Rng::substream(100, s);
    const auto h = sample_gue(n, rng).h;
    for (int i = 0; i < n; ++i) {
      diag2 += h(i, i).real() * h(i, i).real();
      ++diag_n;
      for (int j = i + 1; j < n; ++j) {
        off2 += h(i, j).real() * h(i, j).real();
        ++off_n;
      }
    }
  }
  const double var_diag = diag2 / diag_n;       // expected 1/n
  const double var_off = off2 / off_n;          // expected 1/(2n)
  CHECK(var_diag == doctest::Approx(1.0 / n).epsilon(0.15));
  CHECK(var_off == doctest::Approx(1.0 / (2.0 * n)).epsilon(0.15));
}

TEST_CASE("regeneration is byte-identical from (seed, s, n)") {
  const auto ens = GueEnsemble::generate(8, 5, 42, false);
  Rng rng = Rng::substream(42, 3);
  const auto again = sample_gue(8, rng);
  CHECK(ens.samples[3].h == again.h);
}

TEST_CASE("ensemble spectral statistics at n=64, m=200") {
  auto ens = GueEnsemble::generate(64, 200, 7);
  double mean = 0.0, lo = 1e300, hi = -1e300;
  std::size_t count = 0;
  for (const auto& s : ens.samples) {
    mean += s.eig->eigenvalues.sum();
    count += s.eig->eigenvalues.size();
    lo = std::min(lo, s.eig->eigenvalues.minCoeff());
    hi = std::max(hi, s.eig->eigenvalues.maxCoeff());
  }
  mean /= count;
  CHECK(std::abs(mean) < 0.02);
  CHECK(lo > -2.5);  // edge fluctuation bound
  CHECK(hi < 2.5);

  SUBCASE("histogram matches the Wigner semicircle") {
    const auto hist = spectral_density(ens, 40, -2.0, 2.0);
    double max_dev = 0.0;
    for (int b = 0; b < 40; ++b) {
      const double expect = semicircle_bin_average(hist.edges[b], hist.edges[b + 1]);
      max_dev = std::max(max_dev, std::abs(hist.density[b] - expect));
    }
    CHECK(max_dev <= 0.03);
  }

  SUBCASE("histogram integral is <= 1 and close to 1") {
    const auto hist = spectral_density(ens, 40);
    double integral = 0.0;
    for (int b = 0; b < 40; ++b)
      integral += hist.density[b] * (hist.edges[b + 1] - hist.edges[b]);
    CHECK(integral == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("deviation shrinks with more samples") {
  auto dev_for = [](int m, std::uint64_t seed) {
    auto ens = GueEnsemble::generate(64, m, seed);
    const auto hist = spectral_density(ens, 40, -2.0, 2.0);
    double acc = 0.0;
    for (int b = 0; b < 40; ++b) {
      const double expect = semicircle_bin_average(hist.edges[b], hist.edges[b + 1]);
      acc += (hist.density[b] - expect) * (hist.density[b] - expect);
    }
    return std::sqrt(acc / 40);
  };
  // quadrupling the sample count should halve the L2 deviation, up to noise
  CHECK(dev_for(200, 3) < dev_for(50, 3) * 0.8);
}

TEST_CASE("injected diagonal sample gives a delta histogram") {
  GueEnsemble ens;
  ens.n = 4;
  ens.seed = 0;
  HermitianMatrix hm;
  hm.h = ComplexMatrix::Identity(4, 4);
  hm.ensure_eig();
  ens.samples.push_back(std::move(hm));
  const auto hist = spectral_density(ens, 8, 0.0, 2.0);
  for (int b = 0; b < 8; ++b) {
    const bool holds_one = hist.edges[b] <= 1.0 && 1.0 < hist.edges[b + 1];
    CHECK(hist.counts[b] == (holds_one ? 4u : 0u));
  }
}

TEST_CASE("histogram validation") {
  auto ens = GueEnsemble::generate(4, 2, 1);
  CHECK_THROWS_AS(spectral_density(ens, 4), std::invalid_argument);
  GueEnsemble empty;
  CHECK_THROWS_AS(spectral_density(empty, 10), std::invalid_argument);
}
