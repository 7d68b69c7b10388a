#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "krylovlab/rng.hpp"

using krylovlab::Rng;

TEST_CASE("same seed gives bitwise-identical sequences") {
  Rng a(1), b(1);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng c(1), d(1);
  for (int i = 0; i < 1000; ++i) {
    const double x = c.gaussian(0.0, 1.0), y = d.gaussian(0.0, 1.0);
    CHECK(x == y);
  }
}

TEST_CASE("gaussian moments converge: seed=1, 1e6 draws") {
  Rng rng(1);
  const int n = 1'000'000;
  double sum = 0.0, sum2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = rng.gaussian(0.0, 1.0);
    sum += x;
    sum2 += x * x;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  CHECK(std::abs(mean) < 0.005);
  CHECK(std::abs(var - 1.0) < 0.01);
}

TEST_CASE("scaled draws match unit-variance draws") {
  const double sigma = 3.7;
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i)
    CHECK(a.gaussian(0.0, sigma) / sigma == doctest::Approx(b.gaussian(0.0, 1.0)).epsilon(1e-15));
}

TEST_CASE("gaussian rejects non-positive stddev") {
  Rng rng(0);
  CHECK_THROWS_AS(rng.gaussian(0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(rng.gaussian(0.0, -1.0), std::invalid_argument);
}

TEST_CASE("substreams differ and are reproducible") {
  Rng a = Rng::substream(7, 0);
  Rng b = Rng::substream(7, 1);
  Rng a2 = Rng::substream(7, 0);
  CHECK(a.next_u64() != b.next_u64());
  Rng a3 = Rng::substream(7, 0);
  CHECK(a2.next_u64() == a3.next_u64());
}

TEST_CASE("uniform_below is unbiased over small range") {
  Rng rng(3);
  std::vector<int> counts(5, 0);
  const int n = 500'000;
  for (int i = 0; i < n; ++i) counts[rng.uniform_below(5)]++;
  for (int c : counts) CHECK(std::abs(c - n / 5) < 2000);
}

TEST_CASE("shuffle is a permutation and seed-stable") {
  std::vector<int> v(20);
  for (int i = 0; i < 20; ++i) v[i] = i;
  Rng rng(11);
  rng.shuffle(v);
  auto w = v;
  std::sort(w.begin(), w.end());
  for (int i = 0; i < 20; ++i) CHECK(w[i] == i);

  std::vector<int> v2(20);
  for (int i = 0; i < 20; ++i) v2[i] = i;
  Rng rng2(11);
  rng2.shuffle(v2);
  CHECK(v == v2);
}
