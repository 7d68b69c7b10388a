#include "krylovlab/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace krylovlab {

const EigenDecomposition& HermitianMatrix::ensure_eig() {
  if (!eig) eig = hermitian_eigh(h);
  return *eig;
}

HermitianMatrix sample_gue(int n, Rng& rng) {
  if (n < 2) throw std::invalid_argument("sample_gue: n must be >= 2");
  const double sigma = 1.0 / std::sqrt(static_cast<double>(n));
  ComplexMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double u = rng.gaussian(0.0, sigma);
      const double v = rng.gaussian(0.0, sigma);
      m(i, j) = {u, v};
    }
  ComplexMatrix h(n, n);
  for (int i = 0; i < n; ++i) {
    h(i, i) = {m(i, i).real(), 0.0};
    for (int j = i + 1; j < n; ++j) {
      const std::complex<double> z = 0.5 * (m(i, j) + std::conj(m(j, i)));
      h(i, j) = z;
      h(j, i) = std::conj(z);
    }
  }
  return HermitianMatrix{std::move(h), std::nullopt};
}

GueEnsemble GueEnsemble::generate(int n, int sample_count, std::uint64_t seed,
                                  bool eager_eig) {
  if (sample_count < 1) throw std::invalid_argument("GueEnsemble: sample_count must be >= 1");
  GueEnsemble out;
  out.n = n;
  out.seed = seed;
  out.samples.resize(sample_count);
#pragma omp parallel for schedule(dynamic)
  for (int s = 0; s < sample_count; ++s) {
    Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(s));
    out.samples[s] = sample_gue(n, rng);
    if (eager_eig) out.samples[s].ensure_eig();
  }
  return out;
}

Histogram spectral_density(const GueEnsemble& ensemble, int bins) {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& s : ensemble.samples) {
    if (!s.eig) throw std::invalid_argument("spectral_density: samples lack eigendecomposition");
    lo = std::min(lo, s.eig->eigenvalues.minCoeff());
    hi = std::max(hi, s.eig->eigenvalues.maxCoeff());
  }
  return spectral_density(ensemble, bins, lo, hi);
}

Histogram spectral_density(const GueEnsemble& ensemble, int bins, double lo, double hi) {
  if (bins < 8) throw std::invalid_argument("spectral_density: bins must be >= 8");
  if (ensemble.samples.empty()) throw std::invalid_argument("spectral_density: empty ensemble");
  if (!(hi > lo)) throw std::invalid_argument("spectral_density: invalid range");

  Histogram hist;
  hist.edges.resize(bins + 1);
  const double width = (hi - lo) / bins;
  for (int b = 0; b <= bins; ++b) hist.edges[b] = lo + b * width;
  hist.counts.assign(bins, 0);

  for (const auto& s : ensemble.samples) {
    if (!s.eig) throw std::invalid_argument("spectral_density: samples lack eigendecomposition");
    for (Eigen::Index i = 0; i < s.eig->eigenvalues.size(); ++i) {
      const double e = s.eig->eigenvalues[i];
      hist.total += 1;
      if (e < lo || e > hi) continue;
      int b = static_cast<int>((e - lo) / width);
      b = std::clamp(b, 0, bins - 1);
      hist.counts[b] += 1;
    }
  }
  hist.density.resize(bins);
  for (int b = 0; b < bins; ++b)
    hist.density[b] = static_cast<double>(hist.counts[b]) /
                      (static_cast<double>(hist.total) * width);
  return hist;
}

}  // namespace krylovlab
