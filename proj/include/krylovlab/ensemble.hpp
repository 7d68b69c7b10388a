#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "krylovlab/numerics.hpp"
#include "krylovlab/rng.hpp"

namespace krylovlab {

struct HermitianMatrix {
  ComplexMatrix h;
  std::optional<EigenDecomposition> eig;  // filled eagerly by GueEnsemble::generate

  const EigenDecomposition& ensure_eig();
};

// H = (M + M^dagger)/2 with M_ij = u_ij + i v_ij, u and v ~ Normal(0, 1/n).
// Draw order: row-major over (i, j), u before v. The upper triangle is
// hermitized explicitly so H = H^dagger holds to the last bit.
HermitianMatrix sample_gue(int n, Rng& rng);

struct GueEnsemble {
  int n = 0;
  std::uint64_t seed = 0;
  std::vector<HermitianMatrix> samples;

  // Sample s is generated from Rng::substream(seed, s), so any sample is
  // regenerable from (seed, s) alone. Generation is parallel across samples.
  static GueEnsemble generate(int n, int sample_count, std::uint64_t seed,
                              bool eager_eig = true);
};

struct Histogram {
  std::vector<double> edges;    // bins + 1
  std::vector<double> density;  // normalized: sum(density * width) <= 1
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;
};

// Eigenvalue histogram over all samples, normalized by the total eigenvalue
// count (values outside [lo, hi] are dropped from bins but kept in the
// normalization). Default range spans the observed spectrum.
Histogram spectral_density(const GueEnsemble& ensemble, int bins);
Histogram spectral_density(const GueEnsemble& ensemble, int bins, double lo, double hi);

}  // namespace krylovlab
