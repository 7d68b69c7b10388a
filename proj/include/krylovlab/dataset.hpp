#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "krylovlab/krylov.hpp"
#include "krylovlab/rng.hpp"
#include "krylovlab/states.hpp"

namespace krylovlab {

enum class Split : std::uint8_t { Train = 0, Val = 1, Test = 2 };

enum class TargetKind { ComplexityOverN, TimeOverN };
std::string target_kind_name(TargetKind k);
TargetKind target_kind_from_name(const std::string& name);

// Supervised records: 4 channels x N single-precision features per record
// (Re psi(t), Im psi(t), Re psi(0), Im psi(0), channel-major) with a scalar
// normalized target. Records are stored flat, ordered by sample_id, then
// beta index, then time index; the split is assigned per whole sample.
struct Dataset {
  int n = 0;           // state dimension (feature length per channel)
  int t = 0;           // grid length
  std::vector<double> betas;
  Basis basis = Basis::Energy;
  TargetKind target_kind = TargetKind::ComplexityOverN;
  std::uint64_t seed = 0;  // seed recorded for provenance (ensemble root seed)

  std::vector<std::uint32_t> sample_ids;  // unique, ascending
  std::vector<Split> split_of;            // parallel to sample_ids

  std::vector<float> features;  // record_count * 4n
  std::vector<float> targets;   // record_count

  std::size_t record_count() const { return targets.size(); }
  std::size_t feature_len() const { return 4 * static_cast<std::size_t>(n); }
  std::span<const float> record(std::size_t r) const {
    return {features.data() + r * feature_len(), feature_len()};
  }

  // Derived from the record ordering.
  std::uint32_t record_sample(std::size_t r) const;
  int record_beta_index(std::size_t r) const;
  int record_time(std::size_t r) const;
  Split record_split(std::size_t r) const;
  std::vector<std::size_t> split_indices(Split s) const;
};

// One record per (sample, beta, t). Trajectories and curves must share the
// integer grid; trajectories must arrive grouped per sample in (sample,
// beta) order with a matching curve each.
Dataset build_dataset(const std::vector<StateTrajectory>& trajectories,
                      const std::vector<ComplexityCurve>& curves, TargetKind target_kind);

// Deterministic shuffle of the sample ids under rng, then contiguous
// assignment; floor counts with the remainder going to train. Ratios must
// sum to 1 and every split must receive at least one sample.
void split_by_sample(Dataset& dataset, const std::array<double, 3>& ratios, Rng& rng);

// KCX-backed persistence; read(write(d)) is bit-identical on features and
// targets. See kcx.hpp for the container layout.
void write_dataset(const std::string& path, const Dataset& dataset);
Dataset read_dataset(const std::string& path);

// Inspection export: sample_id, beta, t, target rows.
void write_targets_csv(const std::string& path, const Dataset& dataset);

}  // namespace krylovlab
