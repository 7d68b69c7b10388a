#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "krylovlab/dataset.hpp"
#include "krylovlab/ensemble.hpp"
#include "krylovlab/train.hpp"

namespace krylovlab {

// Per-sample trajectories (one basis, every beta) and the matching
// complexity curves; ordered by (sample, beta).
struct TrajectorySet {
  std::vector<StateTrajectory> trajectories;
  std::vector<ComplexityCurve> curves;
};

// Runs the full physics pipeline for one basis: TFD state, eigenbasis
// evolution on the t = 0..3N-1 grid, Lanczos chain, propagated complexity.
// The pseudo-random basis uses the phase-fixed eigenvector unitary of
// sample 0 (pass u0 to override, e.g. when slicing an ensemble).
TrajectorySet compute_trajectories(GueEnsemble& ensemble, const std::vector<double>& betas,
                                   Basis basis, const ComplexMatrix* u0 = nullptr);

// Dataset for (ensemble, betas, basis): records on the integer grid with
// sample-level split (seeded from `seed`, stream index 0x53504C49).
Dataset make_dataset(GueEnsemble& ensemble, const std::vector<double>& betas, Basis basis,
                     TargetKind target, const std::array<double, 3>& ratios, std::uint64_t seed);

// Curve CSV exports (per-sample and ensemble mean/std, single beta each).
void write_curves_csv(const std::string& path, const TrajectorySet& set);
void write_mean_curve_csv(const std::string& path, const TrajectorySet& set, double beta);

struct ExperimentSpec {
  std::string kind;  // basis_sweep | beta_sweep | time_target
  int n = 64;
  int m = 40;
  std::vector<double> betas = {0.0};
  std::vector<Basis> bases = {Basis::Energy, Basis::Krylov, Basis::Original,
                              Basis::PseudoRandom};
  std::uint64_t seed = 1;
  std::string profile = "desk";  // desk | paper
  std::array<double, 3> split_ratios = {0.8, 0.1, 0.1};
  TrainConfig train;  // populated according to profile unless overridden
  std::string output_dir = "out";
};

ExperimentSpec experiment_spec_from_json(const std::string& json_text);
std::string experiment_spec_to_json(const ExperimentSpec& spec);

struct RunMetrics {
  std::string name;   // e.g. "energy_cnn", "beta0_single"
  std::string basis;
  std::string arch;
  double final_train_loss = 0.0;
  double final_val_loss = 0.0;
  double delta = 0.0;           // test RMSE
  double time_avg_delta = 0.0;  // <Delta>
  double baseline_delta = 0.0;  // mean predictor (train mean, test eval)
};

struct BetaMetrics {
  double beta;
  double delta_mixed;      // per-beta test RMSE of the mixed model
  double delta_single;     // test RMSE of the single-beta model
  double plateau_pred;     // mean prediction over the [2N, 3N) window
  double plateau_truth;
};

struct WindowMetrics {
  double early_rmse;  // mean per-bin RMSE for t/N < 0.5
  double late_rmse;   // mean per-bin RMSE for t/N > 1.5
};

struct ExperimentReport {
  ExperimentSpec spec;
  std::vector<RunMetrics> runs;
  std::vector<BetaMetrics> beta_metrics;      // beta_sweep only
  std::optional<WindowMetrics> window;        // time_target only
  std::vector<std::string> files;             // manifest, relative to output_dir
};

ExperimentReport run_basis_sweep(const ExperimentSpec& spec);
ExperimentReport run_beta_sweep(const ExperimentSpec& spec);
ExperimentReport run_time_target(const ExperimentSpec& spec);
ExperimentReport run_experiment(const ExperimentSpec& spec);  // dispatch on kind

}  // namespace krylovlab
