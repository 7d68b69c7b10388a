#include "krylovlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "krylovlab/errors.hpp"
#include "krylovlab/svg.hpp"

namespace krylovlab {

namespace {

constexpr std::uint64_t kSplitStream = 0x53504C49;  // "SPLI"

struct SamplePhysics {
  StateTrajectory traj;
  ComplexityCurve curve;
};

SamplePhysics sample_physics(const EigenDecomposition& eig, double beta,
                             const std::vector<double>& times, int sample_id, Basis basis,
                             const ComplexMatrix* u0) {
  SamplePhysics out;
  StateTrajectory energy = make_energy_trajectory(eig, beta, times, sample_id);
  // The Krylov chain lives in the energy basis, where the effective
  // Hamiltonian of the |n,n> span is diag(E).
  ComplexMatrix h_diag = eig.eigenvalues.cast<std::complex<double>>().asDiagonal();
  KrylovData kd = lanczos_tridiagonalize(h_diag, energy.psi0);
  Eigen::MatrixXcd amps = propagate_tridiagonal(kd, times);
  out.curve = spread_complexity(amps, times, static_cast<int>(eig.eigenvalues.size()));

  switch (basis) {
    case Basis::Energy: out.traj = std::move(energy); break;
    case Basis::Krylov: out.traj = to_krylov_basis(energy, kd); break;
    case Basis::Original: out.traj = to_original_basis(energy, eig.eigenvectors); break;
    case Basis::PseudoRandom: out.traj = to_pseudorandom_basis(energy, *u0); break;
  }
  return out;
}

}  // namespace

TrajectorySet compute_trajectories(GueEnsemble& ensemble, const std::vector<double>& betas,
                                   Basis basis, const ComplexMatrix* u0) {
  if (betas.empty()) throw std::invalid_argument("compute_trajectories: betas empty");
  const int m = static_cast<int>(ensemble.samples.size());
  const auto times = integer_time_grid(ensemble.n);

  ComplexMatrix u0_local;
  if (basis == Basis::PseudoRandom && u0 == nullptr) {
    u0_local = ensemble.samples.at(0).ensure_eig().eigenvectors;
    u0 = &u0_local;
  }
  for (auto& s : ensemble.samples) s.ensure_eig();

  TrajectorySet set;
  set.trajectories.resize(static_cast<std::size_t>(m) * betas.size());
  set.curves.resize(set.trajectories.size());
#pragma omp parallel for schedule(dynamic)
  for (int s = 0; s < m; ++s) {
    for (std::size_t bi = 0; bi < betas.size(); ++bi) {
      SamplePhysics ph =
          sample_physics(*ensemble.samples[s].eig, betas[bi], times, s, basis, u0);
      const std::size_t k = static_cast<std::size_t>(s) * betas.size() + bi;
      set.trajectories[k] = std::move(ph.traj);
      set.curves[k] = std::move(ph.curve);
    }
  }
  return set;
}

Dataset make_dataset(GueEnsemble& ensemble, const std::vector<double>& betas, Basis basis,
                     TargetKind target, const std::array<double, 3>& ratios,
                     std::uint64_t seed) {
  TrajectorySet set = compute_trajectories(ensemble, betas, basis);
  Dataset ds = build_dataset(set.trajectories, set.curves, target);
  ds.seed = seed;
  Rng split_rng = Rng::substream(seed, kSplitStream);
  split_by_sample(ds, ratios, split_rng);
  return ds;
}

void write_curves_csv(const std::string& path, const TrajectorySet& set) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError("cannot open '" + path + "' for writing", 0);
  out << "t,t_over_N,C,C_over_N,sample_id,beta\n";
  out.precision(10);
  for (std::size_t k = 0; k < set.curves.size(); ++k) {
    const auto& c = set.curves[k];
    const auto& tr = set.trajectories[k];
    for (std::size_t i = 0; i < c.times.size(); ++i)
      out << c.times[i] << ',' << c.times[i] / c.normalization << ',' << c.values[i] << ','
          << c.values[i] / c.normalization << ',' << tr.sample_id << ',' << tr.beta << '\n';
  }
}

void write_mean_curve_csv(const std::string& path, const TrajectorySet& set, double beta) {
  std::vector<const ComplexityCurve*> curves;
  for (std::size_t k = 0; k < set.curves.size(); ++k)
    if (set.trajectories[k].beta == beta) curves.push_back(&set.curves[k]);
  if (curves.empty()) throw std::invalid_argument("write_mean_curve_csv: no curves at this beta");

  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError("cannot open '" + path + "' for writing", 0);
  out << "t_over_N,mean_C_over_N,std_C_over_N\n";
  out.precision(10);
  const auto& times = curves.front()->times;
  const double n = curves.front()->normalization;
  for (std::size_t i = 0; i < times.size(); ++i) {
    double mean = 0.0;
    for (const auto* c : curves) mean += c->values[i] / n;
    mean /= static_cast<double>(curves.size());
    double var = 0.0;
    for (const auto* c : curves) {
      const double d = c->values[i] / n - mean;
      var += d * d;
    }
    var /= static_cast<double>(curves.size());
    out << times[i] / n << ',' << mean << ',' << std::sqrt(var) << '\n';
  }
}

// experiment plumbing --------------------------------------------------------

namespace {

TrainConfig config_for_profile(const std::string& profile) {
  TrainConfig cfg;
  if (profile == "desk") cfg = desk_profile(cfg);
  else if (profile != "paper")
    throw std::invalid_argument("unknown profile '" + profile + "' (desk|paper)");
  return cfg;
}

void merge_train_json(TrainConfig& cfg, const nlohmann::json& j) {
  cfg.batch_size = j.value("batch_size", cfg.batch_size);
  cfg.epochs = j.value("epochs", cfg.epochs);
  cfg.learning_rate = j.value("learning_rate", cfg.learning_rate);
  cfg.adam_beta1 = j.value("adam_beta1", cfg.adam_beta1);
  cfg.adam_beta2 = j.value("adam_beta2", cfg.adam_beta2);
  cfg.adam_epsilon = j.value("adam_epsilon", cfg.adam_epsilon);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.kernel = j.value("kernel", cfg.kernel);
  cfg.conv_channels = j.value("conv_channels", cfg.conv_channels);
  cfg.dense_nodes = j.value("dense_nodes", cfg.dense_nodes);
  cfg.fcn_nodes = j.value("fcn_nodes", cfg.fcn_nodes);
}

nlohmann::json train_to_json(const TrainConfig& cfg) {
  return {{"batch_size", cfg.batch_size},
          {"epochs", cfg.epochs},
          {"learning_rate", cfg.learning_rate},
          {"adam_beta1", cfg.adam_beta1},
          {"adam_beta2", cfg.adam_beta2},
          {"adam_epsilon", cfg.adam_epsilon},
          {"seed", cfg.seed},
          {"kernel", cfg.kernel},
          {"conv_channels", cfg.conv_channels},
          {"dense_nodes", cfg.dense_nodes},
          {"fcn_nodes", cfg.fcn_nodes}};
}

struct RunOutput {
  RunMetrics metrics;
  EvalReport eval;
  nn::Network<float> net;
};

RunOutput train_and_eval(const Dataset& ds, const ExperimentSpec& spec, nn::Arch arch,
                         const std::string& name, const std::string& out_dir,
                         std::vector<std::string>& files) {
  RunOutput out;
  nn::NetworkSpec nspec = spec_for(spec.train, arch, ds.n);
  out.net = nn::make_network<float>(nspec);
  Rng init_rng = Rng::substream(spec.train.seed, 1);
  nn::glorot_init(out.net, init_rng);
  History hist = train(out.net, ds, spec.train);
  out.eval = evaluate_rmse(out.net, ds, Split::Test);

  out.metrics.name = name;
  out.metrics.basis = basis_name(ds.basis);
  out.metrics.arch = arch == nn::Arch::CNN ? "cnn" : "fcn";
  out.metrics.final_train_loss = hist.back().train_loss;
  out.metrics.final_val_loss = hist.back().val_loss;
  out.metrics.delta = out.eval.rmse;
  out.metrics.time_avg_delta = out.eval.time_avg_rmse;
  out.metrics.baseline_delta = mean_predictor_rmse(ds, Split::Test, Split::Train);

  write_history_csv(out_dir + "/" + name + "_history.csv", hist);
  files.push_back(name + "_history.csv");
  nn::save_checkpoint(out_dir + "/" + name + "_model.knn", out.net);
  files.push_back(name + "_model.knn");

  // per-time-bin curve: prediction vs truth with RMSE bars
  std::ofstream csv(out_dir + "/" + name + "_eval.csv", std::ios::trunc);
  csv << "t_over_N,mean_pred,mean_truth,rmse\n";
  csv.precision(10);
  for (int t = 0; t < ds.t; ++t)
    csv << static_cast<double>(t) / ds.n << ',' << out.eval.per_time_mean_pred[t] << ','
        << out.eval.per_time_mean_truth[t] << ',' << out.eval.per_time_rmse[t] << '\n';
  files.push_back(name + "_eval.csv");

  svg::LinePlot plot;
  plot.title = name + "  (Delta=" + std::to_string(out.eval.rmse) + ")";
  plot.xlabel = "t/N";
  plot.ylabel = ds.target_kind == TargetKind::ComplexityOverN ? "C(t)/N" : "n/N";
  svg::Series truth{"truth", {}, {}, {}, "#333333", false};
  svg::Series pred{"predicted", {}, {}, {}, "#d62728", false};
  for (int t = 0; t < ds.t; ++t) {
    const double x = static_cast<double>(t) / ds.n;
    truth.x.push_back(x);
    truth.y.push_back(out.eval.per_time_mean_truth[t]);
    pred.x.push_back(x);
    pred.y.push_back(out.eval.per_time_mean_pred[t]);
    pred.yerr.push_back(out.eval.per_time_rmse[t]);
  }
  plot.series = {truth, pred};
  svg::write_line_plot(out_dir + "/" + name + "_pred_vs_truth.svg", plot);
  files.push_back(name + "_pred_vs_truth.svg");
  return out;
}

void write_report(const ExperimentReport& rep) {
  nlohmann::json j;
  j["spec"] = nlohmann::json::parse(experiment_spec_to_json(rep.spec));
  j["runs"] = nlohmann::json::array();
  for (const auto& r : rep.runs)
    j["runs"].push_back({{"name", r.name},
                         {"basis", r.basis},
                         {"arch", r.arch},
                         {"final_train_loss", r.final_train_loss},
                         {"final_val_loss", r.final_val_loss},
                         {"delta", r.delta},
                         {"time_avg_delta", r.time_avg_delta},
                         {"baseline_delta", r.baseline_delta}});
  if (!rep.beta_metrics.empty()) {
    j["beta_metrics"] = nlohmann::json::array();
    for (const auto& b : rep.beta_metrics)
      j["beta_metrics"].push_back({{"beta", b.beta},
                                   {"delta_mixed", b.delta_mixed},
                                   {"delta_single", b.delta_single},
                                   {"plateau_pred", b.plateau_pred},
                                   {"plateau_truth", b.plateau_truth}});
  }
  if (rep.window)
    j["window"] = {{"early_rmse", rep.window->early_rmse},
                   {"late_rmse", rep.window->late_rmse}};
  j["files"] = rep.files;
  std::ofstream out(rep.spec.output_dir + "/report.json", std::ios::trunc);
  out << j.dump(2) << '\n';
}

void prepare_output_dir(const ExperimentSpec& spec) {
  std::filesystem::create_directories(spec.output_dir);
  std::ofstream cfg(spec.output_dir + "/effective_config.json", std::ios::trunc);
  cfg << experiment_spec_to_json(spec) << '\n';
}

}  // namespace

ExperimentSpec experiment_spec_from_json(const std::string& json_text) {
  if (!nlohmann::json::accept(json_text))
    throw std::invalid_argument("experiment spec is not valid JSON");
  const auto j = nlohmann::json::parse(json_text);
  ExperimentSpec spec;
  spec.kind = j.value("kind", spec.kind);
  spec.n = j.value("n", spec.n);
  spec.m = j.value("m", spec.m);
  spec.betas = j.value("betas", spec.betas);
  if (j.contains("bases")) {
    spec.bases.clear();
    for (const auto& b : j.at("bases")) spec.bases.push_back(basis_from_name(b));
  }
  spec.seed = j.value("seed", spec.seed);
  spec.profile = j.value("profile", spec.profile);
  if (j.contains("split_ratios")) {
    const auto r = j.at("split_ratios").get<std::vector<double>>();
    if (r.size() != 3) throw std::invalid_argument("split_ratios must have 3 entries");
    spec.split_ratios = {r[0], r[1], r[2]};
  }
  spec.train = config_for_profile(spec.profile);
  spec.train.seed = spec.seed;
  if (j.contains("train")) merge_train_json(spec.train, j.at("train"));
  spec.output_dir = j.value("output_dir", spec.output_dir);
  return spec;
}

std::string experiment_spec_to_json(const ExperimentSpec& spec) {
  nlohmann::json j;
  j["kind"] = spec.kind;
  j["n"] = spec.n;
  j["m"] = spec.m;
  j["betas"] = spec.betas;
  std::vector<std::string> bases;
  for (Basis b : spec.bases) bases.push_back(basis_name(b));
  j["bases"] = bases;
  j["seed"] = spec.seed;
  j["profile"] = spec.profile;
  j["split_ratios"] = spec.split_ratios;
  j["train"] = train_to_json(spec.train);
  j["output_dir"] = spec.output_dir;
  return j.dump(2);
}

ExperimentReport run_basis_sweep(const ExperimentSpec& spec) {
  if (spec.kind != "basis_sweep")
    throw std::invalid_argument("run_basis_sweep: spec.kind must be basis_sweep");
  prepare_output_dir(spec);
  ExperimentReport rep;
  rep.spec = spec;
  rep.files.push_back("effective_config.json");

  GueEnsemble ens = GueEnsemble::generate(spec.n, spec.m, spec.seed);
  for (Basis basis : spec.bases) {
    Dataset ds = make_dataset(ens, spec.betas, basis, TargetKind::ComplexityOverN,
                              spec.split_ratios, spec.seed);
    const std::string base = basis_name(basis);
    rep.runs.push_back(
        train_and_eval(ds, spec, nn::Arch::CNN, base + "_cnn", spec.output_dir, rep.files)
            .metrics);
    if (basis == Basis::PseudoRandom)
      rep.runs.push_back(
          train_and_eval(ds, spec, nn::Arch::FCN, base + "_fcn", spec.output_dir, rep.files)
              .metrics);
  }
  write_report(rep);
  rep.files.push_back("report.json");
  return rep;
}

ExperimentReport run_beta_sweep(const ExperimentSpec& spec) {
  if (spec.kind != "beta_sweep")
    throw std::invalid_argument("run_beta_sweep: spec.kind must be beta_sweep");
  if (spec.betas.size() < 2 || spec.betas.size() > 3)
    throw std::invalid_argument("run_beta_sweep: need 2 or 3 betas");
  prepare_output_dir(spec);
  ExperimentReport rep;
  rep.spec = spec;
  rep.files.push_back("effective_config.json");

  GueEnsemble ens = GueEnsemble::generate(spec.n, spec.m, spec.seed);
  // energy basis throughout; it carried the best single-beta benchmarks
  Dataset mixed = make_dataset(ens, spec.betas, Basis::Energy, TargetKind::ComplexityOverN,
                               spec.split_ratios, spec.seed);
  RunOutput mixed_run =
      train_and_eval(mixed, spec, nn::Arch::CNN, "mixed_beta", spec.output_dir, rep.files);
  rep.runs.push_back(mixed_run.metrics);

  // per-beta breakdown of the mixed model on the test split
  const auto test_idx = mixed.split_indices(Split::Test);
  const auto preds = predict_split(mixed_run.net, mixed, Split::Test);
  const int plateau_lo = 2 * mixed.n;

  for (std::size_t bi = 0; bi < spec.betas.size(); ++bi) {
    BetaMetrics bm;
    bm.beta = spec.betas[bi];
    // dataset betas are stored sorted; map back to this spec entry
    const int ds_bi = static_cast<int>(
        std::find(mixed.betas.begin(), mixed.betas.end(), bm.beta) - mixed.betas.begin());
    double acc = 0.0, plat_p = 0.0, plat_t = 0.0;
    std::size_t count = 0, plat_count = 0;
    for (std::size_t i = 0; i < test_idx.size(); ++i) {
      const std::size_t r = test_idx[i];
      if (mixed.record_beta_index(r) != ds_bi) continue;
      const double e = static_cast<double>(preds[i]) - mixed.targets[r];
      acc += e * e;
      ++count;
      if (mixed.record_time(r) >= plateau_lo) {
        plat_p += preds[i];
        plat_t += mixed.targets[r];
        ++plat_count;
      }
    }
    bm.delta_mixed = std::sqrt(acc / static_cast<double>(count));
    bm.plateau_pred = plat_p / static_cast<double>(plat_count);
    bm.plateau_truth = plat_t / static_cast<double>(plat_count);

    Dataset single = make_dataset(ens, {spec.betas[bi]}, Basis::Energy,
                                  TargetKind::ComplexityOverN, spec.split_ratios, spec.seed);
    const std::string name = "single_beta" + std::to_string(bi);
    RunOutput single_run =
        train_and_eval(single, spec, nn::Arch::CNN, name, spec.output_dir, rep.files);
    rep.runs.push_back(single_run.metrics);
    bm.delta_single = single_run.metrics.delta;
    rep.beta_metrics.push_back(bm);
  }
  write_report(rep);
  rep.files.push_back("report.json");
  return rep;
}

ExperimentReport run_time_target(const ExperimentSpec& spec) {
  if (spec.kind != "time_target")
    throw std::invalid_argument("run_time_target: spec.kind must be time_target");
  prepare_output_dir(spec);
  ExperimentReport rep;
  rep.spec = spec;
  rep.files.push_back("effective_config.json");

  GueEnsemble ens = GueEnsemble::generate(spec.n, spec.m, spec.seed);
  const Basis basis = spec.bases.empty() ? Basis::Krylov : spec.bases.front();
  Dataset ds = make_dataset(ens, spec.betas, basis, TargetKind::TimeOverN, spec.split_ratios,
                            spec.seed);
  RunOutput run = train_and_eval(ds, spec, nn::Arch::CNN, basis_name(basis) + "_time",
                                 spec.output_dir, rep.files);
  rep.runs.push_back(run.metrics);

  WindowMetrics wm{0.0, 0.0};
  int early_n = 0, late_n = 0;
  for (int t = 0; t < ds.t; ++t) {
    const double tn = static_cast<double>(t) / ds.n;
    if (tn < 0.5) {
      wm.early_rmse += run.eval.per_time_rmse[t];
      ++early_n;
    } else if (tn > 1.5) {
      wm.late_rmse += run.eval.per_time_rmse[t];
      ++late_n;
    }
  }
  wm.early_rmse /= early_n;
  wm.late_rmse /= late_n;
  rep.window = wm;

  // Per-record scatter of the test split (inset-style data).
  const auto test_idx = ds.split_indices(Split::Test);
  const auto preds = predict_split(run.net, ds, Split::Test);
  std::ofstream scatter(spec.output_dir + "/time_scatter.csv", std::ios::trunc);
  scatter << "sample_id,truth_n_over_N,pred_n_over_N\n";
  scatter.precision(10);
  for (std::size_t i = 0; i < test_idx.size(); ++i)
    scatter << ds.record_sample(test_idx[i]) << ',' << ds.targets[test_idx[i]] << ','
            << preds[i] << '\n';
  rep.files.push_back("time_scatter.csv");

  write_report(rep);
  rep.files.push_back("report.json");
  return rep;
}

ExperimentReport run_experiment(const ExperimentSpec& spec) {
  if (spec.kind == "basis_sweep") return run_basis_sweep(spec);
  if (spec.kind == "beta_sweep") return run_beta_sweep(spec);
  if (spec.kind == "time_target") return run_time_target(spec);
  throw std::invalid_argument("unknown experiment kind '" + spec.kind +
                              "' (basis_sweep|beta_sweep|time_target)");
}

}  // namespace krylovlab
