// krylov_lab: GUE spread-complexity laboratory CLI.
//   gen         sample a GUE ensemble and persist it
//   complexity  trajectories, complexity curves, datasets, amplitude grids
//   train       fit the CNN/FCN regressor on a dataset
//   eval        RMSE report for a trained model
//   experiment  run a JSON-specified experiment pipeline

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "krylovlab/errors.hpp"
#include "krylovlab/experiments.hpp"
#include "krylovlab/kcx.hpp"
#include "krylovlab/svg.hpp"

namespace kl = krylovlab;

namespace {

void apply_threads(int threads) {
  if (threads <= 0) {
    if (const char* env = std::getenv("KRYLOV_LAB_THREADS")) threads = std::atoi(env);
  }
#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
#else
  (void)threads;
#endif
}

int cmd_gen(int n, int samples, std::uint64_t seed, const std::string& out) {
  kl::GueEnsemble ens = kl::GueEnsemble::generate(n, samples, seed);
  kl::kcx::write_ensemble(out, ens);
  double lo = ens.samples.front().ensure_eig().eigenvalues.minCoeff();
  double hi = ens.samples.front().eig->eigenvalues.maxCoeff();
  for (auto& s : ens.samples) {
    lo = std::min(lo, s.ensure_eig().eigenvalues.minCoeff());
    hi = std::max(hi, s.eig->eigenvalues.maxCoeff());
  }
  std::cout << "wrote " << out << ": n=" << n << " samples=" << samples << " seed=" << seed
            << "\neigenvalue range [" << lo << ", " << hi << "]\n";
  return 0;
}

struct ComplexityArgs {
  std::string ensemble_path;
  std::vector<double> betas{0.0};
  std::string basis = "energy";
  std::string target = "complexity_over_N";
  std::string out_csv, out_curves, out_dataset, out_svg;
  std::string amplitude_csv, amplitude_svg;
  int amplitude_sample = 0;
  std::vector<double> ratios{0.8, 0.1, 0.1};
};

int cmd_complexity(const ComplexityArgs& args) {
  kl::GueEnsemble ens = kl::kcx::read_ensemble(args.ensemble_path);
  const kl::Basis basis = kl::basis_from_name(args.basis);
  kl::TrajectorySet set = kl::compute_trajectories(ens, args.betas, basis);

  if (!args.out_curves.empty()) {
    kl::write_curves_csv(args.out_curves, set);
    std::cout << "wrote " << args.out_curves << '\n';
  }
  if (!args.out_csv.empty()) {
    for (std::size_t bi = 0; bi < args.betas.size(); ++bi) {
      std::string path = args.out_csv;
      if (args.betas.size() > 1) {
        const auto dot = path.rfind('.');
        std::ostringstream tag;
        tag << "_beta" << args.betas[bi];
        path = dot == std::string::npos ? path + tag.str()
                                        : path.substr(0, dot) + tag.str() + path.substr(dot);
      }
      kl::write_mean_curve_csv(path, set, args.betas[bi]);
      std::cout << "wrote " << path << '\n';
    }
  }
  if (!args.out_svg.empty()) {
    kl::svg::LinePlot plot;
    plot.title = "ensemble mean spread complexity";
    plot.xlabel = "t/N";
    plot.ylabel = "C(t)/N";
    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c"};
    for (std::size_t bi = 0; bi < args.betas.size(); ++bi) {
      kl::svg::Series s;
      std::ostringstream label;
      label << "beta=" << args.betas[bi];
      s.label = label.str();
      s.color = colors[bi % 3];
      const auto& times = set.curves.front().times;
      const double n = ens.n;
      std::vector<double> mean(times.size(), 0.0), var(times.size(), 0.0);
      std::size_t count = 0;
      for (std::size_t k = 0; k < set.curves.size(); ++k) {
        if (set.trajectories[k].beta != args.betas[bi]) continue;
        ++count;
        for (std::size_t i = 0; i < times.size(); ++i) mean[i] += set.curves[k].values[i] / n;
      }
      for (auto& v : mean) v /= static_cast<double>(count);
      for (std::size_t k = 0; k < set.curves.size(); ++k) {
        if (set.trajectories[k].beta != args.betas[bi]) continue;
        for (std::size_t i = 0; i < times.size(); ++i) {
          const double d = set.curves[k].values[i] / n - mean[i];
          var[i] += d * d;
        }
      }
      for (std::size_t i = 0; i < times.size(); ++i) {
        s.x.push_back(times[i] / n);
        s.y.push_back(mean[i]);
        s.yerr.push_back(std::sqrt(var[i] / static_cast<double>(count)));
      }
      plot.series.push_back(std::move(s));
    }
    kl::svg::write_line_plot(args.out_svg, plot);
    std::cout << "wrote " << args.out_svg << '\n';
  }
  if (!args.amplitude_csv.empty() || !args.amplitude_svg.empty()) {
    const kl::StateTrajectory* traj = nullptr;
    for (const auto& tr : set.trajectories)
      if (tr.sample_id == args.amplitude_sample && tr.beta == args.betas.front()) traj = &tr;
    if (!traj) throw std::invalid_argument("amplitude grid: sample id not in ensemble");
    const Eigen::MatrixXd grid = kl::amplitude_grid(*traj);
    if (!args.amplitude_csv.empty()) {
      std::ofstream out(args.amplitude_csv, std::ios::trunc);
      out << "n,t,value\n";
      for (Eigen::Index i = 0; i < grid.rows(); ++i)
        for (Eigen::Index t = 0; t < grid.cols(); ++t)
          out << i << ',' << t << ',' << grid(i, t) << '\n';
      std::cout << "wrote " << args.amplitude_csv << '\n';
    }
    if (!args.amplitude_svg.empty()) {
      kl::svg::write_heatmap(args.amplitude_svg, grid,
                             "|Re + Im| amplitudes, " + args.basis + " basis", "t", "n");
      std::cout << "wrote " << args.amplitude_svg << '\n';
    }
  }
  if (!args.out_dataset.empty()) {
    if (args.ratios.size() != 3) throw std::invalid_argument("--split-ratios needs 3 values");
    kl::Dataset ds = kl::build_dataset(set.trajectories, set.curves,
                                       kl::target_kind_from_name(args.target));
    ds.seed = ens.seed;
    kl::Rng split_rng = kl::Rng::substream(ens.seed, 0x53504C49);
    kl::split_by_sample(ds, {args.ratios[0], args.ratios[1], args.ratios[2]}, split_rng);
    kl::write_dataset(args.out_dataset, ds);
    std::cout << "wrote " << args.out_dataset << ": " << ds.record_count() << " records\n";
  }
  return 0;
}

struct TrainArgs {
  std::string dataset_path;
  std::string arch = "cnn";
  std::string profile = "paper";
  kl::TrainConfig cfg;
  std::string out_model, out_history;
};

int cmd_train(TrainArgs& args) {
  if (args.profile == "desk") {
    kl::TrainConfig desk = kl::desk_profile();
    desk.batch_size = args.cfg.batch_size;
    desk.epochs = args.cfg.epochs == 100 ? desk.epochs : args.cfg.epochs;
    desk.learning_rate = args.cfg.learning_rate;
    desk.seed = args.cfg.seed;
    desk.kernel = args.cfg.kernel;
    args.cfg = desk;
  } else if (args.profile != "paper") {
    throw std::invalid_argument("--profile must be desk or paper");
  }
  kl::Dataset ds = kl::read_dataset(args.dataset_path);
  const kl::nn::Arch arch = args.arch == "fcn" ? kl::nn::Arch::FCN : kl::nn::Arch::CNN;
  if (args.arch != "cnn" && args.arch != "fcn")
    throw std::invalid_argument("--arch must be cnn or fcn");

  kl::nn::Network<float> net = kl::nn::make_network<float>(kl::spec_for(args.cfg, arch, ds.n));
  kl::Rng init_rng = kl::Rng::substream(args.cfg.seed, 1);
  kl::nn::glorot_init(net, init_rng);
  kl::History hist = kl::train(net, ds, args.cfg);
  std::cout << "trained " << args.arch << " for " << args.cfg.epochs
            << " epochs: final train loss " << hist.back().train_loss << ", val loss "
            << hist.back().val_loss << '\n';
  if (!args.out_model.empty()) {
    kl::nn::save_checkpoint(args.out_model, net);
    std::cout << "wrote " << args.out_model << '\n';
  }
  if (!args.out_history.empty()) {
    kl::write_history_csv(args.out_history, hist);
    std::cout << "wrote " << args.out_history << '\n';
  }
  return 0;
}

int cmd_eval(const std::string& model_path, const std::string& dataset_path,
             const std::string& split_name, const std::string& out_dir) {
  kl::nn::Network<float> net = kl::nn::load_checkpoint(model_path);
  kl::Dataset ds = kl::read_dataset(dataset_path);
  if (net.spec.input_n != ds.n)
    throw kl::FormatError("model input dimension " + std::to_string(net.spec.input_n) +
                              " does not match dataset n=" + std::to_string(ds.n),
                          0);
  kl::Split split = kl::Split::Test;
  if (split_name == "train") split = kl::Split::Train;
  else if (split_name == "val") split = kl::Split::Val;
  else if (split_name != "test") throw std::invalid_argument("--split must be train|val|test");

  const kl::EvalReport rep = kl::evaluate_rmse(net, ds, split);
  const double baseline = kl::mean_predictor_rmse(ds, split, kl::Split::Train);
  std::filesystem::create_directories(out_dir);

  nlohmann::json j = {{"model", model_path},         {"dataset", dataset_path},
                      {"split", split_name},         {"delta", rep.rmse},
                      {"time_avg_delta", rep.time_avg_rmse}, {"baseline_delta", baseline}};
  std::ofstream(out_dir + "/metrics.json") << j.dump(2) << '\n';

  std::ofstream csv(out_dir + "/per_time_rmse.csv", std::ios::trunc);
  csv << "t_over_N,mean_pred,mean_truth,rmse\n";
  csv.precision(10);
  for (int t = 0; t < ds.t; ++t)
    csv << static_cast<double>(t) / ds.n << ',' << rep.per_time_mean_pred[t] << ','
        << rep.per_time_mean_truth[t] << ',' << rep.per_time_rmse[t] << '\n';

  kl::svg::LinePlot plot;
  plot.title = "prediction vs truth (" + split_name + ")";
  plot.xlabel = "t/N";
  plot.ylabel = ds.target_kind == kl::TargetKind::ComplexityOverN ? "C(t)/N" : "n/N";
  kl::svg::Series truth{"truth", {}, {}, {}, "#333333", false};
  kl::svg::Series pred{"predicted", {}, {}, {}, "#d62728", false};
  for (int t = 0; t < ds.t; ++t) {
    const double x = static_cast<double>(t) / ds.n;
    truth.x.push_back(x);
    truth.y.push_back(rep.per_time_mean_truth[t]);
    pred.x.push_back(x);
    pred.y.push_back(rep.per_time_mean_pred[t]);
    pred.yerr.push_back(rep.per_time_rmse[t]);
  }
  plot.series = {truth, pred};
  kl::svg::write_line_plot(out_dir + "/pred_vs_truth.svg", plot);

  std::ofstream cfg(out_dir + "/effective_config.json");
  cfg << j.dump(2) << '\n';

  std::cout << "delta=" << rep.rmse << " time_avg_delta=" << rep.time_avg_rmse
            << " baseline_delta=" << baseline << "\nwrote " << out_dir << "/\n";
  return 0;
}

int cmd_experiment(const std::string& spec_path, const std::string& output_dir_override,
                   std::int64_t seed_override) {
  std::ifstream in(spec_path);
  if (!in) throw std::invalid_argument("cannot open experiment spec '" + spec_path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  kl::ExperimentSpec spec = kl::experiment_spec_from_json(buf.str());
  if (!output_dir_override.empty()) spec.output_dir = output_dir_override;
  if (seed_override >= 0) {
    spec.seed = static_cast<std::uint64_t>(seed_override);
    spec.train.seed = spec.seed;
  }
  kl::ExperimentReport rep = kl::run_experiment(spec);
  for (const auto& r : rep.runs)
    std::cout << r.name << ": delta=" << r.delta << " baseline=" << r.baseline_delta << '\n';
  std::cout << "report: " << spec.output_dir << "/report.json\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Krylov spread-complexity laboratory"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "worker threads (default: all; env KRYLOV_LAB_THREADS)");

  // gen
  auto* gen = app.add_subcommand("gen", "sample a GUE ensemble into a KCX file");
  int gen_n = 0, gen_samples = 0;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  gen->add_option("--n", gen_n, "matrix dimension")->required()->check(CLI::Range(2, 1 << 20));
  gen->add_option("--samples", gen_samples, "sample count")->required()->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_seed, "root seed");
  gen->add_option("--out", gen_out, "output KCX path")->required();

  // complexity
  auto* cpx = app.add_subcommand("complexity", "trajectories, curves and datasets");
  ComplexityArgs ca;
  cpx->add_option("--ensemble", ca.ensemble_path, "input ensemble KCX")->required();
  cpx->add_option("--beta", ca.betas, "inverse temperature(s)")->expected(-1);
  cpx->add_option("--basis", ca.basis, "energy|krylov|original|pseudorandom");
  cpx->add_option("--target", ca.target, "complexity_over_N|time_over_N");
  cpx->add_option("--out-csv", ca.out_csv, "ensemble mean/std curve CSV");
  cpx->add_option("--out-curves", ca.out_curves, "per-sample curve CSV");
  cpx->add_option("--out-dataset", ca.out_dataset, "dataset KCX output");
  cpx->add_option("--out-svg", ca.out_svg, "mean curve SVG");
  cpx->add_option("--amplitude-csv", ca.amplitude_csv, "amplitude grid CSV (n,t,value)");
  cpx->add_option("--amplitude-svg", ca.amplitude_svg, "amplitude grid heatmap SVG");
  cpx->add_option("--amplitude-sample", ca.amplitude_sample, "sample id for the grid");
  cpx->add_option("--split-ratios", ca.ratios, "train/val/test ratios")->expected(3);

  // train
  auto* tr = app.add_subcommand("train", "train the regressor on a dataset");
  TrainArgs ta;
  tr->add_option("--dataset", ta.dataset_path, "dataset KCX")->required();
  tr->add_option("--arch", ta.arch, "cnn|fcn");
  tr->add_option("--profile", ta.profile, "desk|paper architecture profile");
  tr->add_option("--kernel", ta.cfg.kernel, "conv kernel size");
  tr->add_option("--epochs", ta.cfg.epochs, "training epochs");
  tr->add_option("--batch", ta.cfg.batch_size, "minibatch size");
  tr->add_option("--lr", ta.cfg.learning_rate, "Adam learning rate");
  tr->add_option("--seed", ta.cfg.seed, "init/shuffle seed");
  tr->add_option("--out-model", ta.out_model, "checkpoint output (KNN1)");
  tr->add_option("--out-history", ta.out_history, "history CSV output");

  // eval
  auto* ev = app.add_subcommand("eval", "evaluate a checkpoint on a dataset split");
  std::string ev_model, ev_dataset, ev_split = "test", ev_out = "eval_out";
  ev->add_option("--model", ev_model, "KNN1 checkpoint")->required();
  ev->add_option("--dataset", ev_dataset, "dataset KCX")->required();
  ev->add_option("--split", ev_split, "train|val|test");
  ev->add_option("--out", ev_out, "output directory")->required();

  // experiment
  auto* ex = app.add_subcommand("experiment", "run a JSON experiment spec");
  std::string ex_spec, ex_outdir;
  std::int64_t ex_seed = -1;
  ex->add_option("--spec", ex_spec, "experiment spec JSON")->required();
  ex->add_option("--output-dir", ex_outdir, "override output directory");
  ex->add_option("--seed", ex_seed, "override root seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    apply_threads(threads);
    if (gen->parsed()) return cmd_gen(gen_n, gen_samples, gen_seed, gen_out);
    if (cpx->parsed()) return cmd_complexity(ca);
    if (tr->parsed()) return cmd_train(ta);
    if (ev->parsed()) return cmd_eval(ev_model, ev_dataset, ev_split, ev_out);
    if (ex->parsed()) return cmd_experiment(ex_spec, ex_outdir, ex_seed);
  } catch (const kl::FormatError& e) {
    std::cerr << "format error: " << e.what() << '\n';
    return 2;
  } catch (const kl::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
