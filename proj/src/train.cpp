#include "krylovlab/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "krylovlab/errors.hpp"

namespace krylovlab {

namespace {

int max_thread_slots() {
#ifdef _OPENMP
  return std::max(1, omp_get_max_threads());
#else
  return 1;
#endif
}

int thread_slot() {
#ifdef _OPENMP
  return omp_get_thread_num();
#else
  return 0;
#endif
}

}  // namespace

TrainConfig desk_profile(TrainConfig base) {
  base.epochs = 30;
  base.conv_channels = {16, 32, 64};
  base.dense_nodes = {64, 32};
  base.fcn_nodes = {256, 128, 64, 32};
  return base;
}

nn::NetworkSpec spec_for(const TrainConfig& cfg, nn::Arch arch, int input_n) {
  return arch == nn::Arch::CNN
             ? nn::cnn_spec(input_n, cfg.conv_channels, cfg.kernel, cfg.dense_nodes)
             : nn::fcn_spec(input_n, cfg.fcn_nodes);
}

void write_history_csv(const std::string& path, const History& history) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError("cannot open '" + path + "' for writing", 0);
  out << "epoch,train_loss,val_loss,wall_seconds\n";
  out.precision(10);
  for (const auto& e : history)
    out << e.epoch << ',' << e.train_loss << ',' << e.val_loss << ',' << e.wall_seconds << '\n';
}

namespace {

// Records are processed in fixed chunks; each chunk member gets its own
// gradient buffer and the buffers are reduced in record order, so results do
// not depend on the thread count.
constexpr int kChunk = 8;

struct BatchScratch {
  std::vector<nn::Workspace<float>> ws;
  std::vector<std::vector<float>> grads;
  std::vector<double> losses;
};

double run_batch(nn::Network<float>& net, const Dataset& ds,
                 const std::vector<std::size_t>& order, std::size_t begin, std::size_t end,
                 std::vector<float>& grad, BatchScratch& scratch) {
  std::fill(grad.begin(), grad.end(), 0.0f);
  const auto batch_n = static_cast<float>(end - begin);
  double loss_acc = 0.0;
  for (std::size_t base = begin; base < end; base += kChunk) {
    const int count = static_cast<int>(std::min<std::size_t>(kChunk, end - base));
#pragma omp parallel for schedule(static)
    for (int c = 0; c < count; ++c) {
      const std::size_t r = order[base + c];
      auto& g = scratch.grads[c];
      std::fill(g.begin(), g.end(), 0.0f);
      const float pred = nn::forward(net, ds.record(r), scratch.ws[c]);
      const float err = pred - ds.targets[r];
      scratch.losses[c] = static_cast<double>(err) * err;
      nn::backward(net, scratch.ws[c], 2.0f * err / batch_n, std::span<float>(g));
    }
    for (int c = 0; c < count; ++c) {
      loss_acc += scratch.losses[c];
      const auto& g = scratch.grads[c];
      for (std::size_t i = 0; i < grad.size(); ++i) grad[i] += g[i];
    }
  }
  return loss_acc / batch_n;
}

double full_split_loss(const nn::Network<float>& net, const Dataset& ds,
                       const std::vector<std::size_t>& idx,
                       std::vector<nn::Workspace<float>>& ws_pool) {
  std::vector<double> partial(idx.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(idx.size()); ++i) {
    auto& ws = ws_pool[static_cast<std::size_t>(thread_slot()) % ws_pool.size()];
    const float pred = nn::forward(net, ds.record(idx[static_cast<std::size_t>(i)]), ws);
    const double e = static_cast<double>(pred) - ds.targets[idx[static_cast<std::size_t>(i)]];
    partial[static_cast<std::size_t>(i)] = e * e;
  }
  double acc = 0.0;
  for (double p : partial) acc += p;
  return acc / static_cast<double>(idx.size());
}

}  // namespace

History train(nn::Network<float>& net, const Dataset& ds, const TrainConfig& cfg) {
  if (cfg.epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
  if (cfg.batch_size < 1) throw std::invalid_argument("train: batch_size must be >= 1");
  const auto train_idx = ds.split_indices(Split::Train);
  const auto val_idx = ds.split_indices(Split::Val);
  if (train_idx.empty() || val_idx.empty())
    throw std::invalid_argument("train: dataset needs non-empty train and val splits");

  BatchScratch scratch;
  for (int c = 0; c < std::max(kChunk, max_thread_slots()); ++c)
    scratch.ws.push_back(nn::make_workspace(net));
  for (int c = 0; c < kChunk; ++c) scratch.grads.emplace_back(net.n_params, 0.0f);
  scratch.losses.resize(kChunk);
  std::vector<float> grad(net.n_params, 0.0f);

  Rng shuffle_rng(cfg.seed);
  History history;
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<std::size_t> order(train_idx);

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    shuffle_rng.shuffle(order);
    double epoch_loss = 0.0;
    int batches = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), begin + cfg.batch_size);
      const double batch_loss = run_batch(net, ds, order, begin, end, grad, scratch);
      if (!std::isfinite(batch_loss)) throw TrainingDiverged(epoch, batches);
      nn::adam_apply(net, std::span<const float>(grad), cfg.adam());
      epoch_loss += batch_loss;
      ++batches;
    }
    const double val_loss = full_split_loss(net, ds, val_idx, scratch.ws);
    if (!std::isfinite(val_loss)) throw TrainingDiverged(epoch, batches);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    history.push_back({epoch, epoch_loss / batches, val_loss, wall});
  }
  return history;
}

std::vector<float> predict_split(const nn::Network<float>& net, const Dataset& ds, Split split) {
  const auto idx = ds.split_indices(split);
  std::vector<float> preds(idx.size());
  std::vector<nn::Workspace<float>> ws_pool;
  for (int c = 0; c < max_thread_slots(); ++c) ws_pool.push_back(nn::make_workspace(net));
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(idx.size()); ++i) {
    auto& ws = ws_pool[static_cast<std::size_t>(thread_slot()) % ws_pool.size()];
    preds[static_cast<std::size_t>(i)] = nn::forward(net, ds.record(idx[i]), ws);
  }
  return preds;
}

EvalReport evaluate_rmse(const nn::Network<float>& net, const Dataset& ds, Split split) {
  const auto idx = ds.split_indices(split);
  if (idx.empty()) throw std::invalid_argument("evaluate_rmse: empty split");
  const auto preds = predict_split(net, ds, split);

  EvalReport rep;
  rep.per_time_rmse.assign(ds.t, 0.0);
  rep.per_time_mean_pred.assign(ds.t, 0.0);
  rep.per_time_mean_truth.assign(ds.t, 0.0);
  std::vector<std::size_t> bin_count(ds.t, 0);
  double acc = 0.0;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    const double e = static_cast<double>(preds[i]) - ds.targets[idx[i]];
    acc += e * e;
    const int t = ds.record_time(idx[i]);
    rep.per_time_rmse[t] += e * e;
    rep.per_time_mean_pred[t] += preds[i];
    rep.per_time_mean_truth[t] += ds.targets[idx[i]];
    bin_count[t] += 1;
  }
  rep.rmse = std::sqrt(acc / static_cast<double>(idx.size()));
  double bin_acc = 0.0;
  for (int t = 0; t < ds.t; ++t) {
    if (bin_count[t] == 0) continue;
    rep.per_time_rmse[t] = std::sqrt(rep.per_time_rmse[t] / static_cast<double>(bin_count[t]));
    rep.per_time_mean_pred[t] /= static_cast<double>(bin_count[t]);
    rep.per_time_mean_truth[t] /= static_cast<double>(bin_count[t]);
    bin_acc += rep.per_time_rmse[t];
  }
  rep.time_avg_rmse = bin_acc / ds.t;
  return rep;
}

double mean_predictor_rmse(const Dataset& ds, Split eval_split, Split mean_split) {
  const auto mean_idx = ds.split_indices(mean_split);
  const auto eval_idx = ds.split_indices(eval_split);
  if (mean_idx.empty() || eval_idx.empty())
    throw std::invalid_argument("mean_predictor_rmse: empty split");
  double mean = 0.0;
  for (auto r : mean_idx) mean += ds.targets[r];
  mean /= static_cast<double>(mean_idx.size());
  double acc = 0.0;
  for (auto r : eval_idx) {
    const double e = ds.targets[r] - mean;
    acc += e * e;
  }
  return std::sqrt(acc / static_cast<double>(eval_idx.size()));
}

}  // namespace krylovlab
