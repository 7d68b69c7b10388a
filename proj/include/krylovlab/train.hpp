#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "krylovlab/dataset.hpp"
#include "krylovlab/nn.hpp"

namespace krylovlab {

struct TrainConfig {
  int batch_size = 32;
  int epochs = 100;
  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::uint64_t seed = 0;
  int kernel = 5;
  std::vector<int> conv_channels = {256, 512, 1024};
  std::vector<int> dense_nodes = {256, 128};
  std::vector<int> fcn_nodes = {1024, 512, 256, 128};

  nn::AdamConfig adam() const {
    return {learning_rate, adam_beta1, adam_beta2, adam_epsilon};
  }
};

// Reduced widths and epochs for laptop-scale runs; the paper-scale defaults
// above stay available behind a flag.
TrainConfig desk_profile(TrainConfig base = {});

nn::NetworkSpec spec_for(const TrainConfig& cfg, nn::Arch arch, int input_n);

struct EpochStats {
  int epoch;  // 1-based
  double train_loss;
  double val_loss;
  double wall_seconds;
};
using History = std::vector<EpochStats>;

void write_history_csv(const std::string& path, const History& history);

// Seeded-shuffle minibatch SGD with Adam; the final ragged batch is kept.
// train_loss is the epoch mean of batch losses, val_loss the full-set MSE
// of the validation split after the epoch. Throws TrainingDiverged when a
// batch loss goes non-finite.
History train(nn::Network<float>& net, const Dataset& dataset, const TrainConfig& cfg);

// Predictions for every record of a split, in split-index order.
std::vector<float> predict_split(const nn::Network<float>& net, const Dataset& dataset,
                                 Split split);

struct EvalReport {
  double rmse = 0.0;             // overall Delta over the split
  double time_avg_rmse = 0.0;    // <Delta>: mean of the per-time-bin RMSEs
  std::vector<double> per_time_rmse;   // indexed by grid time
  std::vector<double> per_time_mean_pred;
  std::vector<double> per_time_mean_truth;
};

EvalReport evaluate_rmse(const nn::Network<float>& net, const Dataset& dataset, Split split);

// RMSE on eval_split of the constant predictor equal to the mean target of
// mean_split. With mean_split == eval_split this is exactly the target
// standard deviation.
double mean_predictor_rmse(const Dataset& dataset, Split eval_split, Split mean_split);

}  // namespace krylovlab
