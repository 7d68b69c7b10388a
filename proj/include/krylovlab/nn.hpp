#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "krylovlab/rng.hpp"

namespace krylovlab::nn {

enum class Arch { CNN, FCN };

// Architecture description. CNN: valid (no padding, stride 1) convolutions
// with ReLU, global average pool, ReLU dense stack, single linear output.
// FCN: flattened input through a ReLU dense stack to the same output.
struct NetworkSpec {
  Arch arch = Arch::CNN;
  int input_n = 0;      // feature length per channel
  int in_channels = 4;
  std::vector<int> conv_channels;  // CNN only
  int kernel = 5;                  // CNN only
  std::vector<int> dense_nodes;    // hidden dense sizes
};

NetworkSpec cnn_spec(int input_n, std::vector<int> conv_channels, int kernel,
                     std::vector<int> dense_nodes);
NetworkSpec fcn_spec(int input_n, std::vector<int> hidden_nodes);

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Parameters live in one flat vector, layer by layer (weights then bias),
// convolutions first. Adam moments are kept alongside.
template <class T>
struct Network {
  struct ConvDesc {
    int c_in, c_out, k, l_in, l_out;
    std::size_t w, b;  // offsets into params
  };
  struct DenseDesc {
    int in, out;
    bool relu;
    std::size_t w, b;
  };

  NetworkSpec spec;
  std::vector<ConvDesc> convs;
  std::vector<DenseDesc> dense;
  std::size_t n_params = 0;
  std::vector<T> params;
  std::vector<T> adam_m, adam_v;
  std::int64_t adam_step = 0;
};

template <class T>
Network<T> make_network(const NetworkSpec& spec);

// Weights ~ Uniform(+-sqrt(6/(fan_in+fan_out))), biases zero. Conv fans are
// c_in*k and c_out*k. Draw order follows the flat parameter layout.
template <class T>
void glorot_init(Network<T>& net, Rng& rng);

// Per-record activations plus backward scratch; reusable across records.
template <class T>
struct Workspace {
  std::vector<T> input;
  std::vector<std::vector<T>> conv_pre, conv_act, conv_dx;
  std::vector<T> pooled, gap_dx;
  std::vector<std::vector<T>> dense_pre, dense_act, dense_dx;
};

template <class T>
Workspace<T> make_workspace(const Network<T>& net);

// Features are the stored single-precision record layout (4 channels x N,
// channel-major); math runs in T. Throws std::invalid_argument on shape
// mismatch.
template <class T>
T forward(const Network<T>& net, std::span<const float> features, Workspace<T>& ws);

// Accumulates dLoss/dparams into grad given dLoss/dprediction, using the
// activations cached by the preceding forward() on the same workspace.
template <class T>
void backward(const Network<T>& net, Workspace<T>& ws, T dpred, std::span<T> grad);

// Bias-corrected Adam update; increments the step counter.
template <class T>
void adam_apply(Network<T>& net, std::span<const T> grad, const AdamConfig& cfg);

// Standalone pieces (also the building blocks above).
template <class T>
std::vector<T> conv1d_forward(std::span<const T> w, std::span<const T> b,
                              std::span<const T> x, int c_in, int c_out, int k, int l_in);
template <class T>
std::vector<T> global_average_pool(std::span<const T> x, int channels, int len);
template <class T>
T relu(T x) {
  return x > T(0) ? x : T(0);
}
template <class T>
double mse_loss(std::span<const T> predictions, std::span<const T> targets);

std::size_t param_count(const NetworkSpec& spec);

// Checkpoint: magic "KNN1" | u32 version | u64 json length | JSON spec |
// little-endian f32 parameters in flat layout order. Atomic write.
void save_checkpoint(const std::string& path, const Network<float>& net);
Network<float> load_checkpoint(const std::string& path);

}  // namespace krylovlab::nn
