#include "krylovlab/nn.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "krylovlab/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O writes native byte order and requires a little-endian host");

namespace krylovlab::nn {

NetworkSpec cnn_spec(int input_n, std::vector<int> conv_channels, int kernel,
                     std::vector<int> dense_nodes) {
  NetworkSpec s;
  s.arch = Arch::CNN;
  s.input_n = input_n;
  s.conv_channels = std::move(conv_channels);
  s.kernel = kernel;
  s.dense_nodes = std::move(dense_nodes);
  return s;
}

NetworkSpec fcn_spec(int input_n, std::vector<int> hidden_nodes) {
  NetworkSpec s;
  s.arch = Arch::FCN;
  s.input_n = input_n;
  s.dense_nodes = std::move(hidden_nodes);
  return s;
}

template <class T>
Network<T> make_network(const NetworkSpec& spec) {
  if (spec.input_n < 1) throw std::invalid_argument("make_network: input_n must be >= 1");
  Network<T> net;
  net.spec = spec;
  std::size_t off = 0;

  int dense_in;
  if (spec.arch == Arch::CNN) {
    if (spec.kernel < 1) throw std::invalid_argument("make_network: kernel must be >= 1");
    int c_in = spec.in_channels;
    int l = spec.input_n;
    for (int c_out : spec.conv_channels) {
      const int l_out = l - spec.kernel + 1;
      if (l_out < 1)
        throw std::invalid_argument("make_network: feature length shrinks below 1");
      typename Network<T>::ConvDesc d{c_in, c_out, spec.kernel, l, l_out, off,
                                      off + static_cast<std::size_t>(c_out) * c_in * spec.kernel};
      off = d.b + static_cast<std::size_t>(c_out);
      net.convs.push_back(d);
      c_in = c_out;
      l = l_out;
    }
    dense_in = c_in;  // global average pool output
  } else {
    dense_in = spec.in_channels * spec.input_n;
  }

  auto add_dense = [&](int in, int out, bool relu_act) {
    typename Network<T>::DenseDesc d{in, out, relu_act, off,
                                     off + static_cast<std::size_t>(out) * in};
    off = d.b + static_cast<std::size_t>(out);
    net.dense.push_back(d);
  };
  for (int nodes : spec.dense_nodes) {
    add_dense(dense_in, nodes, true);
    dense_in = nodes;
  }
  add_dense(dense_in, 1, false);  // linear output node

  net.n_params = off;
  net.params.assign(off, T(0));
  net.adam_m.assign(off, T(0));
  net.adam_v.assign(off, T(0));
  return net;
}

std::size_t param_count(const NetworkSpec& spec) {
  return make_network<float>(spec).n_params;
}

template <class T>
void glorot_init(Network<T>& net, Rng& rng) {
  auto fill = [&](std::size_t w_off, std::size_t count, int fan_in, int fan_out,
                  std::size_t b_off, std::size_t b_count) {
    const double bound = std::sqrt(6.0 / (fan_in + fan_out));
    for (std::size_t i = 0; i < count; ++i)
      net.params[w_off + i] = static_cast<T>(rng.uniform(-bound, bound));
    for (std::size_t i = 0; i < b_count; ++i) net.params[b_off + i] = T(0);
  };
  for (const auto& c : net.convs)
    fill(c.w, static_cast<std::size_t>(c.c_out) * c.c_in * c.k, c.c_in * c.k, c.c_out * c.k,
         c.b, static_cast<std::size_t>(c.c_out));
  for (const auto& d : net.dense)
    fill(d.w, static_cast<std::size_t>(d.out) * d.in, d.in, d.out, d.b,
         static_cast<std::size_t>(d.out));
  std::fill(net.adam_m.begin(), net.adam_m.end(), T(0));
  std::fill(net.adam_v.begin(), net.adam_v.end(), T(0));
  net.adam_step = 0;
}

template <class T>
Workspace<T> make_workspace(const Network<T>& net) {
  Workspace<T> ws;
  ws.input.resize(static_cast<std::size_t>(net.spec.in_channels) * net.spec.input_n);
  for (const auto& c : net.convs) {
    ws.conv_pre.emplace_back(static_cast<std::size_t>(c.c_out) * c.l_out);
    ws.conv_act.emplace_back(static_cast<std::size_t>(c.c_out) * c.l_out);
    ws.conv_dx.emplace_back(static_cast<std::size_t>(c.c_in) * c.l_in);
  }
  if (!net.convs.empty()) {
    const auto& last = net.convs.back();
    ws.pooled.resize(static_cast<std::size_t>(last.c_out));
    ws.gap_dx.resize(static_cast<std::size_t>(last.c_out) * last.l_out);
  }
  for (const auto& d : net.dense) {
    ws.dense_pre.emplace_back(static_cast<std::size_t>(d.out));
    ws.dense_act.emplace_back(static_cast<std::size_t>(d.out));
    ws.dense_dx.emplace_back(static_cast<std::size_t>(d.in));
  }
  return ws;
}

namespace {

template <class T>
void conv_forward_into(const typename Network<T>::ConvDesc& c, const T* params, const T* x,
                       T* out) {
  const T* w = params + c.w;
  const T* b = params + c.b;
  for (int i = 0; i < c.c_out; ++i) {
    T* o = out + static_cast<std::size_t>(i) * c.l_out;
    for (int p = 0; p < c.l_out; ++p) o[p] = b[i];
    for (int j = 0; j < c.c_in; ++j) {
      const T* xr = x + static_cast<std::size_t>(j) * c.l_in;
      const T* wr = w + (static_cast<std::size_t>(i) * c.c_in + j) * c.k;
      for (int m = 0; m < c.k; ++m) {
        const T wm = wr[m];
        const T* xs = xr + m;
        for (int p = 0; p < c.l_out; ++p) o[p] += wm * xs[p];
      }
    }
  }
}

template <class T>
void dense_forward_into(const typename Network<T>::DenseDesc& d, const T* params, const T* x,
                        T* pre) {
  const T* w = params + d.w;
  const T* b = params + d.b;
  for (int i = 0; i < d.out; ++i) {
    T acc = b[i];
    const T* wr = w + static_cast<std::size_t>(i) * d.in;
    for (int kk = 0; kk < d.in; ++kk) acc += wr[kk] * x[kk];
    pre[i] = acc;
  }
}

}  // namespace

template <class T>
T forward(const Network<T>& net, std::span<const float> features, Workspace<T>& ws) {
  if (features.size() != ws.input.size())
    throw std::invalid_argument("forward: feature shape mismatch");
  for (std::size_t i = 0; i < features.size(); ++i) ws.input[i] = static_cast<T>(features[i]);

  const T* cur = ws.input.data();
  if (net.spec.arch == Arch::CNN) {
    for (std::size_t l = 0; l < net.convs.size(); ++l) {
      const auto& c = net.convs[l];
      conv_forward_into<T>(c, net.params.data(), cur, ws.conv_pre[l].data());
      for (std::size_t i = 0; i < ws.conv_pre[l].size(); ++i)
        ws.conv_act[l][i] = relu(ws.conv_pre[l][i]);
      cur = ws.conv_act[l].data();
    }
    const auto& last = net.convs.back();
    for (int i = 0; i < last.c_out; ++i) {
      T acc = T(0);
      const T* row = cur + static_cast<std::size_t>(i) * last.l_out;
      for (int p = 0; p < last.l_out; ++p) acc += row[p];
      ws.pooled[i] = acc / static_cast<T>(last.l_out);
    }
    cur = ws.pooled.data();
  }

  for (std::size_t l = 0; l < net.dense.size(); ++l) {
    const auto& d = net.dense[l];
    dense_forward_into<T>(d, net.params.data(), cur, ws.dense_pre[l].data());
    if (d.relu)
      for (int i = 0; i < d.out; ++i) ws.dense_act[l][i] = relu(ws.dense_pre[l][i]);
    else
      for (int i = 0; i < d.out; ++i) ws.dense_act[l][i] = ws.dense_pre[l][i];
    cur = ws.dense_act[l].data();
  }
  return ws.dense_act.back()[0];
}

template <class T>
void backward(const Network<T>& net, Workspace<T>& ws, T dpred, std::span<T> grad) {
  if (grad.size() != net.n_params) throw std::invalid_argument("backward: gradient size mismatch");
  // dense stack, output first
  std::vector<T> delta{dpred};
  for (std::size_t li = net.dense.size(); li-- > 0;) {
    const auto& d = net.dense[li];
    // ReLU subgradient: 0 at pre == 0
    if (d.relu)
      for (int i = 0; i < d.out; ++i)
        if (!(ws.dense_pre[li][i] > T(0))) delta[i] = T(0);
    const T* x = li == 0 ? (net.spec.arch == Arch::CNN ? ws.pooled.data() : ws.input.data())
                         : ws.dense_act[li - 1].data();
    T* dw = grad.data() + d.w;
    T* db = grad.data() + d.b;
    T* dx = ws.dense_dx[li].data();
    for (int kk = 0; kk < d.in; ++kk) dx[kk] = T(0);
    const T* w = net.params.data() + d.w;
    for (int i = 0; i < d.out; ++i) {
      const T di = delta[i];
      db[i] += di;
      const T* wr = w + static_cast<std::size_t>(i) * d.in;
      T* dwr = dw + static_cast<std::size_t>(i) * d.in;
      for (int kk = 0; kk < d.in; ++kk) {
        dwr[kk] += di * x[kk];
        dx[kk] += wr[kk] * di;
      }
    }
    delta.assign(ws.dense_dx[li].begin(), ws.dense_dx[li].end());
  }

  if (net.spec.arch == Arch::FCN) return;

  // global average pool backward onto the last conv output
  const auto& last = net.convs.back();
  for (int i = 0; i < last.c_out; ++i) {
    const T v = delta[i] / static_cast<T>(last.l_out);
    T* row = ws.gap_dx.data() + static_cast<std::size_t>(i) * last.l_out;
    for (int p = 0; p < last.l_out; ++p) row[p] = v;
  }

  for (std::size_t li = net.convs.size(); li-- > 0;) {
    const auto& c = net.convs[li];
    std::vector<T>& dout = li + 1 == net.convs.size() ? ws.gap_dx : ws.conv_dx[li + 1];
    // ReLU mask on this layer's pre-activations
    for (std::size_t i = 0; i < dout.size(); ++i)
      if (!(ws.conv_pre[li][i] > T(0))) dout[i] = T(0);

    const T* x = li == 0 ? ws.input.data() : ws.conv_act[li - 1].data();
    const T* w = net.params.data() + c.w;
    T* dw = grad.data() + c.w;
    T* db = grad.data() + c.b;
    T* dx = ws.conv_dx[li].data();
    for (std::size_t i = 0; i < ws.conv_dx[li].size(); ++i) dx[i] = T(0);

    for (int i = 0; i < c.c_out; ++i) {
      const T* drow = dout.data() + static_cast<std::size_t>(i) * c.l_out;
      T acc_b = T(0);
      for (int p = 0; p < c.l_out; ++p) acc_b += drow[p];
      db[i] += acc_b;
      for (int j = 0; j < c.c_in; ++j) {
        const T* xr = x + static_cast<std::size_t>(j) * c.l_in;
        const T* wr = w + (static_cast<std::size_t>(i) * c.c_in + j) * c.k;
        T* dwr = dw + (static_cast<std::size_t>(i) * c.c_in + j) * c.k;
        T* dxr = dx + static_cast<std::size_t>(j) * c.l_in;
        for (int m = 0; m < c.k; ++m) {
          T acc_w = T(0);
          const T* xs = xr + m;
          T* dxs = dxr + m;
          const T wm = wr[m];
          for (int p = 0; p < c.l_out; ++p) {
            acc_w += drow[p] * xs[p];
            dxs[p] += wm * drow[p];
          }
          dwr[m] += acc_w;
        }
      }
    }
  }
}

template <class T>
void adam_apply(Network<T>& net, std::span<const T> grad, const AdamConfig& cfg) {
  if (grad.size() != net.n_params)
    throw std::invalid_argument("adam_apply: gradient size mismatch");
  net.adam_step += 1;
  const T b1 = static_cast<T>(cfg.beta1), b2 = static_cast<T>(cfg.beta2);
  const T bc1 = static_cast<T>(1.0 - std::pow(cfg.beta1, static_cast<double>(net.adam_step)));
  const T bc2 = static_cast<T>(1.0 - std::pow(cfg.beta2, static_cast<double>(net.adam_step)));
  const T lr = static_cast<T>(cfg.learning_rate);
  const T eps = static_cast<T>(cfg.epsilon);
  for (std::size_t i = 0; i < net.n_params; ++i) {
    const T g = grad[i];
    net.adam_m[i] = b1 * net.adam_m[i] + (T(1) - b1) * g;
    net.adam_v[i] = b2 * net.adam_v[i] + (T(1) - b2) * g * g;
    const T mhat = net.adam_m[i] / bc1;
    const T vhat = net.adam_v[i] / bc2;
    net.params[i] -= lr * mhat / (std::sqrt(vhat) + eps);
  }
}

template <class T>
std::vector<T> conv1d_forward(std::span<const T> w, std::span<const T> b, std::span<const T> x,
                              int c_in, int c_out, int k, int l_in) {
  if (l_in < k) throw std::invalid_argument("conv1d_forward: input shorter than kernel");
  if (w.size() != static_cast<std::size_t>(c_out) * c_in * k ||
      b.size() != static_cast<std::size_t>(c_out) ||
      x.size() != static_cast<std::size_t>(c_in) * l_in)
    throw std::invalid_argument("conv1d_forward: shape mismatch");
  typename Network<T>::ConvDesc d{c_in, c_out, k, l_in, l_in - k + 1, 0,
                                  static_cast<std::size_t>(c_out) * c_in * k};
  std::vector<T> params(w.begin(), w.end());
  params.insert(params.end(), b.begin(), b.end());
  std::vector<T> out(static_cast<std::size_t>(c_out) * d.l_out);
  conv_forward_into<T>(d, params.data(), x.data(), out.data());
  return out;
}

template <class T>
std::vector<T> global_average_pool(std::span<const T> x, int channels, int len) {
  if (len < 1) throw std::invalid_argument("global_average_pool: empty channel");
  if (x.size() != static_cast<std::size_t>(channels) * len)
    throw std::invalid_argument("global_average_pool: shape mismatch");
  std::vector<T> out(channels);
  for (int c = 0; c < channels; ++c) {
    T acc = T(0);
    for (int p = 0; p < len; ++p) acc += x[static_cast<std::size_t>(c) * len + p];
    out[c] = acc / static_cast<T>(len);
  }
  return out;
}

template <class T>
double mse_loss(std::span<const T> predictions, std::span<const T> targets) {
  if (predictions.empty()) throw std::invalid_argument("mse_loss: empty batch");
  if (predictions.size() != targets.size())
    throw std::invalid_argument("mse_loss: length mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double e = static_cast<double>(predictions[i]) - static_cast<double>(targets[i]);
    acc += e * e;
  }
  return acc / static_cast<double>(predictions.size());
}

// checkpoint I/O ------------------------------------------------------------

namespace {
constexpr char kMagic[4] = {'K', 'N', 'N', '1'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

void save_checkpoint(const std::string& path, const Network<float>& net) {
  nlohmann::json spec = {
      {"arch", net.spec.arch == Arch::CNN ? "CNN" : "FCN"},
      {"input_n", net.spec.input_n},
      {"in_channels", net.spec.in_channels},
      {"conv_channels", net.spec.conv_channels},
      {"kernel", net.spec.kernel},
      {"dense", net.spec.dense_nodes},
      {"param_count", net.n_params},
      {"dtype", "f32"},
  };
  const std::string js = spec.dump();
  std::string out;
  out.append(kMagic, 4);
  const std::uint32_t ver = kVersion;
  out.append(reinterpret_cast<const char*>(&ver), sizeof(ver));
  const std::uint64_t hlen = js.size();
  out.append(reinterpret_cast<const char*>(&hlen), sizeof(hlen));
  out.append(js);
  out.append(reinterpret_cast<const char*>(net.params.data()),
             net.params.size() * sizeof(float));

  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw FormatError("cannot open '" + tmp + "' for writing", 0);
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw FormatError("short write to '" + tmp + "'", 0);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw FormatError("rename to '" + path + "' failed: " + ec.message(), 0);
}

Network<float> load_checkpoint(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw FormatError("cannot open '" + path + "'", 0);
  std::vector<char> raw((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  std::size_t pos = 0;
  auto need = [&](std::size_t n, const char* what) {
    if (pos + n > raw.size()) throw FormatError(std::string("truncated ") + what, pos);
  };
  need(4, "magic");
  if (std::memcmp(raw.data(), kMagic, 4) != 0) throw FormatError("bad magic (expected KNN1)", 0);
  pos = 4;
  need(sizeof(std::uint32_t), "version");
  std::uint32_t ver;
  std::memcpy(&ver, raw.data() + pos, sizeof(ver));
  if (ver != kVersion) throw FormatError("unsupported checkpoint version", pos);
  pos += sizeof(ver);
  need(sizeof(std::uint64_t), "header length");
  std::uint64_t hlen;
  std::memcpy(&hlen, raw.data() + pos, sizeof(hlen));
  pos += sizeof(hlen);
  need(static_cast<std::size_t>(hlen), "header");
  const std::string js(raw.data() + pos, static_cast<std::size_t>(hlen));
  pos += static_cast<std::size_t>(hlen);
  if (!nlohmann::json::accept(js)) throw FormatError("checkpoint header is not valid JSON", 12);
  const auto spec_json = nlohmann::json::parse(js);

  NetworkSpec spec;
  spec.arch = spec_json.at("arch").get<std::string>() == "CNN" ? Arch::CNN : Arch::FCN;
  spec.input_n = spec_json.at("input_n").get<int>();
  spec.in_channels = spec_json.at("in_channels").get<int>();
  spec.conv_channels = spec_json.at("conv_channels").get<std::vector<int>>();
  spec.kernel = spec_json.at("kernel").get<int>();
  spec.dense_nodes = spec_json.at("dense").get<std::vector<int>>();

  Network<float> net = make_network<float>(spec);
  if (spec_json.at("param_count").get<std::size_t>() != net.n_params)
    throw FormatError("checkpoint parameter count does not match architecture", pos);
  need(net.n_params * sizeof(float), "parameter payload");
  if (raw.size() - pos != net.n_params * sizeof(float))
    throw FormatError("trailing bytes after parameter payload", pos + net.n_params * sizeof(float));
  std::memcpy(net.params.data(), raw.data() + pos, net.n_params * sizeof(float));
  return net;
}

// explicit instantiations
template struct Network<float>;
template struct Network<double>;
template Network<float> make_network<float>(const NetworkSpec&);
template Network<double> make_network<double>(const NetworkSpec&);
template void glorot_init<float>(Network<float>&, Rng&);
template void glorot_init<double>(Network<double>&, Rng&);
template Workspace<float> make_workspace<float>(const Network<float>&);
template Workspace<double> make_workspace<double>(const Network<double>&);
template float forward<float>(const Network<float>&, std::span<const float>, Workspace<float>&);
template double forward<double>(const Network<double>&, std::span<const float>,
                                Workspace<double>&);
template void backward<float>(const Network<float>&, Workspace<float>&, float,
                              std::span<float>);
template void backward<double>(const Network<double>&, Workspace<double>&, double,
                               std::span<double>);
template void adam_apply<float>(Network<float>&, std::span<const float>, const AdamConfig&);
template void adam_apply<double>(Network<double>&, std::span<const double>, const AdamConfig&);
template std::vector<float> conv1d_forward<float>(std::span<const float>, std::span<const float>,
                                                  std::span<const float>, int, int, int, int);
template std::vector<double> conv1d_forward<double>(std::span<const double>,
                                                    std::span<const double>,
                                                    std::span<const double>, int, int, int, int);
template std::vector<float> global_average_pool<float>(std::span<const float>, int, int);
template std::vector<double> global_average_pool<double>(std::span<const double>, int, int);
template double mse_loss<float>(std::span<const float>, std::span<const float>);
template double mse_loss<double>(std::span<const double>, std::span<const double>);

}  // namespace krylovlab::nn
