// Python bindings for the main operations: GUE sampling, eigendecomposition,
// Lanczos/Krylov machinery, TFD trajectories, dataset I/O and the regressor.

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "krylovlab/dataset.hpp"
#include "krylovlab/experiments.hpp"
#include "krylovlab/kcx.hpp"
#include "krylovlab/train.hpp"

namespace py = pybind11;
namespace kl = krylovlab;

namespace {

kl::EigenDecomposition eig_from_parts(const Eigen::VectorXd& evals,
                                      const kl::ComplexMatrix& evecs) {
  kl::EigenDecomposition eig;
  eig.eigenvalues = evals;
  eig.eigenvectors = evecs;
  return eig;
}

std::vector<double> grid_from_t(int n, int t_len) {
  std::vector<double> times(t_len);
  for (int i = 0; i < t_len; ++i) times[i] = i;
  return times;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "GUE spread-complexity laboratory (C++ core)";

  py::register_exception<kl::FormatError>(m, "FormatError");
  py::register_exception<kl::NumericalError>(m, "NumericalError");

  py::class_<kl::Rng>(m, "Rng")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def_static("substream", &kl::Rng::substream, py::arg("root_seed"), py::arg("index"))
      .def("next_u64", &kl::Rng::next_u64)
      .def("uniform01", &kl::Rng::uniform01)
      .def("gaussian", &kl::Rng::gaussian, py::arg("mean"), py::arg("stddev"));

  m.def(
      "sample_gue",
      [](int n, std::uint64_t seed) {
        kl::Rng rng(seed);
        return kl::sample_gue(n, rng).h;
      },
      py::arg("n"), py::arg("seed"), "One GUE draw H = (M + M^dagger)/2, Var = 1/n entries");

  m.def(
      "gue_ensemble",
      [](int n, int m, std::uint64_t seed) {
        kl::GueEnsemble ens = kl::GueEnsemble::generate(n, m, seed, false);
        std::vector<kl::ComplexMatrix> out;
        out.reserve(ens.samples.size());
        for (auto& s : ens.samples) out.push_back(std::move(s.h));
        return out;
      },
      py::arg("n"), py::arg("m"), py::arg("seed"));

  m.def(
      "eigh",
      [](const kl::ComplexMatrix& h) {
        kl::EigenDecomposition eig = kl::hermitian_eigh(h);
        return py::make_tuple(eig.eigenvalues, eig.eigenvectors);
      },
      py::arg("h"), "Phase-fixed Hermitian eigendecomposition (ascending eigenvalues)");

  m.def(
      "haar_unitary",
      [](int n, std::uint64_t seed) {
        kl::Rng rng(seed);
        return kl::haar_unitary(n, rng);
      },
      py::arg("n"), py::arg("seed"));

  m.def(
      "tfd_state",
      [](const Eigen::VectorXd& evals, double beta) {
        return kl::tfd_state(eig_from_parts(evals, kl::ComplexMatrix()), beta);
      },
      py::arg("eigenvalues"), py::arg("beta"));

  m.def(
      "lanczos",
      [](const kl::ComplexMatrix& h, const kl::ComplexVector& psi0, double tol) {
        kl::KrylovData kd = kl::lanczos_tridiagonalize(h, psi0, tol);
        return py::make_tuple(kd.a, kd.b, kd.basis);
      },
      py::arg("h"), py::arg("psi0"), py::arg("tol_breakdown") = 1e-10,
      "Lanczos coefficients (a, b) and the orthonormal Krylov basis");

  m.def(
      "evolve_eigenbasis",
      [](const kl::ComplexVector& psi0, const Eigen::VectorXd& evals, int t_len) {
        return kl::evolve_eigenbasis(psi0, eig_from_parts(evals, kl::ComplexMatrix()),
                                     grid_from_t(static_cast<int>(evals.size()), t_len));
      },
      py::arg("psi0"), py::arg("eigenvalues"), py::arg("t_len"));

  m.def(
      "spread_complexity",
      [](const Eigen::MatrixXcd& amps, int normalization) {
        std::vector<double> times(amps.cols());
        for (std::size_t i = 0; i < times.size(); ++i) times[i] = static_cast<double>(i);
        return kl::spread_complexity(amps, times, normalization).values;
      },
      py::arg("krylov_amplitudes"), py::arg("normalization"));

  m.def(
      "complexity_curve",
      [](const Eigen::VectorXd& evals, double beta, int t_len) {
        kl::EigenDecomposition eig = eig_from_parts(evals, kl::ComplexMatrix());
        const kl::ComplexVector psi0 = kl::tfd_state(eig, beta);
        kl::ComplexMatrix h_diag = evals.cast<std::complex<double>>().asDiagonal();
        kl::KrylovData kd = kl::lanczos_tridiagonalize(h_diag, psi0);
        const auto times = grid_from_t(static_cast<int>(evals.size()), t_len);
        const Eigen::MatrixXcd amps = kl::propagate_tridiagonal(kd, times);
        return kl::spread_complexity(amps, times, static_cast<int>(evals.size())).values;
      },
      py::arg("eigenvalues"), py::arg("beta"), py::arg("t_len"),
      "C(t) on the integer grid for a TFD state of the given spectrum");

  m.def(
      "write_ensemble",
      [](const std::string& path, int n, int m, std::uint64_t seed) {
        kl::kcx::write_ensemble(path, kl::GueEnsemble::generate(n, m, seed, false));
      },
      py::arg("path"), py::arg("n"), py::arg("m"), py::arg("seed"));

  m.def(
      "read_ensemble",
      [](const std::string& path) {
        kl::GueEnsemble ens = kl::kcx::read_ensemble(path);
        std::vector<kl::ComplexMatrix> out;
        for (auto& s : ens.samples) out.push_back(std::move(s.h));
        return py::make_tuple(ens.n, ens.seed, out);
      },
      py::arg("path"));

  m.def(
      "build_dataset_file",
      [](const std::string& ensemble_path, const std::string& out_path,
         const std::vector<double>& betas, const std::string& basis, const std::string& target,
         std::array<double, 3> ratios) {
        kl::GueEnsemble ens = kl::kcx::read_ensemble(ensemble_path);
        kl::Dataset ds =
            kl::make_dataset(ens, betas, kl::basis_from_name(basis),
                             kl::target_kind_from_name(target), ratios, ens.seed);
        kl::write_dataset(out_path, ds);
        return ds.record_count();
      },
      py::arg("ensemble_path"), py::arg("out_path"), py::arg("betas") = std::vector<double>{0.0},
      py::arg("basis") = "energy", py::arg("target") = "complexity_over_N",
      py::arg("split_ratios") = std::array<double, 3>{0.8, 0.1, 0.1});

  m.def(
      "read_dataset",
      [](const std::string& path) {
        kl::Dataset ds = kl::read_dataset(path);
        py::dict out;
        out["n"] = ds.n;
        out["t"] = ds.t;
        out["betas"] = ds.betas;
        out["basis"] = kl::basis_name(ds.basis);
        out["target_kind"] = kl::target_kind_name(ds.target_kind);
        const py::ssize_t rec = static_cast<py::ssize_t>(ds.record_count());
        py::array_t<float> feats({rec, static_cast<py::ssize_t>(4),
                                  static_cast<py::ssize_t>(ds.n)});
        std::copy(ds.features.begin(), ds.features.end(), feats.mutable_data());
        out["features"] = feats;
        py::array_t<float> targets(rec);
        std::copy(ds.targets.begin(), ds.targets.end(), targets.mutable_data());
        out["targets"] = targets;
        return out;
      },
      py::arg("path"));

  m.def(
      "conv1d_forward",
      [](py::array_t<float, py::array::c_style | py::array::forcecast> w,
         py::array_t<float, py::array::c_style | py::array::forcecast> b,
         py::array_t<float, py::array::c_style | py::array::forcecast> x) {
        if (w.ndim() != 3 || x.ndim() != 2 || b.ndim() != 1)
          throw std::invalid_argument("expected w (co, ci, k), b (co,), x (ci, l)");
        const int co = static_cast<int>(w.shape(0)), ci = static_cast<int>(w.shape(1)),
                  k = static_cast<int>(w.shape(2)), l = static_cast<int>(x.shape(1));
        auto out = kl::nn::conv1d_forward<float>(
            std::span<const float>(w.data(), static_cast<std::size_t>(w.size())),
            std::span<const float>(b.data(), static_cast<std::size_t>(b.size())),
            std::span<const float>(x.data(), static_cast<std::size_t>(x.size())), ci, co, k, l);
        py::array_t<float> res({static_cast<py::ssize_t>(co),
                                static_cast<py::ssize_t>(l - k + 1)});
        std::copy(out.begin(), out.end(), res.mutable_data());
        return res;
      },
      py::arg("w"), py::arg("b"), py::arg("x"), "Valid cross-correlation, pre-activation");

  m.def("relu", [](double x) { return kl::nn::relu(x); }, py::arg("x"));

  m.def(
      "global_average_pool",
      [](py::array_t<float, py::array::c_style | py::array::forcecast> x) {
        if (x.ndim() != 2) throw std::invalid_argument("expected (channels, len)");
        return kl::nn::global_average_pool<float>(
            std::span<const float>(x.data(), static_cast<std::size_t>(x.size())),
            static_cast<int>(x.shape(0)), static_cast<int>(x.shape(1)));
      },
      py::arg("x"));

  m.def(
      "mse_loss",
      [](const std::vector<double>& p, const std::vector<double>& t) {
        return kl::nn::mse_loss<double>(p, t);
      },
      py::arg("predictions"), py::arg("targets"));

  py::class_<kl::nn::Network<float>>(m, "Network")
      .def_property_readonly("param_count",
                             [](const kl::nn::Network<float>& n) { return n.n_params; })
      .def_property_readonly("input_n",
                             [](const kl::nn::Network<float>& n) { return n.spec.input_n; })
      .def("forward",
           [](kl::nn::Network<float>& net,
              py::array_t<float, py::array::c_style | py::array::forcecast> features) {
             auto ws = kl::nn::make_workspace(net);
             return kl::nn::forward(
                 net, std::span<const float>(features.data(),
                                             static_cast<std::size_t>(features.size())),
                 ws);
           })
      .def("save", [](const kl::nn::Network<float>& net,
                      const std::string& path) { kl::nn::save_checkpoint(path, net); });

  m.def(
      "make_cnn",
      [](int input_n, std::vector<int> channels, int kernel, std::vector<int> dense,
         std::uint64_t seed) {
        auto net = kl::nn::make_network<float>(
            kl::nn::cnn_spec(input_n, std::move(channels), kernel, std::move(dense)));
        kl::Rng rng = kl::Rng::substream(seed, 1);
        kl::nn::glorot_init(net, rng);
        return net;
      },
      py::arg("input_n"), py::arg("conv_channels") = std::vector<int>{16, 32, 64},
      py::arg("kernel") = 5, py::arg("dense") = std::vector<int>{64, 32}, py::arg("seed") = 0);

  m.def(
      "make_fcn",
      [](int input_n, std::vector<int> hidden, std::uint64_t seed) {
        auto net = kl::nn::make_network<float>(kl::nn::fcn_spec(input_n, std::move(hidden)));
        kl::Rng rng = kl::Rng::substream(seed, 1);
        kl::nn::glorot_init(net, rng);
        return net;
      },
      py::arg("input_n"), py::arg("hidden") = std::vector<int>{256, 128, 64, 32},
      py::arg("seed") = 0);

  m.def("load_network", &kl::nn::load_checkpoint, py::arg("path"));

  m.def(
      "train_on_dataset",
      [](kl::nn::Network<float>& net, const std::string& dataset_path, int epochs,
         double learning_rate, int batch_size, std::uint64_t seed) {
        kl::Dataset ds = kl::read_dataset(dataset_path);
        kl::TrainConfig cfg;
        cfg.epochs = epochs;
        cfg.learning_rate = learning_rate;
        cfg.batch_size = batch_size;
        cfg.seed = seed;
        kl::History hist = kl::train(net, ds, cfg);
        std::vector<std::array<double, 3>> out;
        for (const auto& e : hist)
          out.push_back({static_cast<double>(e.epoch), e.train_loss, e.val_loss});
        return out;
      },
      py::arg("net"), py::arg("dataset_path"), py::arg("epochs") = 5,
      py::arg("learning_rate") = 1e-3, py::arg("batch_size") = 32, py::arg("seed") = 0,
      "Returns [(epoch, train_loss, val_loss), ...]");

  m.def(
      "evaluate",
      [](const kl::nn::Network<float>& net, const std::string& dataset_path,
         const std::string& split) {
        kl::Dataset ds = kl::read_dataset(dataset_path);
        kl::Split s = split == "train" ? kl::Split::Train
                      : split == "val" ? kl::Split::Val
                                       : kl::Split::Test;
        const auto rep = kl::evaluate_rmse(net, ds, s);
        py::dict out;
        out["delta"] = rep.rmse;
        out["time_avg_delta"] = rep.time_avg_rmse;
        out["baseline_delta"] = kl::mean_predictor_rmse(ds, s, kl::Split::Train);
        return out;
      },
      py::arg("net"), py::arg("dataset_path"), py::arg("split") = "test");
}
