#include "krylovlab/krylov.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "krylovlab/errors.hpp"

namespace krylovlab {

KrylovData lanczos_tridiagonalize(const ComplexMatrix& h, const ComplexVector& psi0,
                                  double tol_breakdown) {
  const Eigen::Index n = h.rows();
  if (h.cols() != n) throw std::invalid_argument("lanczos: H not square");
  if (psi0.size() != n) throw std::invalid_argument("lanczos: psi0 dimension mismatch");
  if (!(tol_breakdown > 0.0)) throw std::invalid_argument("lanczos: tol_breakdown must be > 0");
  if (std::abs(psi0.norm() - 1.0) > 1e-8)
    throw std::invalid_argument("lanczos: psi0 not normalized");

  ComplexMatrix basis(n, n);
  Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  basis.col(0) = psi0;

  Eigen::Index k = n;
  for (Eigen::Index j = 0; j < n; ++j) {
    ComplexVector v = h * basis.col(j);
    a[j] = std::real(basis.col(j).dot(v));  // Eigen dot conjugates the left factor
    v -= a[j] * basis.col(j);
    if (j > 0) v -= b[j] * basis.col(j - 1);
    // two Gram-Schmidt passes against all prior vectors
    auto prior = basis.leftCols(j + 1);
    v -= prior * (prior.adjoint() * v).eval();
    v -= prior * (prior.adjoint() * v).eval();
    const double norm = v.norm();
    if (j + 1 == n) break;
    if (norm <= tol_breakdown) {
      k = j + 1;
      break;
    }
    b[j + 1] = norm;
    basis.col(j + 1) = v / norm;
  }

  KrylovData kd;
  kd.dim = static_cast<int>(k);
  kd.a = a.head(k);
  kd.b = b.head(k);
  kd.basis = basis.leftCols(k);

  ComplexMatrix gram = kd.basis.adjoint() * kd.basis;
  gram.diagonal().array() -= 1.0;
  if (gram.cwiseAbs().maxCoeff() > 1e-8)
    throw NumericalError("lanczos: orthogonality lost beyond 1e-8 after reorthogonalization");
  return kd;
}

ComplexVector krylov_project(const KrylovData& kd, const ComplexVector& psi_t) {
  if (psi_t.size() != kd.basis.rows())
    throw std::invalid_argument("krylov_project: dimension mismatch");
  return kd.basis.adjoint() * psi_t;
}

Eigen::MatrixXcd propagate_tridiagonal(const KrylovData& kd, const std::vector<double>& times) {
  if (times.empty()) throw std::invalid_argument("propagate_tridiagonal: empty time grid");
  if (times.front() != 0.0)
    throw std::invalid_argument("propagate_tridiagonal: times must start at 0");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (times[i] <= times[i - 1])
      throw std::invalid_argument("propagate_tridiagonal: times must be sorted ascending");

  const int k = kd.dim;
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < k; ++i) {
    t(i, i) = kd.a[i];
    if (i + 1 < k) {
      t(i, i + 1) = kd.b[i + 1];
      t(i + 1, i) = kd.b[i + 1];
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(t);
  if (solver.info() != Eigen::Success)
    throw NumericalError("propagate_tridiagonal: tridiagonal eigensolver failed");
  const Eigen::MatrixXd& v = solver.eigenvectors();
  const Eigen::VectorXd& eps = solver.eigenvalues();
  const Eigen::VectorXd w = v.row(0).transpose();  // V^T e_0

  Eigen::MatrixXcd amps(k, static_cast<Eigen::Index>(times.size()));
  for (std::size_t c = 0; c < times.size(); ++c) {
    ComplexVector phase(k);
    for (int i = 0; i < k; ++i)
      phase[i] = std::polar(w[i], -eps[i] * times[c]);
    amps.col(static_cast<Eigen::Index>(c)) = v * phase;
  }
  return amps;
}

ComplexityCurve spread_complexity(const Eigen::MatrixXcd& psik_t,
                                  const std::vector<double>& times, int normalization) {
  if (static_cast<std::size_t>(psik_t.cols()) != times.size())
    throw std::invalid_argument("spread_complexity: column count != time count");
  ComplexityCurve curve;
  curve.times = times;
  curve.normalization = normalization;
  curve.values.resize(times.size());
  for (Eigen::Index c = 0; c < psik_t.cols(); ++c) {
    double norm2 = 0.0, acc = 0.0;
    for (Eigen::Index i = 0; i < psik_t.rows(); ++i) {
      const double p = std::norm(psik_t(i, c));
      norm2 += p;
      acc += static_cast<double>(i) * p;
    }
    if (std::abs(norm2 - 1.0) > 1e-8)
      throw NumericalError("spread_complexity: column norm violation at time index " +
                           std::to_string(c));
    curve.values[static_cast<std::size_t>(c)] = acc;
  }
  return curve;
}

}  // namespace krylovlab
