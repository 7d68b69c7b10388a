#include "krylovlab/numerics.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

#include "krylovlab/errors.hpp"

namespace krylovlab {

double hermiticity_residual(const ComplexMatrix& a) {
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

double unitarity_residual(const ComplexMatrix& u) {
  ComplexMatrix g = u.adjoint() * u;
  g.diagonal().array() -= 1.0;
  return g.cwiseAbs().maxCoeff();
}

namespace {

// Largest-magnitude component of each column made real and positive.
// First index wins on exact ties, so the result is deterministic.
void fix_phases(ComplexMatrix& u) {
  for (Eigen::Index c = 0; c < u.cols(); ++c) {
    Eigen::Index imax = 0;
    double best = -1.0;
    for (Eigen::Index r = 0; r < u.rows(); ++r) {
      const double m = std::abs(u(r, c));
      if (m > best) {
        best = m;
        imax = r;
      }
    }
    const std::complex<double> z = u(imax, c);
    if (best > 0.0) u.col(c) *= std::conj(z) / best;
  }
}

}  // namespace

EigenDecomposition hermitian_eigh(const ComplexMatrix& h) {
  if (h.rows() != h.cols()) throw std::invalid_argument("hermitian_eigh: matrix not square");
  if (h.rows() == 0) throw std::invalid_argument("hermitian_eigh: empty matrix");
  if (!h.allFinite()) throw std::invalid_argument("hermitian_eigh: non-finite entries");
  if (hermiticity_residual(h) > 1e-12)
    throw std::invalid_argument("hermitian_eigh: input not Hermitian within 1e-12");

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
  if (solver.info() != Eigen::Success)
    throw NumericalError("hermitian_eigh: QL iteration failed to converge (limit 30*n sweeps)");

  EigenDecomposition out;
  out.eigenvalues = solver.eigenvalues();
  out.eigenvectors = solver.eigenvectors();
  fix_phases(out.eigenvectors);

  for (Eigen::Index i = 0; i + 1 < out.eigenvalues.size(); ++i)
    if (out.eigenvalues[i + 1] - out.eigenvalues[i] < 1e-12) out.degenerate = true;

  if (unitarity_residual(out.eigenvectors) > 1e-10)
    throw NumericalError("hermitian_eigh: eigenvector orthonormality residual above 1e-10");
  const double hmax = h.cwiseAbs().maxCoeff();
  const ComplexMatrix rec =
      out.eigenvectors * out.eigenvalues.asDiagonal() * out.eigenvectors.adjoint();
  if ((rec - h).cwiseAbs().maxCoeff() > 1e-8 * std::max(hmax, 1.0))
    throw NumericalError("hermitian_eigh: reconstruction residual above 1e-8*max|H|");
  return out;
}

ComplexMatrix haar_unitary(int n, Rng& rng) {
  if (n < 1) throw std::invalid_argument("haar_unitary: n must be >= 1");
  ComplexMatrix g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      g(i, j) = std::complex<double>(rng.gaussian(0.0, 1.0), rng.gaussian(0.0, 1.0));
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Absorbing the R diagonal phases makes the distribution Haar.
  for (int j = 0; j < n; ++j) {
    const std::complex<double> d = r(j, j);
    const double m = std::abs(d);
    if (m > 0.0) q.col(j) *= d / m;
  }
  return q;
}

}  // namespace krylovlab
