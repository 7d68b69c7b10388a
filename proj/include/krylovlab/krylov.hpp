#pragma once

#include <vector>

#include "krylovlab/numerics.hpp"

namespace krylovlab {

// Lanczos coefficients and orthonormal Krylov basis for one (H, psi0) pair.
// a holds a_0..a_{K-1}, b holds b_0..b_{K-1} with b_0 = 0; the K x K
// tridiagonal T has diagonal a and off-diagonal b_1..b_{K-1}.
struct KrylovData {
  Eigen::VectorXd a;
  Eigen::VectorXd b;
  ComplexMatrix basis;  // N x K, columns |K_n>
  int dim = 0;          // Krylov dimension K
};

// Spread-complexity time series. values[i] = C(times[i]); normalization is
// the system dimension N used for C/N plots.
struct ComplexityCurve {
  std::vector<double> times;
  std::vector<double> values;
  int normalization = 1;
};

// Three-term Lanczos recursion with full (two-pass) reorthogonalization
// against all prior basis vectors. Terminates at n = N or when the next
// off-diagonal coefficient drops to tol_breakdown.
KrylovData lanczos_tridiagonalize(const ComplexMatrix& h, const ComplexVector& psi0,
                                  double tol_breakdown = 1e-10);

// Krylov amplitudes of one state: psiK_n = <K_n|psi>.
ComplexVector krylov_project(const KrylovData& kd, const ComplexVector& psi_t);

// Solves the Krylov-chain Schroedinger equation exactly through the
// eigendecomposition of T: psiK(t) = V exp(-i diag(eps) t) V^T e_0.
// Returns a K x len(times) matrix of amplitudes.
Eigen::MatrixXcd propagate_tridiagonal(const KrylovData& kd, const std::vector<double>& times);

// C(t) = sum_n n |psiK_n(t)|^2. Columns must be unit norm within 1e-8.
ComplexityCurve spread_complexity(const Eigen::MatrixXcd& psik_t,
                                  const std::vector<double>& times, int normalization);

}  // namespace krylovlab
