#pragma once

#include <Eigen/Dense>

#include "krylovlab/rng.hpp"

namespace krylovlab {

using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

struct EigenDecomposition {
  Eigen::VectorXd eigenvalues;   // ascending
  ComplexMatrix eigenvectors;    // orthonormal columns, phase-fixed
  bool degenerate = false;       // some gap below 1e-12
};

// max_ij |A_ij - conj(A_ji)|
double hermiticity_residual(const ComplexMatrix& a);

// max_ij |(U^H U - I)_ij|
double unitarity_residual(const ComplexMatrix& u);

// Dense Hermitian eigendecomposition. Validates hermiticity (<= 1e-12),
// fixes each eigenvector's phase so that its largest-magnitude component is
// real and positive, and checks the orthonormality and reconstruction
// residuals before returning. Two calls on equal input are bit-identical.
EigenDecomposition hermitian_eigh(const ComplexMatrix& h);

// Haar-distributed unitary: QR of a complex Ginibre matrix with the R
// diagonal phases absorbed into Q.
ComplexMatrix haar_unitary(int n, Rng& rng);

}  // namespace krylovlab
