#pragma once

#include <string>
#include <vector>

#include "krylovlab/krylov.hpp"
#include "krylovlab/numerics.hpp"

namespace krylovlab {

enum class Basis { Energy, Krylov, Original, PseudoRandom };

std::string basis_name(Basis b);
Basis basis_from_name(const std::string& name);  // throws std::invalid_argument

// Complex amplitudes on the integer time grid, one column per grid time.
// All four bases are unitary images of the energy basis, so every column is
// unit norm and column 0 equals psi0.
struct StateTrajectory {
  Basis basis = Basis::Energy;
  double beta = 0.0;
  int sample_id = 0;
  ComplexVector psi0;
  Eigen::MatrixXcd psi_t;
  std::vector<double> times;
};

// t = 0, 1, ..., 3n-1.
std::vector<double> integer_time_grid(int n);

// TFD amplitudes in the energy basis: psi_n(0) = exp(-beta E_n / 2) / sqrt(Z),
// evaluated with a max-shift so large beta cannot overflow.
ComplexVector tfd_state(const EigenDecomposition& eig, double beta);

// Column t: psi_n(t) = exp(-i E_n t) psi_n(0).
Eigen::MatrixXcd evolve_eigenbasis(const ComplexVector& psi0, const EigenDecomposition& eig,
                                   const std::vector<double>& times);

StateTrajectory make_energy_trajectory(const EigenDecomposition& eig, double beta,
                                       const std::vector<double>& times, int sample_id);

// Columns multiplied by U^dagger (Eq. of the sample's diagonalizing unitary).
StateTrajectory to_original_basis(const StateTrajectory& traj_energy, const ComplexMatrix& u_s);

// Same contract with the shared, sample-independent reference unitary.
StateTrajectory to_pseudorandom_basis(const StateTrajectory& traj_energy,
                                      const ComplexMatrix& u_0);

// Columns projected on the Krylov basis of the same (H, psi0); zero-padded
// to N rows when the Krylov dimension K < N.
StateTrajectory to_krylov_basis(const StateTrajectory& traj_energy, const KrylovData& kd);

// Entry (n, t) = |Re psi_n(t) + Im psi_n(t)|.
Eigen::MatrixXd amplitude_grid(const StateTrajectory& traj);

}  // namespace krylovlab
