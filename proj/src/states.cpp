#include "krylovlab/states.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace krylovlab {

std::string basis_name(Basis b) {
  switch (b) {
    case Basis::Energy: return "energy";
    case Basis::Krylov: return "krylov";
    case Basis::Original: return "original";
    case Basis::PseudoRandom: return "pseudorandom";
  }
  return "?";
}

Basis basis_from_name(const std::string& name) {
  if (name == "energy") return Basis::Energy;
  if (name == "krylov") return Basis::Krylov;
  if (name == "original") return Basis::Original;
  if (name == "pseudorandom" || name == "pseudo-random") return Basis::PseudoRandom;
  throw std::invalid_argument("unknown basis '" + name +
                              "' (expected energy|krylov|original|pseudorandom)");
}

std::vector<double> integer_time_grid(int n) {
  if (n < 1) throw std::invalid_argument("integer_time_grid: n must be >= 1");
  std::vector<double> times(3 * static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < times.size(); ++i) times[i] = static_cast<double>(i);
  return times;
}

ComplexVector tfd_state(const EigenDecomposition& eig, double beta) {
  if (!(beta >= 0.0)) throw std::invalid_argument("tfd_state: beta must be >= 0");
  const Eigen::Index n = eig.eigenvalues.size();
  Eigen::VectorXd x = -0.5 * beta * eig.eigenvalues;
  const double shift = x.maxCoeff();
  Eigen::VectorXd w = (x.array() - shift).exp();
  w /= w.norm();
  return w.cast<std::complex<double>>().eval().head(n);
}

Eigen::MatrixXcd evolve_eigenbasis(const ComplexVector& psi0, const EigenDecomposition& eig,
                                   const std::vector<double>& times) {
  const Eigen::Index n = psi0.size();
  if (eig.eigenvalues.size() != n)
    throw std::invalid_argument("evolve_eigenbasis: dimension mismatch");
  Eigen::MatrixXcd out(n, static_cast<Eigen::Index>(times.size()));
  for (std::size_t c = 0; c < times.size(); ++c) {
    const double t = times[c];
    for (Eigen::Index i = 0; i < n; ++i)
      out(i, static_cast<Eigen::Index>(c)) = std::polar(1.0, -eig.eigenvalues[i] * t) * psi0[i];
  }
  return out;
}

StateTrajectory make_energy_trajectory(const EigenDecomposition& eig, double beta,
                                       const std::vector<double>& times, int sample_id) {
  StateTrajectory traj;
  traj.basis = Basis::Energy;
  traj.beta = beta;
  traj.sample_id = sample_id;
  traj.psi0 = tfd_state(eig, beta);
  traj.psi_t = evolve_eigenbasis(traj.psi0, eig, times);
  traj.times = times;
  return traj;
}

namespace {

StateTrajectory unitary_image(const StateTrajectory& traj, const ComplexMatrix& u, Basis basis) {
  if (u.rows() != traj.psi_t.rows() || u.cols() != traj.psi_t.rows())
    throw std::invalid_argument("basis change: unitary dimension mismatch");
  if (unitarity_residual(u) > 1e-8)
    throw std::invalid_argument("basis change: matrix not unitary within 1e-8");
  StateTrajectory out;
  out.basis = basis;
  out.beta = traj.beta;
  out.sample_id = traj.sample_id;
  out.times = traj.times;
  out.psi_t = u.adjoint() * traj.psi_t;
  out.psi0 = out.psi_t.col(0);
  return out;
}

}  // namespace

StateTrajectory to_original_basis(const StateTrajectory& traj_energy, const ComplexMatrix& u_s) {
  return unitary_image(traj_energy, u_s, Basis::Original);
}

StateTrajectory to_pseudorandom_basis(const StateTrajectory& traj_energy,
                                      const ComplexMatrix& u_0) {
  return unitary_image(traj_energy, u_0, Basis::PseudoRandom);
}

StateTrajectory to_krylov_basis(const StateTrajectory& traj_energy, const KrylovData& kd) {
  if (kd.basis.rows() != traj_energy.psi_t.rows())
    throw std::invalid_argument("to_krylov_basis: dimension mismatch");
  StateTrajectory out;
  out.basis = Basis::Krylov;
  out.beta = traj_energy.beta;
  out.sample_id = traj_energy.sample_id;
  out.times = traj_energy.times;
  const Eigen::Index n = traj_energy.psi_t.rows();
  out.psi_t = Eigen::MatrixXcd::Zero(n, traj_energy.psi_t.cols());
  out.psi_t.topRows(kd.dim) = kd.basis.adjoint() * traj_energy.psi_t;
  out.psi0 = out.psi_t.col(0);
  return out;
}

Eigen::MatrixXd amplitude_grid(const StateTrajectory& traj) {
  return (traj.psi_t.real() + traj.psi_t.imag()).cwiseAbs();
}

}  // namespace krylovlab
