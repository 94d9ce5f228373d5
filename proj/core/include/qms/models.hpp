#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "qms/rng.hpp"

namespace qms {

// Finite classical state space with an energy per state, used by the
// rejection-free classical sampler and as the induced system of commuting
// quantum instances.
struct ClassicalSystem {
  ClassicalSystem(std::vector<double> energies, double temperature);

  int num_states() const { return static_cast<int>(energies.size()); }

  std::vector<double> energies;
  double temperature;
};

// Regularized Metropolis acceptance rule
//   f(w) = (1 - delta) * min(1, exp(-w / T)),
// together with the delay surprisal s(w) = -ln(1 - f(w)) that the branch
// ledgers accumulate. The delta floor keeps s bounded by -ln(delta).
class AcceptanceFunction {
 public:
  AcceptanceFunction(double delta, double temperature);

  // Both evaluators sit on the branch loop's critical path, so they are
  // inline and the omega <= 0 plateau short-circuits to cached constants.
  double f(double omega) const {
    if (omega <= 0.0) return one_minus_delta_;
    return one_minus_delta_ * std::exp(-omega / temperature_);
  }
  // -ln(1 - f); log1p keeps precision when f is tiny. Past 40 T the true
  // value is under 2^-56, beneath the resolution of every accumulation it
  // could enter, and long excursions spend most of their ledger updates
  // out there, so it is rounded to zero without the transcendentals.
  double surprisal(double omega) const {
    if (omega <= 0.0) return floor_surprisal_;
    if (omega >= tail_cut_) return 0.0;
    return -std::log1p(-f(omega));
  }

  double delta() const { return delta_; }
  double temperature() const { return temperature_; }

 private:
  double delta_;
  double temperature_;
  double one_minus_delta_;
  double floor_surprisal_;
  double tail_cut_;
};

// Hamiltonian in spectral form: ascending eigenvalues and the unitary of
// eigenvectors (columns). e_max is a certified bound on |E_a| used by the
// frequency-grid planner.
class SpectralHamiltonian {
 public:
  SpectralHamiltonian(Eigen::VectorXd eigenvalues, Eigen::MatrixXcd eigenvectors, double e_max);

  int dim() const { return static_cast<int>(eigenvalues_.size()); }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  const Eigen::MatrixXcd& eigenvectors() const { return eigenvectors_; }
  double e_max() const { return e_max_; }

  // Dense matrix V diag(E) V^dagger in the computational basis.
  Eigen::MatrixXcd matrix() const;

 private:
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXcd eigenvectors_;
  double e_max_;
};

// Diagonalizes a Hermitian matrix. Non-Hermitian input is rejected with the
// deviation norm in the message. e_max is set to max |E_a| plus the pad.
SpectralHamiltonian build_spectral(const Eigen::MatrixXcd& h_matrix, double e_max_pad = 0.0);

// Density matrix with cheap structural checks on construction (Hermitian to
// 1e-10, unit trace to 1e-10). The spectral positivity check costs a full
// eigendecomposition, so it lives in validate_full() and is called at module
// boundaries and in tests rather than in sampler inner loops.
class DensityMatrix {
 public:
  explicit DensityMatrix(Eigen::MatrixXcd entries);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const Eigen::MatrixXcd& entries() const { return entries_; }

  // Throws unless all eigenvalues are >= -1e-10.
  void validate_full() const;

  static DensityMatrix pure(const Eigen::VectorXcd& state);

 private:
  Eigen::MatrixXcd entries_;
};

// Observable B = sum_a beta_a |phi_a><phi_a| (x) I_r acting on the first
// tensor factor of a subsystem_dim x rest_dim space. The columns of `basis`
// are the |phi_a>.
class LocalObservable {
 public:
  LocalObservable(int subsystem_dim, int rest_dim, Eigen::MatrixXcd basis, Eigen::VectorXd values);

  int subsystem_dim() const { return m_; }
  int rest_dim() const { return r_; }
  int total_dim() const { return m_ * r_; }
  const Eigen::MatrixXcd& basis() const { return basis_; }
  const Eigen::VectorXd& values() const { return values_; }

 private:
  int m_;
  int r_;
  Eigen::MatrixXcd basis_;
  Eigen::VectorXd values_;
};

// Dense matrix of the observable on the full space.
Eigen::MatrixXcd observable_matrix(const LocalObservable& b);

// Symmetric column-stochastic proposal kernel; matrix(a, b) = P(a | b).
class ProposalKernel {
 public:
  explicit ProposalKernel(Eigen::MatrixXd matrix);

  int size() const { return static_cast<int>(matrix_.rows()); }
  const Eigen::MatrixXd& matrix() const { return matrix_; }
  double prob(int to, int from) const { return matrix_(to, from); }

  // Draws a proposal from column `from`, consuming exactly one uniform.
  // Agrees with RngStream::sample_weights on the full column but only
  // walks the precomputed nonzero entries, which matters for sparse
  // kernels like single_bit_flip.
  int sample(int from, RngStream& rng) const;

  // Uniform proposal over the other states.
  static ProposalKernel uniform_offdiagonal(int num_states);
  // Uniform single-bit flip on an n_bits-bit state index.
  static ProposalKernel single_bit_flip(int n_bits);

 private:
  Eigen::MatrixXd matrix_;
  // Nonzero column entries, flattened; column b occupies
  // [col_start_[b], col_start_[b + 1]) with running in-column sums.
  std::vector<int> nz_index_;
  std::vector<double> nz_cum_;
  std::vector<int> col_start_;
};

// Gibbs state exp(-H/T)/Z in the computational basis. Energies are shifted
// by min E_a before exponentiating so large spectra cannot underflow to an
// all-zero state.
DensityMatrix gibbs_state(const SpectralHamiltonian& h, double temperature);

// tr(gibbs_state(h, T) * obs); the imaginary part (roundoff) is discarded
// after a sanity check.
double gibbs_expectation(const SpectralHamiltonian& h, double temperature,
                         const Eigen::MatrixXcd& obs);
double gibbs_expectation(const SpectralHamiltonian& h, double temperature,
                         const LocalObservable& b);

// Classical Gibbs mean energy by exact enumeration.
double gibbs_mean_energy(const ClassicalSystem& sys);

// --- small model builders -------------------------------------------------

Eigen::MatrixXcd pauli_x();
Eigen::MatrixXcd pauli_y();
Eigen::MatrixXcd pauli_z();
Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

// Transverse-field Ising chain on `sites` qubits:
//   H = -coupling * sum_i Z_i Z_{i+1} - field * sum_i X_i.
Eigen::MatrixXcd tfim_hamiltonian(int sites, double coupling, double field, bool periodic);

// Classical Ising model on a rows x cols lattice; states are spin
// configurations indexed by bit patterns (bit=0 -> spin +1):
//   E = -coupling * sum_<ij> s_i s_j - field * sum_i s_i.
ClassicalSystem classical_ising(int rows, int cols, double coupling, double field, bool periodic,
                                double temperature);

}  // namespace qms
