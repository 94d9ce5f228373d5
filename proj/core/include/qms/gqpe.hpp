#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "qms/errors.hpp"
#include "qms/models.hpp"
#include "qms/rng.hpp"

namespace qms {

// Resource plan for the Gaussian-filtered phase estimation stage.
//
// The ancilla register has 2^p frequency states spaced delta_omega apart,
// covering (-omega_max, omega_max); the filter is prepared on the 2^q
// states nearest zero.  The grids obey
//
//   omega_max   = 2^(p-1) pi / t_max
//   delta_omega = pi / t_max = z / (2 lambda temperature)
//
// so the measurement back-action shift 1/(2 lambda T) is delta_omega / z:
// at z = 1 every shifted frequency lands back on the grid, and larger z
// refines the grid by that factor.
struct GqpeConfig {
  double lambda = 0.0;
  double t_max = 0.0;
  int p = 0;
  int q = 0;
  double z = 1.0;
  double epsilon = 0.0;
  double e_max = 0.0;
  double temperature = 1.0;

  double omega_max() const;
  double delta_omega() const;
  double shift() const;  // 1 / (2 lambda temperature)

  // Throws std::invalid_argument on any inconsistency: non-positive
  // parameters, q > p, spectra extending past omega_max, or grids that do
  // not satisfy delta_omega = z * shift.
  void validate() const;
};

// Chooses lambda, t_max, p, q for a target filter error epsilon and
// spectral radius e_max.  Throws GuardError when no p <= 16 suffices.
GqpeConfig plan_resources(double epsilon, double e_max, double temperature,
                          double z = 1.0);

// sqrt(lambda/pi) * exp(-lambda omega^2), unit L1 mass over the real line.
double gaussian_filter(double lambda, double omega);

// omega_j = (2j - 2^p + 1) omega_max / 2^p for j = 0 .. 2^p - 1.
std::vector<double> frequency_grid(const GqpeConfig& cfg);
// t_j = (2j - 2^p + 1) t_max / 2^p for j = 0 .. 2^p - 1.
std::vector<double> time_grid(const GqpeConfig& cfg);

// Centered discrete Fourier transform from the time register to the
// frequency register, entries exp(i omega_k t_j) / 2^(p/2).  Unitary.
Eigen::MatrixXcd cqft_matrix(const GqpeConfig& cfg);

// Frequency-basis ancilla state carrying sqrt of the filter on the 2^q
// grid points nearest zero, normalized.
Eigen::VectorXcd prepare_ancilla(const GqpeConfig& cfg);

// The filter the finite circuit actually applies: outcome omega_k on input
// energy E has probability effective_filter(cfg, omega_k - E) divided by
// the total filter mass on the preparation block.
double effective_filter(const GqpeConfig& cfg, double omega);

struct FilterErrorReport {
  // max over the sweep of |effective - ideal| / ideal(0)
  double max_error = 0.0;
  double omega_at_max = 0.0;
};

// Sweeps |omega| <= e_max + omega_max, the full range of omega_k - E.
FilterErrorReport filter_error(const GqpeConfig& cfg, int points = 4001);

// Energy measurement with outcomes on a fixed frequency list.  Density
// matrices are expressed in the eigenbasis of the Hamiltonian the backend
// was built from and must have unit trace.
class EnergyMeasurement {
 public:
  virtual ~EnergyMeasurement() = default;
  virtual int dim() const = 0;
  virtual const std::vector<double>& omegas() const = 0;
  virtual std::vector<double> outcome_distribution(
      const Eigen::MatrixXcd& rho) const = 0;
  // Samples an outcome index and collapses rho to the post-measurement
  // state, renormalized to unit trace.
  virtual int measure(Eigen::MatrixXcd& rho, RngStream& rng) const = 0;
};

// Applies the filter as an exact positive-operator measurement diagonal in
// the energy eigenbasis: outcome j has weight c_j(E) proportional to
// gaussian_filter(lambda, omega_j - E), normalized over j for each
// eigenvalue separately, so completeness is exact.
class DirectPovmBackend : public EnergyMeasurement {
 public:
  DirectPovmBackend(const SpectralHamiltonian& h, const GqpeConfig& cfg);

  int dim() const override { return static_cast<int>(weights_.cols()); }
  const std::vector<double>& omegas() const override { return omegas_; }
  std::vector<double> outcome_distribution(
      const Eigen::MatrixXcd& rho) const override;
  int measure(Eigen::MatrixXcd& rho, RngStream& rng) const override;

  // weight(j, a) = c_j(E_a)
  const Eigen::MatrixXd& weights() const { return weights_; }

 private:
  std::vector<double> omegas_;
  Eigen::MatrixXd weights_;
};

// Simulates the measurement circuit: ancilla prepared by prepare_ancilla,
// transformed to the time register, a controlled phase exp(-i E t_j) per
// time state, transformed back, then read out projectively.  The three
// unitaries collapse into one precomputed (2^p d) x d map.
class CircuitBackend : public EnergyMeasurement {
 public:
  CircuitBackend(const SpectralHamiltonian& h, const GqpeConfig& cfg);

  int dim() const override { return dim_; }
  const std::vector<double>& omegas() const override { return omegas_; }
  std::vector<double> outcome_distribution(
      const Eigen::MatrixXcd& rho) const override;
  int measure(Eigen::MatrixXcd& rho, RngStream& rng) const override;

 private:
  int dim_ = 0;
  std::vector<double> omegas_;
  // beta_(k, a): ancilla amplitude for outcome k given system eigenstate a.
  // Every gate in the circuit is diagonal in the system eigenbasis, so the
  // joint action reduces to this table; |beta_(k, a)|^2 recovers the
  // effective filter at omega_k - E_a over the preparation mass.
  Eigen::MatrixXcd beta_;
};

// Projective measurement onto eigenspaces, reporting each eigenvalue
// snapped to the nearest half-offset lattice point (k + 1/2) delta_omega.
// This is the infinite-lambda limit of the filter at lattice resolution
// delta_omega.
class ExactEnergyBackend : public EnergyMeasurement {
 public:
  ExactEnergyBackend(const SpectralHamiltonian& h, double delta_omega);

  int dim() const override { return dim_; }
  const std::vector<double>& omegas() const override { return omegas_; }
  std::vector<double> outcome_distribution(
      const Eigen::MatrixXcd& rho) const override;
  int measure(Eigen::MatrixXcd& rho, RngStream& rng) const override;

 private:
  int dim_ = 0;
  std::vector<double> omegas_;
  // group_[g] lists the eigenbasis indices sharing outcome g.
  std::vector<std::vector<int>> groups_;
};

// Explicit operator form of the direct measurement in an arbitrary basis.
struct PovmSet {
  std::vector<Eigen::MatrixXcd> elements;
  std::vector<double> omegas;
};

PovmSet build_direct_povm(const SpectralHamiltonian& h, const GqpeConfig& cfg);

// Generic sampling from a POVM: outcome j with probability
// tr(M_j rho M_j^dagger); rho collapses to that conditional state.
int povm_measure(const PovmSet& povm, Eigen::MatrixXcd& rho, RngStream& rng);

}  // namespace qms
