#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "qms/classical.hpp"
#include "qms/errors.hpp"
#include "qms/gqpe.hpp"
#include "qms/models.hpp"
#include "qms/rng.hpp"

namespace qms {

// Paired surprisal tables for the measurement-based branch loop.  Values
// are measured frequencies rather than exact energies, and the acceptance
// argument carries a constant shift (the measurement back-action), so two
// tables are maintained: S accumulates with the shift, S bar without.
// Per branch, for m = n .. 1 with S(n+1, n+1) = Sbar(n+1, n+1) = 0:
//
//   S(m-1, n)    = S(m-1, n-1)    + s(w_n - w_{m-1} + T Sbar(n, m) - T S(m-1, n-1)    + shift)
//   Sbar(m-1, n) = Sbar(m-1, n-1) + s(w_n - w_{m-1} + T Sbar(n, m) - T Sbar(m-1, n-1))
//   S(n+1, m)    = S(n+1, m+1)    + s(w_m - w_{n+1} + T Sbar(m, n) - T S(n+1, m+1)    + shift)
//   Sbar(n+1, m) = Sbar(n+1, m+1) + s(w_m - w_{n+1} + T Sbar(m, n) - T Sbar(n+1, m+1))
//
// advance() returns the acceptance argument
//   w_{n+1} - w_0 + T Sbar(n+1, 1) - T S(0, n) + shift.
// With shift = 0 the tables coincide and the ledger reduces to DelayLedger.
class QuantumDelayLedger {
 public:
  QuantumDelayLedger(const AcceptanceFunction& af, double shift);

  void start(double w0);
  double advance(double w_next);
  void pop();

  // S(0, n) from the shifted table; its exp-negation is the probability
  // that every branch so far delayed, exactly as in the classical ledger.
  double delay_surprisal() const;
  int branch_count() const { return static_cast<int>(values_.size()) - 2; }
  double shift() const { return shift_; }
  const std::vector<double>& values() const { return values_; }

  // Table access for verification.
  double table(int sub, int sup) const { return s_.at(sub).at(sup); }
  double table_bar(int sub, int sup) const { return sbar_.at(sub).at(sup); }

 private:
  const AcceptanceFunction* af_;
  double shift_;
  std::vector<double> values_;
  std::vector<std::vector<double>> s_;
  std::vector<std::vector<double>> sbar_;
};

// Projective measurement of the subsystem observable basis, computational
// basis layout (subsystem index major: joint index = a * rest_dim + x).
// Returns the outcome and the normalized conditional state of the rest
// factor; the subsystem factor is consumed by the projection.
struct LocalMeasurementOutcome {
  int outcome = -1;
  Eigen::MatrixXcd rest;
};

LocalMeasurementOutcome measure_local(const Eigen::MatrixXcd& rho,
                                      const LocalObservable& b,
                                      RngStream& rng);

std::vector<double> local_outcome_distribution(const Eigen::MatrixXcd& rho,
                                               const LocalObservable& b);

// Tensors a fresh subsystem basis state onto the rest state.
Eigen::MatrixXcd prepare_local(const Eigen::MatrixXcd& rho_rest, int c,
                               const LocalObservable& b);

// Affine readout map applied to the step's initial frequency outcome:
// 1/(2 lambda t) + omega0 * exp(-1/(4 lambda t^2)).
double energy_correction(double omega0, double lambda, double t);

struct QuantumProposalOutcome {
  int measured = -1;  // d_n, the subsystem outcome before the proposal
  int proposed = -1;  // c_n, the prepared replacement
};

struct QuantumStepRecord {
  double omega0_raw = 0.0;        // initial frequency outcome as measured
  double omega0_corrected = 0.0;  // after energy_correction
  int d0 = -1;                    // first subsystem outcome
  double observable_value = 0.0;  // observable eigenvalue at d0
  int branches = 0;
  bool accepted = false;
  std::vector<double> omegas;  // w_0 .. w_{n+1}
  std::vector<QuantumProposalOutcome> outcomes;
};

class QuantumTruncationError : public GuardError {
 public:
  QuantumTruncationError(const std::string& what, QuantumStepRecord record)
      : GuardError(what), record(std::move(record)) {}
  QuantumStepRecord record;
};

// One measurement-based update in place on a computational-basis density
// matrix: initial frequency measurement, then per branch a subsystem
// measurement, a proposed replacement, another frequency measurement, and
// the shifted acceptance test.  Draw order per branch is
// [subsystem outcome][proposal][frequency outcome][acceptance uniform].
// Grid consistency is the back end's concern; this function checks only
// dimensions and that af and cfg agree on the temperature.
QuantumStepRecord quantum_step(Eigen::MatrixXcd& rho,
                               const SpectralHamiltonian& h,
                               const LocalObservable& b,
                               const ProposalKernel& kernel,
                               const AcceptanceFunction& af,
                               const GqpeConfig& cfg,
                               const EnergyMeasurement& backend,
                               RngStream& rng, int branch_cap = 1000);

struct QuantumSample {
  std::int64_t step = 0;
  double omega0_raw = 0.0;
  double omega0_corrected = 0.0;
  int d0 = -1;
  double observable_value = 0.0;
  int branches = 0;
};

void run_quantum_chain(Eigen::MatrixXcd& rho, const SpectralHamiltonian& h,
                       const LocalObservable& b, const ProposalKernel& kernel,
                       const AcceptanceFunction& af, const GqpeConfig& cfg,
                       const EnergyMeasurement& backend, std::int64_t steps,
                       std::uint64_t seed, std::uint64_t chain_index,
                       const std::function<void(const QuantumSample&)>& sink,
                       int branch_cap = 1000);

// Exact per-branch superoperators of the step channel, by exhaustive
// enumeration of frequency-outcome sequences on the measurement grid with
// subsystem outcomes summed into a transfer superoperator.  Everything is
// expressed in the Hamiltonian eigenbasis with column-major vectorization:
// sop(a' + dim b', a + dim b) maps the |a><b| component of the input to
// the |a'><b'| component of the output.  survival holds the mass still
// delaying after branch n_max, so sum-of-branches plus survival is exactly
// trace preserving.
struct BranchSuperoperators {
  int dim = 0;
  std::vector<Eigen::MatrixXcd> branch;
  Eigen::MatrixXcd survival;
};

Eigen::MatrixXcd apply_superoperator(const Eigen::MatrixXcd& sop,
                                     const Eigen::MatrixXcd& rho);

BranchSuperoperators branch_superoperators_upto(
    const SpectralHamiltonian& h, const LocalObservable& b,
    const ProposalKernel& kernel, const AcceptanceFunction& af,
    const GqpeConfig& cfg, int n_max, std::int64_t max_terms = 100000000);

inline Eigen::MatrixXcd branch_superoperator_oracle(
    const SpectralHamiltonian& h, const LocalObservable& b,
    const ProposalKernel& kernel, const AcceptanceFunction& af,
    const GqpeConfig& cfg, int n, std::int64_t max_terms = 100000000) {
  return branch_superoperators_upto(h, b, kernel, af, cfg, n, max_terms)
      .branch.at(n);
}

struct QuantumBalanceReport {
  // max over branches and index tuples of
  // |Q(a,b,c,d) w(b,c) - conj(Q(b,a,d,c)) w(a,d)|, w(x,y) the Gibbs weight
  // at the mean energy (E_x + E_y) / 2.
  double max_violation = 0.0;
  std::vector<double> per_branch;
  double max_magnitude = 0.0;  // largest |Q| entry across branches
  // max over input pairs of |sum_x total(x + dim x, in) - trace pattern|
  // with survival included.
  double completeness_residual = 0.0;
};

QuantumBalanceReport check_quantum_db(const SpectralHamiltonian& h,
                                      const BranchSuperoperators& ops,
                                      double temperature);

struct StationarityReport {
  // Trace distance between the enumerated-branch image of the Gibbs state
  // (with the delayed tail returned to the Gibbs state) and the Gibbs
  // state itself, then the same with the tail counted fully against it.
  double residual_best = 0.0;
  double tail_mass = 0.0;
  double residual_worst = 0.0;
};

StationarityReport check_stationarity(const SpectralHamiltonian& h,
                                      const BranchSuperoperators& ops,
                                      double temperature);

// Exact mean of the initial frequency outcome when the input ensemble is
// the Gibbs state: sum_a pi_a sum_j omega_j c_j(E_a).
double equilibrium_energy_readout(const SpectralHamiltonian& h,
                                  const DirectPovmBackend& backend,
                                  double temperature);

}  // namespace qms
