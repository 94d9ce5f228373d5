#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <vector>

#include "qms/errors.hpp"
#include "qms/models.hpp"
#include "qms/rng.hpp"

namespace qms {

// Running surprisal table for the rejection-free branch loop.
//
// After `start(v0)` and n+1 calls to `advance`, the table holds the
// accumulated surprisals S(i, j) for the energy sequence v_0 .. v_{n+1}.
// `advance` returns the argument of the acceptance function for the branch
// it completes, so the caller only needs
//
//   u <= f(ledger.advance(v_next))
//
// to decide whether the walk halts.  The recursion updates two table rows
// per branch:
//
//   S(m-1, n)   = S(m-1, n-1) + s(v_n - v_{m-1} + T S(n, m) - T S(m-1, n-1))
//   S(n+1, m)   = S(n+1, m+1) + s(v_m - v_{n+1} + T S(m, n) - T S(n+1, m+1))
//
// for m = n .. 1, with S(n+1, n+1) = 0, and exp(-S(0, n)) equals the
// probability that branches 0 .. n-1 all delayed.
class DelayLedger {
 public:
  explicit DelayLedger(const AcceptanceFunction& af) : af_(&af) {}

  void start(double v0);
  // Appends the next value and returns the acceptance argument for the
  // branch it closes.  Requires a prior start().
  double advance(double v_next);
  // Drops the most recent value, undoing the matching advance().  Stale
  // table cells are left in place; the next advance overwrites exactly the
  // cells the dropped branch wrote.
  void pop();

  // S(0, n) for the current branch count n; exp of its negation is the
  // probability that every branch so far delayed.
  double delay_surprisal() const;
  int branch_count() const { return static_cast<int>(values_.size()) - 2; }
  const std::vector<double>& values() const { return values_; }

 private:
  const AcceptanceFunction* af_;
  std::vector<double> values_;
  std::vector<std::vector<double>> s_;
};

struct ClassicalStepRecord {
  int output_state = -1;
  // Number of delays before acceptance; branch n accepted means n proposals
  // were discarded first.
  int branches = 0;
  // a_0 .. a_{n+1}: start state, the delayed proposals, and the accepted one.
  std::vector<int> visited;
  bool accepted = false;
};

// Thrown when a single step exceeds the branch cap.  Carries the partial
// record so callers can report how far the walk got.
class BranchTruncationError : public GuardError {
 public:
  BranchTruncationError(const std::string& what, ClassicalStepRecord record)
      : GuardError(what), record(std::move(record)) {}
  ClassicalStepRecord record;
};

// One rejection-free update from state a0.  Draws alternate between the
// proposal kernel and the acceptance uniform, one pair per branch.
ClassicalStepRecord classical_step(const ClassicalSystem& sys,
                                   const ProposalKernel& kernel,
                                   const AcceptanceFunction& af, int a0,
                                   RngStream& rng, int branch_cap = 10000);

struct ClassicalSample {
  std::int64_t step = 0;
  int state = 0;
  double energy = 0.0;
  int branches = 0;
};

// Runs `steps` updates starting from a0, feeding each sample to `sink`.
// Step i draws from the substream (seed, chain_index, i), so any step can
// be reproduced in isolation.
void run_classical_chain(const ClassicalSystem& sys,
                         const ProposalKernel& kernel,
                         const AcceptanceFunction& af, int a0,
                         std::int64_t steps, std::uint64_t seed,
                         std::uint64_t chain_index,
                         const std::function<void(const ClassicalSample&)>& sink,
                         int branch_cap = 10000);

// Exact per-branch transition kernels, by exhaustive path enumeration.
// branch[n](a, b) is the probability that a step from b halts at branch n
// in state a; survival(b) is the mass still delaying after branch n_max.
// For every b the branch masses and survival sum to one.
struct ClassicalBranchKernels {
  std::vector<Eigen::MatrixXd> branch;
  Eigen::VectorXd survival;
};

ClassicalBranchKernels branch_kernels_upto(const ClassicalSystem& sys,
                                           const ProposalKernel& kernel,
                                           const AcceptanceFunction& af,
                                           int n_max,
                                           std::int64_t max_paths = 10000000);

inline Eigen::MatrixXd branch_kernel_oracle(const ClassicalSystem& sys,
                                            const ProposalKernel& kernel,
                                            const AcceptanceFunction& af,
                                            int n,
                                            std::int64_t max_paths = 10000000) {
  return branch_kernels_upto(sys, kernel, af, n, max_paths).branch.at(n);
}

struct DetailedBalanceReport {
  // max over branches n and state pairs (a, b) of
  // |P(n, a|b) w_b - P(n, b|a) w_a| with w the Gibbs weights.
  double max_violation = 0.0;
  // max over b of |sum_n sum_a P(n, a|b) + survival(b) - 1|.
  double completeness_residual = 0.0;
  // max over b of survival(b).
  double max_survival = 0.0;
};

DetailedBalanceReport check_classical_db(const ClassicalSystem& sys,
                                         const ProposalKernel& kernel,
                                         const AcceptanceFunction& af,
                                         int n_max,
                                         std::int64_t max_paths = 10000000);

}  // namespace qms
