#include "qms/classical.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace qms {

void DelayLedger::start(double v0) {
  values_.assign(1, v0);
  s_.assign(1, std::vector<double>(1, 0.0));
}

double DelayLedger::advance(double v_next) {
  if (values_.empty()) {
    throw std::logic_error("DelayLedger::advance called before start");
  }
  values_.push_back(v_next);
  const int n = static_cast<int>(values_.size()) - 2;
  const double temp = af_->temperature();

  const std::size_t need = static_cast<std::size_t>(n) + 2;
  if (s_.size() < need) {
    s_.resize(need);
    for (auto& row : s_) row.resize(need, 0.0);
  }

  s_[n + 1][n + 1] = 0.0;
  for (int m = n; m >= 1; --m) {
    s_[m - 1][n] =
        s_[m - 1][n - 1] + af_->surprisal(values_[n] - values_[m - 1] +
                                          temp * (s_[n][m] - s_[m - 1][n - 1]));
    s_[n + 1][m] =
        s_[n + 1][m + 1] + af_->surprisal(values_[m] - values_[n + 1] +
                                          temp * (s_[m][n] - s_[n + 1][m + 1]));
  }
  return values_[n + 1] - values_[0] + temp * (s_[n + 1][1] - s_[0][n]);
}

void DelayLedger::pop() {
  if (values_.size() < 2) {
    throw std::logic_error("DelayLedger::pop without a matching advance");
  }
  values_.pop_back();
}

double DelayLedger::delay_surprisal() const {
  const int n = branch_count();
  if (n < 0) throw std::logic_error("DelayLedger::delay_surprisal before any branch");
  return s_[0][n];
}

ClassicalStepRecord classical_step(const ClassicalSystem& sys,
                                   const ProposalKernel& kernel,
                                   const AcceptanceFunction& af, int a0,
                                   RngStream& rng, int branch_cap) {
  const int k = sys.num_states();
  if (kernel.size() != k) {
    throw std::invalid_argument("proposal kernel size does not match state count");
  }
  if (a0 < 0 || a0 >= k) {
    throw std::invalid_argument("start state out of range");
  }
  if (af.temperature() != sys.temperature) {
    throw std::invalid_argument(
        "acceptance function and system disagree on temperature");
  }

  ClassicalStepRecord rec;
  rec.visited.push_back(a0);

  // Rolling form of the DelayLedger recursion. Branch n reads only the
  // previous branch's upper column S(., n - 1) and lower row S(n, .), so
  // two array pairs replace the full table; DelayLedger keeps the table
  // form for walks that need pop(). The arithmetic matches the ledger
  // expression for expression, so both forms make identical decisions.
  std::vector<double> col_prev, col_cur, row_prev, row_cur;
  std::vector<double> vals;
  vals.reserve(64);
  vals.push_back(sys.energies[a0]);

  const double temp = af.temperature();
  for (int n = 0; n <= branch_cap; ++n) {
    const int from = rec.visited.back();
    const int proposal = kernel.sample(from, rng);
    rec.visited.push_back(proposal);
    vals.push_back(sys.energies[proposal]);

    if (static_cast<int>(col_cur.size()) < n + 2) {
      const std::size_t grown = std::max<std::size_t>(64, 2 * col_cur.size());
      col_prev.resize(grown);
      col_cur.resize(grown);
      row_prev.resize(grown);
      row_cur.resize(grown);
    }
    const double* v = vals.data();
    const double vn = v[n];
    const double vn1 = v[n + 1];
    col_cur[n] = 0.0;
    row_cur[n + 1] = 0.0;
    // The row update is a serial chain through row_cur[j + 1]; the column
    // update is independent across i. Fused at offset one (row j = i + 1
    // only needs col_cur[i + 1], written the iteration before), the column
    // work fills the row chain's latency.
    for (int i = n - 1; i >= 0; --i) {
      col_cur[i] = col_prev[i] + af.surprisal(vn - v[i] +
                                              temp * (row_prev[i + 1] - col_prev[i]));
      row_cur[i + 1] = row_cur[i + 2] +
                       af.surprisal(v[i + 1] - vn1 +
                                    temp * (col_cur[i + 1] - row_cur[i + 2]));
    }
    const double arg = vn1 - v[0] + temp * (row_cur[1] - col_cur[0]);

    const double u = rng.uniform();
    if (u <= af.f(arg)) {
      rec.output_state = proposal;
      rec.branches = n;
      rec.accepted = true;
      return rec;
    }
    col_prev.swap(col_cur);
    row_prev.swap(row_cur);
  }
  rec.branches = branch_cap;
  throw BranchTruncationError(
      "step exceeded branch cap of " + std::to_string(branch_cap) +
          " without accepting",
      std::move(rec));
}

void run_classical_chain(const ClassicalSystem& sys,
                         const ProposalKernel& kernel,
                         const AcceptanceFunction& af, int a0,
                         std::int64_t steps, std::uint64_t seed,
                         std::uint64_t chain_index,
                         const std::function<void(const ClassicalSample&)>& sink,
                         int branch_cap) {
  int state = a0;
  for (std::int64_t i = 0; i < steps; ++i) {
    RngStream rng(seed, chain_index, static_cast<std::uint64_t>(i));
    const ClassicalStepRecord rec =
        classical_step(sys, kernel, af, state, rng, branch_cap);
    state = rec.output_state;
    sink(ClassicalSample{i, state, sys.energies[state], rec.branches});
  }
}

namespace {

// Shared depth-first walk over proposal sequences.  Branch n's sequences
// are length n + 2 prefixes extended by one proposal, so a single walk to
// depth n_max + 2 yields every branch kernel at once.
struct PathEnumerator {
  const ClassicalSystem& sys;
  const Eigen::MatrixXd& kmat;
  const AcceptanceFunction& af;
  int n_max;
  std::int64_t max_paths;

  ClassicalBranchKernels out;
  DelayLedger ledger;
  std::vector<int> path;
  std::vector<double> weight;
  std::int64_t nodes = 0;

  PathEnumerator(const ClassicalSystem& s, const ProposalKernel& kernel,
                 const AcceptanceFunction& a, int nm, std::int64_t mp)
      : sys(s), kmat(kernel.matrix()), af(a), n_max(nm), max_paths(mp),
        ledger(a) {
    const int k = sys.num_states();
    out.branch.assign(n_max + 1, Eigen::MatrixXd::Zero(k, k));
    out.survival = Eigen::VectorXd::Zero(k);
  }

  void run() {
    const int k = sys.num_states();
    for (int b = 0; b < k; ++b) {
      path.assign(1, b);
      weight.assign(1, 1.0);
      ledger.start(sys.energies[b]);
      descend(b);
    }
  }

  // path holds a_0 .. a_d; extending by one proposal closes branch d.
  void descend(int b) {
    const int k = sys.num_states();
    const int n = static_cast<int>(path.size()) - 1;
    for (int next = 0; next < k; ++next) {
      const double pprob = kmat(next, path.back());
      if (pprob == 0.0) continue;
      if (++nodes > max_paths) {
        throw GuardError("path enumeration exceeded " +
                         std::to_string(max_paths) + " nodes");
      }
      const double arg = ledger.advance(sys.energies[next]);
      const double w = weight.back() * pprob;
      const double accept = af.f(arg);
      const double delay = std::exp(-ledger.delay_surprisal());
      out.branch[n](next, b) += w * delay * accept;
      if (n == n_max) {
        out.survival(b) += w * delay * (1.0 - accept);
      } else {
        path.push_back(next);
        weight.push_back(w);
        descend(b);
        weight.pop_back();
        path.pop_back();
      }
      ledger.pop();
    }
  }
};

}  // namespace

ClassicalBranchKernels branch_kernels_upto(const ClassicalSystem& sys,
                                           const ProposalKernel& kernel,
                                           const AcceptanceFunction& af,
                                           int n_max,
                                           std::int64_t max_paths) {
  if (n_max < 0) throw std::invalid_argument("n_max must be non-negative");
  if (kernel.size() != sys.num_states()) {
    throw std::invalid_argument("proposal kernel size does not match state count");
  }
  if (af.temperature() != sys.temperature) {
    throw std::invalid_argument(
        "acceptance function and system disagree on temperature");
  }
  PathEnumerator walk(sys, kernel, af, n_max, max_paths);
  walk.run();
  return std::move(walk.out);
}

DetailedBalanceReport check_classical_db(const ClassicalSystem& sys,
                                         const ProposalKernel& kernel,
                                         const AcceptanceFunction& af,
                                         int n_max,
                                         std::int64_t max_paths) {
  const ClassicalBranchKernels kernels =
      branch_kernels_upto(sys, kernel, af, n_max, max_paths);
  const int k = sys.num_states();

  // Gibbs weights with the ground energy factored out; detailed balance is
  // scale-invariant in the weights so the common factor is irrelevant.
  const double e0 =
      *std::min_element(sys.energies.begin(), sys.energies.end());
  Eigen::VectorXd w(k);
  for (int a = 0; a < k; ++a) {
    w(a) = std::exp(-(sys.energies[a] - e0) / sys.temperature);
  }

  DetailedBalanceReport report;
  for (const Eigen::MatrixXd& kn : kernels.branch) {
    for (int b = 0; b < k; ++b) {
      for (int a = 0; a < k; ++a) {
        const double violation = std::abs(kn(a, b) * w(b) - kn(b, a) * w(a));
        report.max_violation = std::max(report.max_violation, violation);
      }
    }
  }
  for (int b = 0; b < k; ++b) {
    double total = kernels.survival(b);
    for (const Eigen::MatrixXd& kn : kernels.branch) total += kn.col(b).sum();
    report.completeness_residual =
        std::max(report.completeness_residual, std::abs(total - 1.0));
    report.max_survival = std::max(report.max_survival, kernels.survival(b));
  }
  return report;
}

}  // namespace qms
