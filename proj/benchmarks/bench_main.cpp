// Microbenchmarks for the hot paths: single sampler updates, the two
// measurement back ends, the branch oracle, and series statistics.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "qms/classical.hpp"
#include "qms/gqpe.hpp"
#include "qms/models.hpp"
#include "qms/quantum.hpp"
#include "qms/rng.hpp"
#include "qms/stats.hpp"

namespace {

using qms::AcceptanceFunction;
using qms::ClassicalSystem;
using qms::GqpeConfig;
using qms::LocalObservable;
using qms::ProposalKernel;
using qms::RngStream;
using qms::SpectralHamiltonian;

void BM_ClassicalStep(benchmark::State& state) {
  const ClassicalSystem sys = qms::classical_ising(3, 3, 1.0, 0.0, true, 3.0);
  const ProposalKernel kernel = ProposalKernel::single_bit_flip(9);
  const AcceptanceFunction af(0.05, 3.0);
  int a = 0;
  std::uint64_t step = 0;
  for (auto _ : state) {
    RngStream rng(17, 0, step++);
    const auto rec = qms::classical_step(sys, kernel, af, a, rng, 1000000);
    a = rec.output_state;
    benchmark::DoNotOptimize(a);
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ClassicalStep);

struct QuantumFixture {
  SpectralHamiltonian h =
      qms::build_spectral(qms::tfim_hamiltonian(2, 1.0, 0.5, false));
  LocalObservable b{2, 2, Eigen::MatrixXcd::Identity(2, 2),
                    (Eigen::VectorXd(2) << 1.0, -1.0).finished()};
  ProposalKernel kernel = ProposalKernel::uniform_offdiagonal(2);
  AcceptanceFunction af{0.05, 1.0};
  // z = 24 keeps walk lengths short; coarser grids occasionally measure an
  // initial frequency below the whole spectrum, and those walks run until
  // the branch cap.
  GqpeConfig cfg = qms::plan_resources(1e-2, h.e_max(), 1.0, 24.0);
};

void BM_QuantumStepDirect(benchmark::State& state) {
  const QuantumFixture fx;
  const qms::DirectPovmBackend backend(fx.h, fx.cfg);
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Identity(4, 4) / 4.0;
  std::uint64_t step = 0;
  for (auto _ : state) {
    RngStream rng(18, 0, step++);
    const Eigen::MatrixXcd before = rho;
    try {
      const auto rec = qms::quantum_step(rho, fx.h, fx.b, fx.kernel, fx.af,
                                         fx.cfg, backend, rng, 10000);
      benchmark::DoNotOptimize(rec.branches);
    } catch (const qms::QuantumTruncationError&) {
      rho = before;
    }
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_QuantumStepDirect);

void BM_DirectPovmDistribution(benchmark::State& state) {
  const QuantumFixture fx;
  const qms::DirectPovmBackend backend(fx.h, fx.cfg);
  const Eigen::MatrixXcd rho = qms::gibbs_state(fx.h, 1.0).entries();
  for (auto _ : state) {
    benchmark::DoNotOptimize(backend.outcome_distribution(rho));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_DirectPovmDistribution);

void BM_CircuitDistribution(benchmark::State& state) {
  const QuantumFixture fx;
  const qms::CircuitBackend backend(fx.h, fx.cfg);
  const Eigen::MatrixXcd rho = qms::gibbs_state(fx.h, 1.0).entries();
  for (auto _ : state) {
    benchmark::DoNotOptimize(backend.outcome_distribution(rho));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_CircuitDistribution);

void BM_BranchSuperoperators(benchmark::State& state) {
  const SpectralHamiltonian h = qms::build_spectral(qms::pauli_z());
  const LocalObservable b(2, 1, Eigen::MatrixXcd::Identity(2, 2),
                          (Eigen::VectorXd(2) << 1.0, -1.0).finished());
  const ProposalKernel kernel = ProposalKernel::uniform_offdiagonal(2);
  const AcceptanceFunction af(0.05, 1.0);
  const GqpeConfig cfg = qms::plan_resources(1e-2, 1.0, 1.0);
  const int n_max = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        qms::branch_superoperators_upto(h, b, kernel, af, cfg, n_max));
  }
}
BENCHMARK(BM_BranchSuperoperators)->Arg(1)->Arg(2)->Arg(3);

void BM_Estimate(benchmark::State& state) {
  RngStream rng(19, 0, 0);
  const std::size_t n = 100000;
  std::vector<double> series(n);
  double x = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    x = 0.9 * x + (2.0 * rng.uniform() - 1.0);
    series[i] = x;
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(qms::estimate(series));
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_Estimate);

}  // namespace

BENCHMARK_MAIN();
