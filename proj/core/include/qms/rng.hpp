#pragma once

#include <cstdint>
#include <vector>

namespace qms {

// SplitMix64 step; used to expand seeds into PCG initialization material.
std::uint64_t splitmix64(std::uint64_t& state);

// Minimal PCG32 (XSH-RR variant). Small state, solid statistics, and the
// stream selector makes substream derivation cheap and collision-resistant.
class Pcg32 {
 public:
  Pcg32(std::uint64_t initstate, std::uint64_t initseq);

  std::uint32_t next();

 private:
  std::uint64_t state_;
  std::uint64_t inc_;
};

// One RNG substream addressed by (seed, chain, step). Every draw a sampler
// makes at step k of chain c comes from the stream keyed by (seed, c, k), so
// runs are reproducible and chains can be generated independently in any
// order. The draw order inside a step is fixed by the sampler and documented
// next to it.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t chain, std::uint64_t step);

  // Uniform double in [0, 1) with 53 random bits.
  double uniform();

  // Samples an index from non-negative weights (not necessarily normalized).
  // Consumes exactly one uniform. Zero-weight entries are never returned.
  int sample_weights(const std::vector<double>& weights);
  int sample_weights(const double* weights, int n);

 private:
  Pcg32 gen_;
};

}  // namespace qms
