#include "qms/rng.hpp"

#include <stdexcept>

namespace qms {

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Pcg32::Pcg32(std::uint64_t initstate, std::uint64_t initseq) {
  state_ = 0u;
  inc_ = (initseq << 1u) | 1u;
  next();
  state_ += initstate;
  next();
}

std::uint32_t Pcg32::next() {
  std::uint64_t old = state_;
  state_ = old * 6364136223846793005ULL + inc_;
  std::uint32_t xorshifted = static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
  std::uint32_t rot = static_cast<std::uint32_t>(old >> 59u);
  return (xorshifted >> rot) | (xorshifted << ((-rot) & 31u));
}

namespace {

// Hash (seed, chain, step) into two 64-bit words for PCG initialization.
std::pair<std::uint64_t, std::uint64_t> derive_key(std::uint64_t seed, std::uint64_t chain,
                                                   std::uint64_t step) {
  std::uint64_t s = seed;
  std::uint64_t a = splitmix64(s);
  s ^= chain * 0x632BE59BD9B4E019ULL;
  std::uint64_t b = splitmix64(s);
  s ^= step * 0xD6E8FEB86659FD93ULL;
  std::uint64_t c = splitmix64(s);
  return {a ^ c, b + (c << 1)};
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t chain, std::uint64_t step)
    : gen_(0, 0) {
  auto [state, seq] = derive_key(seed, chain, step);
  gen_ = Pcg32(state, seq);
}

double RngStream::uniform() {
  std::uint64_t hi = gen_.next();
  std::uint64_t lo = gen_.next();
  std::uint64_t bits = ((hi << 32) | lo) >> 11;
  return static_cast<double>(bits) * 0x1.0p-53;
}

int RngStream::sample_weights(const double* weights, int n) {
  if (n <= 0) throw std::invalid_argument("sample_weights: empty weight vector");
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    if (weights[i] < 0.0) throw std::invalid_argument("sample_weights: negative weight");
    total += weights[i];
  }
  if (total <= 0.0) throw std::runtime_error("sample_weights: all weights vanish");
  double target = uniform() * total;
  double acc = 0.0;
  int last_positive = -1;
  for (int i = 0; i < n; ++i) {
    if (weights[i] <= 0.0) continue;
    last_positive = i;
    acc += weights[i];
    if (target < acc) return i;
  }
  // Rounding pushed the target past the accumulated total; return the last
  // index that carries probability mass.
  return last_positive;
}

int RngStream::sample_weights(const std::vector<double>& weights) {
  return sample_weights(weights.data(), static_cast<int>(weights.size()));
}

}  // namespace qms
