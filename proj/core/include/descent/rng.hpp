#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "descent/linalg.hpp"

namespace descent {

// Deterministic random source for Monte-Carlo runs. Backed by mt19937_64,
// whose output sequence is fixed by the C++ standard; all derived variates are
// computed here rather than through <random> distributions, whose algorithms
// are implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on the open interval (0, 1).
  double uniform_open();
  // Circular complex Gaussian with E z = 0 and E |z|^2 = variance.
  Complex circular_gaussian(double variance);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

// Seed of an independent substream for (base_seed, tag, index).
std::uint64_t derive_stream_seed(std::uint64_t base_seed, std::uint64_t tag, std::uint64_t index);

// FNV-1a; turns a case label into a stream tag.
std::uint64_t stream_tag(std::string_view label);

}  // namespace descent
