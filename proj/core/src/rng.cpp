#include "descent/rng.hpp"

#include <cmath>
#include <numbers>

namespace descent {

double Rng::uniform_open() {
  // 53 random mantissa bits, shifted by half an ulp so 0 is never returned.
  const std::uint64_t bits = engine_() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

Complex Rng::circular_gaussian(double variance) {
  // Box-Muller with both outputs: |z|^2 = -variance * ln(u1) is exponential
  // with mean `variance`, and the phase is uniform.
  const double u1 = uniform_open();
  const double u2 = uniform_open();
  const double radius = std::sqrt(-variance * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_stream_seed(std::uint64_t base_seed, std::uint64_t tag, std::uint64_t index) {
  std::uint64_t h = splitmix64(base_seed);
  h = splitmix64(h ^ tag);
  h = splitmix64(h ^ index);
  return h;
}

std::uint64_t stream_tag(std::string_view label) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const char c : label) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace descent
