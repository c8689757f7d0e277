#pragma once

#include <cmath>
#include <cstdint>

namespace flowsmp {

// Stateless counter-based generator. Every draw is a pure function of
// (seed, a, b, c, stream), so increment (path, mode, step) is addressable
// without storing whole paths and results do not depend on evaluation order.
namespace rng {

inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t counter_hash(std::uint64_t seed, std::uint64_t a,
                                  std::uint64_t b, std::uint64_t c,
                                  std::uint64_t stream) {
  std::uint64_t h = mix64(seed ^ 0x243f6a8885a308d3ULL);
  h = mix64(h ^ a);
  h = mix64(h ^ b);
  h = mix64(h ^ c);
  h = mix64(h ^ stream);
  return h;
}

// uniform in (0,1), never exactly 0 or 1
inline double to_unit(std::uint64_t h) {
  return static_cast<double>(h >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

// standard normal via Box-Muller on two counter streams
inline double normal(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                     std::uint64_t c) {
  const double u1 = to_unit(counter_hash(seed, a, b, c, 0));
  const double u2 = to_unit(counter_hash(seed, a, b, c, 1));
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
}

inline double uniform(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                      std::uint64_t c) {
  return to_unit(counter_hash(seed, a, b, c, 2));
}

}  // namespace rng
}  // namespace flowsmp
