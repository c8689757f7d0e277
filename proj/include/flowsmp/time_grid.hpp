#pragma once

#include <cstddef>
#include <stdexcept>

namespace flowsmp {

// Uniform grid t_j = j*T/M on [0, T].
struct TimeGrid {
  double horizon = 1.0;
  std::size_t steps = 1;

  TimeGrid() = default;
  TimeGrid(double T, std::size_t M) : horizon(T), steps(M) {
    if (!(T > 0.0)) throw std::invalid_argument("TimeGrid: horizon must be positive");
    if (M == 0) throw std::invalid_argument("TimeGrid: step count must be positive");
  }

  double dt() const { return horizon / static_cast<double>(steps); }
  double node(std::size_t j) const { return static_cast<double>(j) * dt(); }
  std::size_t nodes() const { return steps + 1; }
};

}  // namespace flowsmp
