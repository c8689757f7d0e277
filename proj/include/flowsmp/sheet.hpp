#pragma once

#include <cstdint>
#include <string>

#include "flowsmp/basis.hpp"
#include "flowsmp/time_grid.hpp"

namespace flowsmp {

// One realization of the truncated Brownian-sheet increments
// dw_k(t_j) ~ N(0, dt), row-major K x M. Regenerating with the same
// (seed, path_index) reproduces the array bit-exactly.
struct SheetPath {
  std::uint64_t seed = 0;
  std::uint64_t path_index = 0;
  TimeGrid grid;
  std::size_t modes = 0;
  std::vector<double> increments;

  double at(std::size_t k, std::size_t j) const {
    return increments[k * grid.steps + j];
  }
};

// Single increment, addressable without materializing the path.
double sheet_increment(std::uint64_t seed, std::uint64_t path, std::size_t mode,
                       std::size_t step, double dt);

SheetPath sample_sheet(const TimeGrid& grid, std::size_t modes,
                       std::uint64_t seed, std::uint64_t path_index = 0);

// Discrete stochastic integral sum_j sum_k g_k(t_j) dw_k(t_j).
double ito_integral(const LoadingPath& loadings, const SheetPath& sheet);

// Pairwise-sums adjacent increments, halving the step count; the coarse
// path carries the same sheet realization on the coarser grid.
SheetPath coarsen(const SheetPath& fine);

// Regression-fixture dump: "SHT1", K, M (little-endian u64), T (f64),
// then row-major K x M doubles.
void write_sheet(const std::string& file, const SheetPath& sheet);
SheetPath read_sheet(const std::string& file);

}  // namespace flowsmp
