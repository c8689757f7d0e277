#include "flowsmp/sheet.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "flowsmp/counter_rng.hpp"

namespace flowsmp {

double sheet_increment(std::uint64_t seed, std::uint64_t path, std::size_t mode,
                       std::size_t step, double dt) {
  return std::sqrt(dt) * rng::normal(seed, path, mode, step);
}

SheetPath sample_sheet(const TimeGrid& grid, std::size_t modes,
                       std::uint64_t seed, std::uint64_t path_index) {
  if (modes == 0) throw std::invalid_argument("sample_sheet: need at least one mode");
  SheetPath sheet;
  sheet.seed = seed;
  sheet.path_index = path_index;
  sheet.grid = grid;
  sheet.modes = modes;
  sheet.increments.resize(modes * grid.steps);
  const double dt = grid.dt();
  for (std::size_t k = 0; k < modes; ++k)
    for (std::size_t j = 0; j < grid.steps; ++j)
      sheet.increments[k * grid.steps + j] =
          sheet_increment(seed, path_index, k, j, dt);
  return sheet;
}

double ito_integral(const LoadingPath& loadings, const SheetPath& sheet) {
  if (loadings.modes != sheet.modes || loadings.steps != sheet.grid.steps)
    throw std::invalid_argument("ito_integral: loading/sheet shape mismatch");
  double acc = 0.0;
  for (std::size_t k = 0; k < loadings.modes; ++k)
    for (std::size_t j = 0; j < loadings.steps; ++j)
      acc += loadings.at(k, j) * sheet.at(k, j);
  return acc;
}

SheetPath coarsen(const SheetPath& fine) {
  if (fine.grid.steps % 2 != 0)
    throw std::invalid_argument("coarsen: step count must be even");
  SheetPath coarse;
  coarse.seed = fine.seed;
  coarse.path_index = fine.path_index;
  coarse.grid = TimeGrid(fine.grid.horizon, fine.grid.steps / 2);
  coarse.modes = fine.modes;
  coarse.increments.resize(coarse.modes * coarse.grid.steps);
  for (std::size_t k = 0; k < fine.modes; ++k)
    for (std::size_t j = 0; j < coarse.grid.steps; ++j)
      coarse.increments[k * coarse.grid.steps + j] =
          fine.at(k, 2 * j) + fine.at(k, 2 * j + 1);
  return coarse;
}

namespace {

void put_u64(std::ofstream& out, std::uint64_t v) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(v >> (8 * i));
  out.write(reinterpret_cast<const char*>(buf), 8);
}

void put_f64(std::ofstream& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u64(out, bits);
}

std::uint64_t get_u64(std::ifstream& in) {
  unsigned char buf[8];
  in.read(reinterpret_cast<char*>(buf), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[i]) << (8 * i);
  return v;
}

double get_f64(std::ifstream& in) {
  const std::uint64_t bits = get_u64(in);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

}  // namespace

void write_sheet(const std::string& file, const SheetPath& sheet) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw std::runtime_error("write_sheet: cannot open " + file);
  out.write("SHT1", 4);
  put_u64(out, sheet.modes);
  put_u64(out, sheet.grid.steps);
  put_f64(out, sheet.grid.horizon);
  for (double v : sheet.increments) put_f64(out, v);
  if (!out) throw std::runtime_error("write_sheet: write failed on " + file);
}

SheetPath read_sheet(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("read_sheet: cannot open " + file);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, "SHT1", 4) != 0)
    throw std::runtime_error("read_sheet: bad magic in " + file);
  SheetPath sheet;
  sheet.modes = get_u64(in);
  const std::uint64_t steps = get_u64(in);
  const double horizon = get_f64(in);
  sheet.grid = TimeGrid(horizon, steps);
  sheet.increments.resize(sheet.modes * steps);
  for (double& v : sheet.increments) v = get_f64(in);
  if (!in) throw std::runtime_error("read_sheet: truncated file " + file);
  return sheet;
}

}  // namespace flowsmp
