#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flowsmp/model.hpp"
#include "flowsmp/sheet.hpp"
#include "flowsmp/time_grid.hpp"

namespace flowsmp {

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Control values per time node. Deterministic open-loop by default; the
// per-path adapted table is experimental.
struct ControlPath {
  std::vector<double> values;
  std::optional<std::vector<std::vector<double>>> adapted;
  std::optional<std::pair<double, double>> box;

  static ControlPath constant(double a, std::size_t steps);

  double at(std::size_t path, std::size_t step) const {
    if (adapted) return (*adapted)[path][step];
    return values[step];
  }
  void clamp();
  void validate(std::size_t steps) const;
};

// Heavy-point positions X[path][atom][node] under a control, plus the seed
// provenance needed to replay the identical sheet increments.
struct FlowTrajectory {
  TimeGrid grid;
  std::vector<double> initial;  // u_i
  std::vector<double> weights;  // p_i
  std::size_t paths = 0;
  std::size_t atoms = 0;
  std::size_t modes = 0;
  std::uint64_t seed = 0;
  bool seeded = true;  // false when simulated from explicit sheets
  ControlPath control;
  std::vector<double> states;
  double min_captured = 1.0;  // worst loading resolution seen

  double at(std::size_t p, std::size_t i, std::size_t j) const {
    return states[(p * atoms + i) * grid.nodes() + j];
  }
  double& at(std::size_t p, std::size_t i, std::size_t j) {
    return states[(p * atoms + i) * grid.nodes() + j];
  }
  DiscreteMeasure cross_section(std::size_t p, std::size_t j) const;
};

struct VariationalTrajectory {
  TimeGrid grid;
  std::size_t paths = 0;
  std::size_t atoms = 0;
  ControlPath direction;
  std::vector<double> values;

  double at(std::size_t p, std::size_t i, std::size_t j) const {
    return values[(p * atoms + i) * grid.nodes() + j];
  }
  double& at(std::size_t p, std::size_t i, std::size_t j) {
    return values[(p * atoms + i) * grid.nodes() + j];
  }
};

struct SimulateOptions {
  std::size_t paths = 1000;
  std::uint64_t seed = 0;
  int threads = 1;
  // optional prescribed increments (one sheet per path), for refinement
  // protocols; disables seed provenance
  const std::vector<SheetPath>* sheets = nullptr;
};

// Explicit Euler on the heavy-point system: the empirical measure is frozen
// at the left endpoint of each step and all atoms of a path share the same
// sheet increments.
FlowTrajectory simulate(const DiscreteMeasure& mu0, const CoefficientSet& set,
                        const ControlPath& alpha, const TimeGrid& grid,
                        const BasisSet& basis, const SimulateOptions& opt);

// Euler scheme for the first-variation process V along the base trajectory,
// driven by the replayed increments of the base. V(u, 0) = 0.
VariationalTrajectory simulate_variational(const FlowTrajectory& base,
                                           const CoefficientSet& set,
                                           const ControlPath& beta,
                                           const BasisSet& basis,
                                           int threads = 1);

struct CostReport {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t paths = 0;
  double dt = 0.0;
};

// Monte Carlo cost: left Riemann sum of f plus terminal g, averaged over
// paths, with the cross-path standard error.
CostReport cost(const FlowTrajectory& traj, const CoefficientSet& set,
                const ControlPath& alpha, int threads = 1);

void write_trajectory_csv(const std::string& file, const FlowTrajectory& traj);
std::string cost_report_json(const CostReport& report);

}  // namespace flowsmp
