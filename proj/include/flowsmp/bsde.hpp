#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "flowsmp/flow.hpp"

namespace flowsmp {

// Generalized backward equation with interaction on the discrete particle
// and time grid of a simulated forward trajectory:
//
//   -dy(u,t) = f(u, t, y, z(.), M^{y,u}, M^{z,u}) dt - int z(u,t,r) W(dt,dr)
//    y(u,T)  = xi(u)
//
// The interaction measures are pushforwards of mu0 through the maps
// Phi(u,t,v,y(v,t)) and v -> int Psi(u,t,v,r,z(v,t,r)) dr; z lives in the
// working basis, so the r-integral is a functional of the loading vector.
// Atoms are addressed by index so the maps may read the forward filtration.
struct BsdeProblem {
  const FlowTrajectory* forward = nullptr;
  DiscreteMeasure mu0;
  BasisSet basis;

  // xi(atom, terminal measure of the path, terminal state of the atom)
  std::function<double(std::size_t, const DiscreteMeasure&, double)> terminal;

  // f(path, atom, step, y, z loadings, M^y, M^z)
  std::function<double(std::size_t, std::size_t, std::size_t, double,
                       std::span<const double>, const DiscreteMeasure&,
                       const DiscreteMeasure&)>
      driver;

  // image of atom v under Phi(u, t_j, ., y); absent -> zero map
  std::function<double(std::size_t path, std::size_t step, std::size_t atom_u,
                       std::size_t atom_v, double y)>
      phi;
  // r-integrated Psi of atom v's loading vector; absent -> zero map
  std::function<double(std::size_t path, std::size_t step, std::size_t atom_u,
                       std::size_t atom_v, std::span<const double> z)>
      psi_aggregate;

  double lip_driver = 0.0;  // L1 of the driver Lipschitz condition
  double lip_maps = 0.0;    // L2 of the map Lipschitz condition
  int threads = 1;
};

struct BsdeSolution {
  std::size_t paths = 0;
  std::size_t atoms = 0;
  std::size_t modes = 0;
  TimeGrid grid;
  std::vector<double> y;  // [path][atom][node]
  std::vector<double> z;  // [path][atom][step][mode]

  static BsdeSolution zeros(const BsdeProblem& prob);

  double y_at(std::size_t p, std::size_t i, std::size_t j) const {
    return y[(p * atoms + i) * grid.nodes() + j];
  }
  double& y_at(std::size_t p, std::size_t i, std::size_t j) {
    return y[(p * atoms + i) * grid.nodes() + j];
  }
  std::span<const double> z_at(std::size_t p, std::size_t i, std::size_t j) const {
    return {z.data() + ((p * atoms + i) * grid.steps + j) * modes, modes};
  }
  std::span<double> z_at(std::size_t p, std::size_t i, std::size_t j) {
    return {z.data() + ((p * atoms + i) * grid.steps + j) * modes, modes};
  }
};

BsdeSolution solution_difference(const BsdeSolution& a, const BsdeSolution& b);

// Exponentially weighted squared norm: the discrete analogue of
//   E int int e^{bt} |y|^2 dt mu0(du) + E int int int e^{bt} |z|^2 dr dt mu0(du),
// with int |z|^2 dr realized as the Parseval sum over modes.
struct BetaNorm {
  double beta = 0.0;
  double value = 0.0;  // squared norm
};

BetaNorm beta_norm(const BsdeSolution& delta, const DiscreteMeasure& mu0,
                   double beta);

// One application of the Picard map I:(y,z) -> (Y,Z): a backward sweep of
// regression-based conditional expectations against the forward filtration,
// with the interaction measures frozen at the previous iterate.
BsdeSolution picard_step(const BsdeSolution& prev, const BsdeProblem& prob);

struct PicardIteration {
  std::size_t iter = 0;
  double delta_beta_norm = 0.0;  // squared beta-norm of the update
  double ratio = 0.0;            // quotient of successive deltas
};

struct SolveReport {
  std::vector<PicardIteration> history;
  bool converged = false;
  double beta = 0.0;
  std::string warning;
};

// Picard iteration from (0,0) until the beta-norm of the update falls
// below tol. Passing beta <= 0 selects 2 L1 (1+L2) (T+1).
std::pair<BsdeSolution, SolveReport> solve(const BsdeProblem& prob, double beta,
                                           double tol, std::size_t max_iter);

// Sampled checks of the declared Lipschitz constants; each returns the
// worst observed ratio (|delta|^2 over the matching R^2 bound).
double driver_lipschitz_probe(const BsdeProblem& prob, std::size_t samples,
                              std::uint64_t seed);
double maps_lipschitz_probe(const BsdeProblem& prob, std::size_t samples,
                            std::uint64_t seed);

// Adapter for pointwise-in-r interaction maps: realizes
//   v -> int Psi(u, t, v, r, z(v,t,r)) dr
// by quadrature over the basis table with z(r) = sum_k z_k e_k(r).
std::function<double(std::size_t, std::size_t, std::size_t, std::size_t,
                     std::span<const double>)>
psi_pointwise_aggregate(
    std::function<double(double u, double t, double v, double r, double z)> psi,
    const DiscreteMeasure& mu0, const TimeGrid& grid, const BasisSet& basis);

std::string iteration_report_json(const SolveReport& report);
void write_solution_csv(const std::string& file, const BsdeSolution& sol,
                        const TimeGrid& grid);

}  // namespace flowsmp
