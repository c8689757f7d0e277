#include "flowsmp/flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "flowsmp/counter_rng.hpp"
#include "flowsmp/parallel.hpp"

namespace flowsmp {

ControlPath ControlPath::constant(double a, std::size_t steps) {
  ControlPath path;
  path.values.assign(steps, a);
  return path;
}

void ControlPath::clamp() {
  if (!box) return;
  auto clip = [this](double v) { return std::clamp(v, box->first, box->second); };
  for (auto& v : values) v = clip(v);
  if (adapted)
    for (auto& row : *adapted)
      for (auto& v : row) v = clip(v);
}

void ControlPath::validate(std::size_t steps) const {
  if (values.size() != steps)
    throw std::invalid_argument("ControlPath: expected one value per time step");
  for (double v : values)
    if (!std::isfinite(v)) throw std::invalid_argument("ControlPath: non-finite value");
  if (box) {
    for (double v : values)
      if (v < box->first - 1e-12 || v > box->second + 1e-12)
        throw std::invalid_argument("ControlPath: value outside admissible box");
  }
  if (adapted)
    for (const auto& row : *adapted)
      if (row.size() != steps)
        throw std::invalid_argument("ControlPath: adapted table shape mismatch");
}

DiscreteMeasure FlowTrajectory::cross_section(std::size_t p, std::size_t j) const {
  DiscreteMeasure mu;
  mu.weights = weights;
  mu.atoms.resize(atoms);
  for (std::size_t i = 0; i < atoms; ++i) mu.atoms[i] = at(p, i, j);
  return mu;
}

FlowTrajectory simulate(const DiscreteMeasure& mu0, const CoefficientSet& set,
                        const ControlPath& alpha, const TimeGrid& grid,
                        const BasisSet& basis, const SimulateOptions& opt) {
  if (opt.paths == 0) throw std::invalid_argument("simulate: need at least one path");
  alpha.validate(grid.steps);
  if (opt.sheets && opt.sheets->size() != opt.paths)
    throw std::invalid_argument("simulate: need one sheet per path");

  const std::size_t n = mu0.size();
  const std::size_t M = grid.steps;
  const std::size_t K = basis.size;
  const double dt = grid.dt();

  FlowTrajectory traj;
  traj.grid = grid;
  traj.initial = mu0.atoms;
  traj.weights = mu0.weights;
  traj.paths = opt.paths;
  traj.atoms = n;
  traj.modes = K;
  traj.seed = opt.seed;
  traj.seeded = opt.sheets == nullptr;
  traj.control = alpha;
  traj.states.resize(opt.paths * n * grid.nodes());

  // factored diffusion: the spatial profile depends on time only, so its
  // loadings are shared by every path and atom
  LoadingPath phi(K, M);
  double phi_captured = 1.0;
  if (set.sigma_is_factored) {
    std::vector<double> buf(K);
    for (std::size_t j = 0; j < M; ++j) {
      set.phi_loadings(grid.node(j), basis, buf);
      double phi_sq = 0.0;
      for (std::size_t k = 0; k < K; ++k) {
        phi.at(k, j) = buf[k];
        phi_sq += buf[k] * buf[k];
      }
      if (set.phi_norm_sq > 0.0)
        phi_captured = std::min(phi_captured, phi_sq / set.phi_norm_sq);
    }
  }

  std::vector<double> captured(opt.paths, 1.0);

  parallel_blocks(opt.paths, opt.threads, [&](std::size_t lo, std::size_t hi) {
    std::vector<double> dw(K), loadings(K);
    for (std::size_t p = lo; p < hi; ++p) {
      for (std::size_t i = 0; i < n; ++i) traj.at(p, i, 0) = mu0.atoms[i];
      double worst = 1.0;
      for (std::size_t j = 0; j < M; ++j) {
        const double t = grid.node(j);
        const double a = alpha.at(p, j);
        const DiscreteMeasure mu_j = traj.cross_section(p, j);
        for (std::size_t k = 0; k < K; ++k)
          dw[k] = opt.sheets ? (*opt.sheets)[p].at(k, j)
                             : sheet_increment(opt.seed, p, k, j, dt);
        if (set.sigma_is_factored) {
          double phi_dw = 0.0;
          for (std::size_t k = 0; k < K; ++k) phi_dw += phi.at(k, j) * dw[k];
          for (std::size_t i = 0; i < n; ++i) {
            const double x = traj.at(p, i, j);
            const double next = x + set.b(t, x, mu_j, a) * dt +
                                set.s(t, x, mu_j, a) * phi_dw;
            if (!std::isfinite(next))
              throw NumericalError("simulate: non-finite state at step " +
                                   std::to_string(j) + ", atom " + std::to_string(i));
            traj.at(p, i, j + 1) = next;
          }
        } else {
          for (std::size_t i = 0; i < n; ++i) {
            const double x = traj.at(p, i, j);
            worst = std::min(worst, set.sigma_loadings(t, x, mu_j, a, basis, loadings));
            double noise = 0.0;
            for (std::size_t k = 0; k < K; ++k) noise += loadings[k] * dw[k];
            const double next = x + set.b(t, x, mu_j, a) * dt + noise;
            if (!std::isfinite(next))
              throw NumericalError("simulate: non-finite state at step " +
                                   std::to_string(j) + ", atom " + std::to_string(i));
            traj.at(p, i, j + 1) = next;
          }
        }
      }
      captured[p] = worst;
    }
  });

  traj.min_captured = set.sigma_is_factored
                          ? phi_captured
                          : *std::min_element(captured.begin(), captured.end());
  return traj;
}

VariationalTrajectory simulate_variational(const FlowTrajectory& base,
                                           const CoefficientSet& set,
                                           const ControlPath& beta,
                                           const BasisSet& basis, int threads) {
  if (!base.seeded)
    throw std::invalid_argument(
        "simulate_variational: base lacks seed provenance, increments cannot be replayed");
  beta.validate(base.grid.steps);

  const std::size_t n = base.atoms;
  const std::size_t M = base.grid.steps;
  const std::size_t K = base.modes;
  const double dt = base.grid.dt();

  VariationalTrajectory var;
  var.grid = base.grid;
  var.paths = base.paths;
  var.atoms = n;
  var.direction = beta;
  var.values.assign(base.paths * n * base.grid.nodes(), 0.0);

  LoadingPath phi(K, M);
  if (set.sigma_is_factored) {
    std::vector<double> buf(K);
    for (std::size_t j = 0; j < M; ++j) {
      set.phi_loadings(base.grid.node(j), basis, buf);
      for (std::size_t k = 0; k < K; ++k) phi.at(k, j) = buf[k];
    }
  }

  parallel_blocks(base.paths, threads, [&](std::size_t lo, std::size_t hi) {
    std::vector<double> dw(K), load_x(K), load_a(K), load_mu(K);
    std::vector<double> v_now(n), v_next(n);
    for (std::size_t p = lo; p < hi; ++p) {
      std::fill(v_now.begin(), v_now.end(), 0.0);
      for (std::size_t j = 0; j < M; ++j) {
        const double t = base.grid.node(j);
        const double a = base.control.at(p, j);
        const double bta = beta.at(p, j);
        const DiscreteMeasure mu_j = base.cross_section(p, j);
        for (std::size_t k = 0; k < K; ++k)
          dw[k] = sheet_increment(base.seed, p, k, j, dt);

        double phi_dw = 0.0;
        if (set.sigma_is_factored)
          for (std::size_t k = 0; k < K; ++k) phi_dw += phi.at(k, j) * dw[k];

        for (std::size_t i = 0; i < n; ++i) {
          const double x = base.at(p, i, j);
          double drift = set.b_x(t, x, mu_j, a) * v_now[i] +
                         set.b_alpha(t, x, mu_j, a) * bta;
          for (std::size_t l = 0; l < n; ++l)
            drift += base.weights[l] * set.b_mu(t, x, mu_j, a, mu_j.atoms[l]) * v_now[l];

          double noise;
          if (set.sigma_is_factored) {
            double factor = set.s_x(t, x, mu_j, a) * v_now[i] +
                            set.s_alpha(t, x, mu_j, a) * bta;
            for (std::size_t l = 0; l < n; ++l)
              factor += base.weights[l] * set.s_mu(t, x, mu_j, a, mu_j.atoms[l]) * v_now[l];
            noise = factor * phi_dw;
          } else {
            set.sigma_x_loadings(t, x, mu_j, a, basis, load_x);
            set.sigma_alpha_loadings(t, x, mu_j, a, basis, load_a);
            double acc_x = 0.0, acc_a = 0.0;
            for (std::size_t k = 0; k < K; ++k) {
              acc_x += load_x[k] * dw[k];
              acc_a += load_a[k] * dw[k];
            }
            noise = acc_x * v_now[i] + acc_a * bta;
            for (std::size_t l = 0; l < n; ++l) {
              set.sigma_mu_loadings(t, x, mu_j, a, mu_j.atoms[l], basis, load_mu);
              double acc_mu = 0.0;
              for (std::size_t k = 0; k < K; ++k) acc_mu += load_mu[k] * dw[k];
              noise += base.weights[l] * acc_mu * v_now[l];
            }
          }
          v_next[i] = v_now[i] + drift * dt + noise;
        }
        for (std::size_t i = 0; i < n; ++i) {
          var.at(p, i, j + 1) = v_next[i];
          v_now[i] = v_next[i];
        }
      }
    }
  });
  return var;
}

CostReport cost(const FlowTrajectory& traj, const CoefficientSet& set,
                const ControlPath& alpha, int threads) {
  alpha.validate(traj.grid.steps);
  const double dt = traj.grid.dt();
  std::vector<double> per_path(traj.paths, 0.0);

  parallel_blocks(traj.paths, threads, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t p = lo; p < hi; ++p) {
      double acc = 0.0;
      for (std::size_t j = 0; j < traj.grid.steps; ++j)
        acc += set.f(traj.grid.node(j), traj.cross_section(p, j), alpha.at(p, j)) * dt;
      acc += set.g(traj.cross_section(p, traj.grid.steps));
      per_path[p] = acc;
    }
  });

  double mean = 0.0;
  for (double v : per_path) mean += v;
  mean /= static_cast<double>(traj.paths);
  double var = 0.0;
  for (double v : per_path) var += (v - mean) * (v - mean);
  var = traj.paths > 1 ? var / static_cast<double>(traj.paths - 1) : 0.0;

  CostReport report;
  report.mean = mean;
  report.stderr_ = std::sqrt(var / static_cast<double>(traj.paths));
  report.paths = traj.paths;
  report.dt = dt;
  return report;
}

void write_trajectory_csv(const std::string& file, const FlowTrajectory& traj) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("write_trajectory_csv: cannot open " + file);
  out << "path,atom,time,state\n";
  char buf[96];
  for (std::size_t p = 0; p < traj.paths; ++p)
    for (std::size_t i = 0; i < traj.atoms; ++i)
      for (std::size_t j = 0; j < traj.grid.nodes(); ++j) {
        std::snprintf(buf, sizeof(buf), "%zu,%zu,%.17g,%.17g\n", p, i,
                      traj.grid.node(j), traj.at(p, i, j));
        out << buf;
      }
}

std::string cost_report_json(const CostReport& report) {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "{\"mean\": %.17g, \"stderr\": %.17g, \"paths\": %zu, \"dt\": %.17g}",
                report.mean, report.stderr_, report.paths, report.dt);
  return buf;
}

}  // namespace flowsmp
