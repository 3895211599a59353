#include "fracstick/solver.hpp"

#include "fracstick/errors.hpp"
#include "fracstick/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace fracstick {

void SolverConfig::validate(double h) const {
  if (!(tolerance > 0.0)) throw ConfigError("solver: tolerance must be positive");
  if (max_iterations < 0) throw ConfigError("solver: max_iterations must be non-negative");
  if (!(damping > 0.0 && damping <= 1.0)) throw ConfigError("solver: damping must lie in (0, 1]");
  if (!(R >= 4.0 * h * (1 - 1e-12))) throw ResolutionError("solver: R must be at least 4h");
  if (batch < 1) throw ConfigError("solver: batch must be positive");
  if (divergence_window < 1) throw ConfigError("solver: divergence window must be positive");
}

std::vector<double> nearest_exterior_fill(const GraphFunction& u) {
  const Grid& g = u.grid;
  std::vector<std::size_t> outside;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (!u.interior[i]) outside.push_back(i);
  std::vector<double> out = u.values;
  if (outside.empty()) return out;
  parallel_for(g.size(), [&](std::size_t i) {
    if (!u.interior[i]) return;
    const auto c = g.coords(i);
    long best = -1, best_d = 0;
    for (std::size_t k : outside) {
      const auto o = g.coords(k);
      const long d = static_cast<long>(o[0] - c[0]) * (o[0] - c[0]) + static_cast<long>(o[1] - c[1]) * (o[1] - c[1]);
      if (best < 0 || d < best_d) {
        best = static_cast<long>(k);
        best_d = d;
      }
    }
    out[i] = u.values[static_cast<std::size_t>(best)];
  });
  return out;
}

namespace {

struct Residual {
  double max = 0.0, l2 = 0.0;
};

Residual residual(const GraphCurvatureOperator& op, const std::vector<std::size_t>& nodes, std::vector<double>& H) {
  H.resize(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t k) { H[k] = op.curvature(nodes[k]); });
  Residual r;
  for (double v : H) {
    r.max = std::max(r.max, std::fabs(v));
    r.l2 += v * v;
  }
  r.l2 = std::sqrt(r.l2 / std::max<std::size_t>(1, nodes.size()));
  return r;
}

void check_margin(const GraphFunction& u) {
  const Grid& g = u.grid;
  double width = g.h * (g.count[0] - 1);
  if (g.dim == 2) width = std::min(width, g.h * (g.count[1] - 1));
  const int margin = static_cast<int>(std::ceil(0.25 * width / g.h - 1e-9));
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!u.interior[i]) continue;
    const auto c = g.coords(i);
    bool ok = c[0] >= margin && c[0] <= g.count[0] - 1 - margin;
    if (g.dim == 2) ok = ok && c[1] >= margin && c[1] <= g.count[1] - 1 - margin;
    if (!ok) throw PreconditionError("solver: the grid must cover omega with a margin of a quarter box");
  }
}

}  // namespace

SolveResult solve_minimal_graph(const PlanarDomain& domain, std::shared_ptr<const Datum> psi,
                                const FractionalParams& params, const Grid& grid, const SolverConfig& config) {
  if (!psi || !psi->bounded()) throw DomainError("solver: the exterior datum must be bounded");
  if (domain.dim() != grid.dim) throw PreconditionError("solver: domain and grid dimensions differ");
  GraphFunction u = GraphFunction::on_domain(domain, std::move(psi), grid);
  u.values = nearest_exterior_fill(u);
  return solve_minimal_graph(std::move(u), params, config);
}

SolveResult solve_minimal_graph(GraphFunction u, const FractionalParams& params, const SolverConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  params.validate();
  if (!u.datum || !u.datum->bounded()) throw DomainError("solver: the exterior datum must be bounded");
  config.validate(u.grid.h);
  check_margin(u);
  const Grid& g = u.grid;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (!u.interior[i]) u.values[i] = (*u.datum)(g.node(i));

  std::vector<std::size_t> nodes;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (u.interior[i]) nodes.push_back(i);

  GraphCurvatureOperator op(g, u.datum, u.interior, params, config.R, config.curvature);
  op.load(u.values);
  const double lo = u.datum->lower(), hi = u.datum->upper();

  SolveResult out;
  SolveReport& rep = out.report;
  std::vector<double> H;
  Residual res = residual(op, nodes, H);
  rep.residual_trace.push_back(res.max);
  auto record_energy = [&](int it) {
    if (config.energy_every > 0 && it % config.energy_every == 0)
      rep.energy_trace.emplace_back(it, op.lattice_energy(u.interior));
  };
  record_energy(0);

  const std::size_t batch = static_cast<std::size_t>(config.batch);
  std::vector<GraphCurvatureOperator::Local> scratch(batch);
  std::vector<double> next(batch);
  double eta = config.damping;
  const double step = std::pow(g.h, 1.0 + params.s);
  int rising = 0;
  int it = 0;
  std::vector<double> best = u.values;
  double best_res = res.max;
  Residual best_r = res;

  while (res.max > config.tolerance && it < config.max_iterations) {
    ++it;
    if (config.scheme == Scheme::NodewiseRoot) {
      const double node_tol = 0.1 * config.tolerance;
      for (std::size_t b0 = 0; b0 < nodes.size(); b0 += batch) {
        const std::size_t m = std::min(batch, nodes.size() - b0);
        parallel_for(m, [&](std::size_t k) {
          const std::size_t node = nodes[b0 + k];
          next[k] = op.solve_node(node, lo, hi, op.value(node), node_tol, scratch[k]);
        });
        for (std::size_t k = 0; k < m; ++k) op.set_value(nodes[b0 + k], next[k]);
      }
    } else {
      // explicit step with back-off on residual growth
      std::vector<double> trial(nodes.size());
      for (;;) {
        for (std::size_t k = 0; k < nodes.size(); ++k) trial[k] = op.value(nodes[k]) - eta * step * H[k];
        std::vector<double> saved(nodes.size());
        for (std::size_t k = 0; k < nodes.size(); ++k) {
          saved[k] = op.value(nodes[k]);
          op.set_value(nodes[k], trial[k]);
        }
        std::vector<double> Ht;
        const Residual rt = residual(op, nodes, Ht);
        if (rt.max <= res.max || eta < 1e-6) break;
        for (std::size_t k = 0; k < nodes.size(); ++k) op.set_value(nodes[k], saved[k]);
        eta *= 0.5;
      }
    }
    const Residual prev = res;
    res = residual(op, nodes, H);
    rep.residual_trace.push_back(res.max);
    for (std::size_t k = 0; k < nodes.size(); ++k) u.values[nodes[k]] = op.value(nodes[k]);
    record_energy(it);
    if (res.max < best_res) {
      best_res = res.max;
      best_r = res;
      best = u.values;
    }
    rising = res.max > prev.max ? rising + 1 : 0;
    if (rising >= config.divergence_window)
      throw DivergedError("solver: residual grew for " + std::to_string(rising) + " consecutive iterations",
                          rep.residual_trace);
  }

  rep.iterations = it;
  rep.converged = best_res <= config.tolerance;
  if (best_res < res.max) {
    u.values = best;
    res = best_r;
  }
  rep.residual_max = res.max;
  rep.residual_l2 = res.l2;
  rep.damping = eta;
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  out.u = std::move(u);
  return out;
}

ComparisonReport comparison_check(const GraphFunction& u1, const GraphFunction& u2) {
  if (!u1.grid.same_as(u2.grid)) throw PreconditionError("comparison_check: grids differ");
  if (u1.interior != u2.interior) throw PreconditionError("comparison_check: omega masks differ");
  ComparisonReport rep;
  rep.max_violation = -INFINITY;
  for (std::size_t i = 0; i < u1.values.size(); ++i) {
    if (!u1.interior[i]) {
      if (u1.values[i] > u2.values[i]) throw PreconditionError("comparison_check: exterior data are not ordered");
      continue;
    }
    ++rep.nodes;
    const double d = u1.values[i] - u2.values[i];
    if (d > rep.max_violation) {
      rep.max_violation = d;
      rep.worst_node = i;
    }
  }
  if (rep.nodes == 0) rep.max_violation = 0.0;
  return rep;
}

SubsolutionReport subsolution_check(const GraphFunction& u, const GraphFunction& v, double tolerance) {
  if (!u.grid.same_as(v.grid)) throw PreconditionError("subsolution_check: grids differ");
  SubsolutionReport rep;
  rep.tolerance = tolerance;
  rep.max_deficit = -INFINITY;
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    if (!u.interior[i]) continue;
    const double d = v.values[i] - u.values[i];
    if (d > rep.max_deficit) {
      rep.max_deficit = d;
      rep.worst_node = i;
    }
    if (d > tolerance) ++rep.violations;
  }
  if (!std::isfinite(rep.max_deficit)) rep.max_deficit = 0.0;
  return rep;
}

}  // namespace fracstick
