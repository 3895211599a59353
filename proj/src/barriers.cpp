#include "fracstick/barriers.hpp"

#include "fracstick/datum.hpp"
#include "fracstick/errors.hpp"
#include "fracstick/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace fracstick {
namespace {

double norm(const Vec2& x) { return std::hypot(x[0], x[1]); }

double tau_p0(const BarrierSpec& spec, const Vec2& x) {
  return plateau_bump(std::hypot(x[0] - spec.p0[0], x[1] - spec.p0[1]) / spec.bump_radius);
}

std::vector<std::uint8_t> s_mask(const BarrierSpec& spec, const Grid& grid) {
  std::vector<std::uint8_t> mask(grid.size(), 0);
  for (std::size_t i = 0; i < grid.size(); ++i) mask[i] = spec.S.contains(grid.node(i)) ? 1 : 0;
  return mask;
}

std::vector<std::size_t> s_nodes(const std::vector<std::uint8_t>& mask, const Grid& grid) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (mask[i] && grid.strictly_inside(i)) out.push_back(i);
  return out;
}

double max_value(const std::vector<CurvatureSample>& samples) {
  double m = -INFINITY;
  for (const auto& c : samples) m = std::max(m, c.value);
  return m;
}

}  // namespace

void BarrierSpec::validate(const FractionalParams& params, const PlanarDomain* omega) const {
  params.validate();
  if (params.n != 2) throw PreconditionError("barrier: only n = 2 is supported");
  if (!(S.radius > 0.0)) throw PreconditionError("barrier: the tangent disk needs a positive radius");
  if (!(alpha > params.s && alpha < 1.0)) throw PreconditionError("barrier: alpha must lie in (s, 1)");
  const double g = gamma_value(params);
  if (!(g > 0.0 && g < params.s / alpha)) throw PreconditionError("barrier: gamma must lie in (0, s/alpha)");
  if (!(epsilon >= 0.0)) throw PreconditionError("barrier: epsilon must be non-negative");
  const double r = cutoff_radius();
  if (!(r > 0.0 && r <= S.radius)) throw PreconditionError("barrier: rho must lie in (0, radius of S]");
  if (!(bump_radius > 0.0)) throw PreconditionError("barrier: bump radius must be positive");
  if (norm(p0) <= bump_radius + r) throw PreconditionError("barrier: the bump ball meets the support of w");
  if (omega) {
    for (int i = 0; i <= 32; ++i)
      for (int k = 0; k < 128; ++k) {
        const double rr = bump_radius * i / 32.0, th = 2.0 * M_PI * k / 128.0;
        const Vec2 x{p0[0] + rr * std::cos(th), p0[1] + rr * std::sin(th)};
        if (omega->level(x) >= 0.0) throw PreconditionError("barrier: the closed bump ball meets the closure of omega");
      }
    for (int k = 1; k < 256; ++k) {
      const double th = 2.0 * M_PI * k / 256.0;
      const Vec2 x{S.radius * std::sin(th), S.radius * (1.0 - std::cos(th))};
      if (omega->level(x) < 0.0) throw PreconditionError("barrier: the tangent disk is not inside omega");
    }
  }
}

double barrier_w(const BarrierSpec& spec, const Vec2& x) {
  const double rho = spec.cutoff_radius();
  const double q = norm(x) / rho;
  if (q >= 1.0) return 0.0;
  return (x[1] - spec.S.phi(x[0])) * plateau_bump(q);
}

Vec2 barrier_w_gradient(const BarrierSpec& spec, const Vec2& x) {
  const double rho = spec.cutoff_radius();
  const double r = norm(x);
  const double q = r / rho;
  if (q >= 1.0) return {0.0, 0.0};
  const double R = spec.S.radius;
  const double dphi = x[0] / std::sqrt(R * R - x[0] * x[0]);
  const double tau = plateau_bump(q);
  const double g = x[1] - spec.S.phi(x[0]);
  const double dtau = r > 0.0 ? plateau_bump_derivative(q) / (rho * r) : 0.0;
  return {-dphi * tau + g * dtau * x[0], tau + g * dtau * x[1]};
}

double barrier_v(const BarrierSpec& spec, const FractionalParams& params, const Vec2& x) {
  const double eps = spec.epsilon;
  return spec.bump_sign * std::pow(eps, spec.gamma_value(params)) * tau_p0(spec, x) +
         eps * std::max(barrier_w(spec, x), 0.0);
}

double estimate_holder_norm(BarrierSpec& spec, double spacing) {
  const double rho = spec.cutoff_radius();
  if (spacing <= 0.0) spacing = rho / 32.0;
  if (spacing > rho / 8.0) throw ResolutionError("holder estimate: spacing must be at most rho/8");
  const double reach = 1.25 * rho;
  const int K = static_cast<int>(std::ceil(reach / spacing));
  std::vector<Vec2> pts, grads;
  for (int j = -K; j <= K; ++j)
    for (int i = -K; i <= K; ++i) {
      const Vec2 x{i * spacing, j * spacing};
      if (norm(x) > reach) continue;
      pts.push_back(x);
      grads.push_back(barrier_w_gradient(spec, x));
    }
  std::vector<double> best(pts.size(), 0.0);
  parallel_for(pts.size(), [&](std::size_t a) {
    double m = 0.0;
    for (std::size_t b = a + 1; b < pts.size(); ++b) {
      const double d = std::hypot(pts[a][0] - pts[b][0], pts[a][1] - pts[b][1]);
      const double dg = std::hypot(grads[a][0] - grads[b][0], grads[a][1] - grads[b][1]);
      m = std::max(m, dg / std::pow(d, spec.alpha));
    }
    best[a] = m;
  });
  spec.holder_norm = *std::max_element(best.begin(), best.end());
  spec.holder_spacing = spacing;
  return spec.holder_norm;
}

GraphFunction build_w(const BarrierSpec& spec, const Grid& grid) {
  if (grid.dim != 2) throw PreconditionError("build_w: the grid must be two-dimensional");
  if (grid.h > spec.cutoff_radius() / 4.0) throw ResolutionError("build_w: h must be at most rho/4");
  const BarrierSpec copy = spec;
  auto datum = std::make_shared<Datum>();
  const double bound = 2.0 * spec.cutoff_radius();
  datum->add_function([copy](const Vec2& x) { return barrier_w(copy, x); }, -bound, bound);
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) values[i] = barrier_w(spec, grid.node(i));
  return GraphFunction::from_values(grid, std::move(values), s_mask(spec, grid), datum);
}

double curvature_bound_value(const BarrierSpec& spec, const FractionalParams& params, double epsilon) {
  if (!(spec.holder_norm > 0.0)) throw PreconditionError("curvature bound: estimate the Hoelder norm first");
  const double s = params.s, a = spec.alpha;
  const double C = 2.0 * sphere_measure(params.n - 1) * (1.0 / ((1.0 + a) * (a - s)) + eval_F_infinity(params) / s);
  return C * std::pow(spec.holder_norm * epsilon, s / a);
}

BoundReport curvature_bound_w(const BarrierSpec& spec, const FractionalParams& params, const Grid& grid, double R) {
  spec.validate(params);
  BoundReport rep;
  rep.epsilon = spec.epsilon;
  rep.bound = curvature_bound_value(spec, params, spec.epsilon);
  const BarrierSpec copy = spec;
  const double eps = spec.epsilon;
  auto datum = std::make_shared<Datum>();
  datum->add_function([copy, eps](const Vec2& x) { return eps * std::max(barrier_w(copy, x), 0.0); }, 0.0,
                      2.0 * eps * spec.cutoff_radius());
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) values[i] = (*datum)(grid.node(i));
  const auto mask = s_mask(spec, grid);
  const GraphFunction u = GraphFunction::from_values(grid, std::move(values), mask, datum);
  rep.samples = graph_curvature_batch(u, s_nodes(mask, grid), params, R);
  rep.max_sample = max_value(rep.samples);
  for (const auto& c : rep.samples)
    if (c.value > rep.bound) rep.all_below = false;
  return rep;
}

BarrierReport build_v(const BarrierSpec& spec, const FractionalParams& params, const Grid& grid, double R) {
  spec.validate(params);
  if (grid.dim != 2) throw PreconditionError("build_v: the grid must be two-dimensional");
  BarrierReport rep;
  rep.epsilon = spec.epsilon;
  rep.gamma = spec.gamma_value(params);
  const double eps = spec.epsilon;
  const double lift = std::pow(eps, rep.gamma);
  const BarrierSpec copy = spec;
  const FractionalParams p = params;
  auto datum = std::make_shared<Datum>();
  const double top = lift + 2.0 * eps * spec.cutoff_radius();
  datum->add_function([copy, p](const Vec2& x) { return barrier_v(copy, p, x); },
                      spec.bump_sign < 0 ? -lift : 0.0, top);
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) values[i] = (*datum)(grid.node(i));
  const auto mask = s_mask(spec, grid);
  rep.v = GraphFunction::from_values(grid, values, mask, datum);

  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec2 x = grid.node(i);
    const double ew = eps * std::max(barrier_w(spec, x), 0.0);
    rep.range_max = std::max(rep.range_max, values[i]);
    if (values[i] < ew) ++rep.containment_violations;
    if (std::hypot(x[0] - spec.p0[0], x[1] - spec.p0[1]) < 0.5 * spec.bump_radius) {
      ++rep.slab_expected;
      if (values[i] - ew >= lift * (1.0 - 1e-12)) ++rep.slab_nodes;
    }
  }
  const std::size_t o = grid.origin();
  const auto oc = grid.coords(o);
  const std::size_t above = grid.index(oc[0], oc[1] + 1);
  rep.gradient_at_origin = std::fabs(values[above] - values[o]) / grid.h;

  rep.samples = graph_curvature_batch(rep.v, s_nodes(mask, grid), params, R);
  rep.max_curvature = max_value(rep.samples);
  rep.certified = !rep.samples.empty() && rep.max_curvature < 0.0;

  // farthest point of the slab seen from the graph of eps w_+ over S
  const double far = norm({spec.p0[0], spec.p0[1] - spec.S.radius}) + spec.S.radius + 0.5 * spec.bump_radius;
  const double D = std::hypot(far, std::max(lift, 2.0 * eps * spec.cutoff_radius()));
  const double ball = M_PI * 0.25 * spec.bump_radius * spec.bump_radius;
  rep.analytic_margin = curvature_bound_value(spec, params, eps) -
                        spec.bump_sign * 2.0 * ball * lift * std::pow(D, -(params.n + 1 + params.s));
  return rep;
}

Certification certify_epsilon(BarrierSpec spec, const FractionalParams& params, const Grid& grid, double R,
                              int k_max) {
  if (k_max < 1) throw PreconditionError("certify_epsilon: k_max must be positive");
  Certification out;
  std::vector<bool> negative;
  for (int k = 1; k <= k_max; ++k) {
    spec.epsilon = std::ldexp(1.0, -k);
    const BarrierReport rep = build_v(spec, params, grid, R);
    out.trail.emplace_back(spec.epsilon, rep.max_curvature);
    negative.push_back(rep.certified);
  }
  // largest eps whose every smaller trial value stays negative
  for (int k = k_max; k >= 1 && negative[k - 1]; --k) out.k_star = k;
  if (out.k_star > 0) {
    out.certified = true;
    out.epsilon_star = std::ldexp(1.0, -out.k_star);
  }
  return out;
}

}  // namespace fracstick
