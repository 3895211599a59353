#pragma once

#include "fracstick/curvature.hpp"
#include "fracstick/geometry.hpp"
#include "fracstick/graph.hpp"

#include <optional>
#include <vector>

namespace fracstick {

/// Barrier data around a tangent disk S touching the boundary at 0 (n = 2).
struct BarrierSpec {
  TangentSet S{2, 0.1};
  double alpha = 0.9;
  /// Radius of the cutoff in w; 0 means half the radius of S.
  double rho = 0.0;
  double epsilon = 0.01;
  /// 0 means the midpoint 0.5 s / alpha.
  double gamma = 0.0;
  Vec2 p0{0.0, -0.3};
  /// Radius of the ball carrying the bump tau (the unit ball after rescaling).
  double bump_radius = 0.15;
  /// +1 for v, -1 for the negative control.
  double bump_sign = 1.0;
  /// Estimate of the Hoelder seminorm of grad w; filled by estimate_holder_norm.
  double holder_norm = 0.0;
  double holder_spacing = 0.0;

  double cutoff_radius() const { return rho > 0.0 ? rho : 0.5 * S.radius; }
  double gamma_value(const FractionalParams& params) const { return gamma > 0.0 ? gamma : 0.5 * params.s / alpha; }

  /// Throws PreconditionError on alpha <= s, gamma outside (0, s/alpha), or a bump ball touching omega.
  void validate(const FractionalParams& params, const PlanarDomain* omega = nullptr) const;
};

/// w(x) = (x2 - phi(x1)) tau(|x| / rho) and its gradient.
double barrier_w(const BarrierSpec& spec, const Vec2& x);
Vec2 barrier_w_gradient(const BarrierSpec& spec, const Vec2& x);
/// eps^gamma * sign * tau_{p0} + eps * max(w, 0).
double barrier_v(const BarrierSpec& spec, const FractionalParams& params, const Vec2& x);

/// Max |grad w(x) - grad w(z)| / |x - z|^alpha over lattice pairs of the given
/// spacing inside the ball of radius 1.25 rho. Stores the result in spec.
double estimate_holder_norm(BarrierSpec& spec, double spacing = 0.0);

/// w on the grid; the mask marks nodes of S.
GraphFunction build_w(const BarrierSpec& spec, const Grid& grid);

struct BoundReport {
  double epsilon = 0.0;
  double bound = 0.0;
  double max_sample = 0.0;
  bool all_below = true;
  std::vector<CurvatureSample> samples;
};

/// 2|S^{n-1}| [1/((1+alpha)(alpha-s)) + F_inf/s] (N eps)^(s/alpha), N the Hoelder estimate.
double curvature_bound_value(const BarrierSpec& spec, const FractionalParams& params, double epsilon);

/// The bound together with graph curvatures of eps w_+ at the S-nodes.
BoundReport curvature_bound_w(const BarrierSpec& spec, const FractionalParams& params, const Grid& grid, double R);

struct BarrierReport {
  GraphFunction v;
  double epsilon = 0.0;
  double gamma = 0.0;
  double max_curvature = 0.0;
  std::vector<CurvatureSample> samples;
  bool certified = false;
  /// Nodes where v < eps w_+.
  std::size_t containment_violations = 0;
  std::size_t slab_nodes = 0, slab_expected = 0;
  /// Finite-difference |grad v| at 0 from inside S.
  double gradient_at_origin = 0.0;
  double range_max = 0.0;
  /// bound - 2 |B_{b/2}| eps^gamma D^(-(n+1+s)), an analytic upper bound on the curvature.
  double analytic_margin = 0.0;
};

BarrierReport build_v(const BarrierSpec& spec, const FractionalParams& params, const Grid& grid, double R);

struct Certification {
  bool certified = false;
  double epsilon_star = 0.0;
  int k_star = -1;
  /// (eps, max sampled curvature) for every tried eps = 2^-k.
  std::vector<std::pair<double, double>> trail;
};

/// Largest eps = 2^-k, k = 1..k_max, with all sampled curvatures of v negative
/// and the next two smaller values negative too.
Certification certify_epsilon(BarrierSpec spec, const FractionalParams& params, const Grid& grid, double R,
                              int k_max = 24);

}  // namespace fracstick
