#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace fracstick {

using Vec2 = std::array<double, 2>;

/// Axis-aligned box in R^dim (dim 1 or 2; the second slot is unused for dim 1).
struct Box {
  int dim = 2;
  Vec2 lo{-1.0, -1.0};
  Vec2 hi{1.0, 1.0};

  bool contains(const Vec2& x) const;
  double width(int axis) const { return hi[axis] - lo[axis]; }
};

enum class Membership { Interior, Exterior, Boundary };

enum class DomainKind { Interval, Wedge, Polygon, SmoothGraph };

/// Inward tangent set S touching the boundary at the origin.
/// dim 2: open disk centre (0, radius); dim 1: the interval (0, 2 radius).
struct TangentSet {
  int dim = 2;
  double radius = 0.0;

  bool contains(const Vec2& x) const;
  /// Lower boundary graph phi of S near 0 (dim 2): radius - sqrt(radius^2 - x1^2).
  double phi(double x1) const;
};

/// The base domain omega of the cylinder omega x R.
class PlanarDomain {
 public:
  int dim() const { return box_.dim; }
  DomainKind kind() const { return kind_; }
  const Box& box() const { return box_; }

  /// Positive inside, negative outside, zero exactly on the boundary.
  double level(const Vec2& x) const;

  const std::optional<TangentSet>& tangent_set() const { return tangent_; }
  void set_tangent_set(const TangentSet& s) { tangent_ = s; }
  /// Largest radius r with the tangent disk (0,r),r inside omega (polygon/smooth kinds).
  double max_tangent_radius() const;

  const std::vector<Vec2>& vertices() const { return vertices_; }

  /// One-line text form accepted by parse_domain.
  std::string describe() const;

  // wedge data
  double c = 0.0, beta = 0.0, rho = 0.0;
  // interval data
  double a = 0.0, b = 0.0;
  // reentrant data
  double angle = 0.0;
  // smooth graph: phi(x1) = -coeff |x1|^exponent
  double coeff = 0.0, exponent = 0.0;

 private:
  friend PlanarDomain make_interval_domain(double, double, const Box&);
  friend PlanarDomain make_wedge_domain(double, double, double, const Box&, const Box&);
  friend PlanarDomain make_reentrant_domain(double, const Box&);
  friend PlanarDomain make_smooth_domain(double, double, const Box&, const Box&);

  double wedge_phi(double x1) const;
  double polygon_level(const Vec2& x) const;

  DomainKind kind_ = DomainKind::Interval;
  Box box_;
  Box clip_;
  std::vector<Vec2> vertices_;
  std::optional<TangentSet> tangent_;
};

/// omega = (a, b) inside a 1-D box.
PlanarDomain make_interval_domain(double a, double b, const Box& box);

/// omega = {x2 > phi(x1)} clipped to `clip`, phi = c|x1|^beta for |x1| <= rho and
/// continued by tangent rays beyond.
PlanarDomain make_wedge_domain(double c, double beta, double rho, const Box& box, const Box& clip);

/// Diamond |x1|+|x2| < D (D a quarter of the box's smaller width) minus a
/// downward notch, leaving a concave corner of interior `angle` at 0.
/// The tangent disk of radius 0.75 * max_tangent_radius() is attached.
PlanarDomain make_reentrant_domain(double angle, const Box& box);

/// omega = {x2 > -coeff |x1|^exponent} clipped to `clip`; exponent > 1.
PlanarDomain make_smooth_domain(double coeff, double exponent, const Box& box, const Box& clip);

/// Interior if level > band, exterior if level < -band, boundary otherwise.
Membership membership(const PlanarDomain& domain, const Vec2& x, double band = 0.0);

/// Parses the describe() form, e.g. "wedge c=1 beta=1 rho=0.5 clip=-0.5,0,0.5,0.5".
PlanarDomain parse_domain(const std::string& text, const Box& box);

}  // namespace fracstick
