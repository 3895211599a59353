#pragma once

#include "fracstick/geometry.hpp"

#include <functional>
#include <string>
#include <vector>

namespace fracstick {

/// Plateau bump profile: 1 on q <= 1/2, (1-(2q-1)^2)^2 on (1/2, 1), 0 beyond.
double plateau_bump(double q);
/// d/dq of plateau_bump.
double plateau_bump_derivative(double q);

/// Quintic smoothstep: 0 for r <= r0, 1 for r >= r1.
double smooth_cut(double r, double r0, double r1);

/// Exterior datum psi as a sum of simple terms.
class Datum {
 public:
  struct Term {
    std::string kind;  // constant, bump, tanh, far_tanh, affine, custom
    double amplitude = 0.0;
    Vec2 centre{0.0, 0.0};
    double radius = 1.0;
    double width = 1.0;
    int axis = 0;
    double r0 = 0.0, r1 = 0.0;
    Vec2 gradient{0.0, 0.0};
    std::function<double(const Vec2&)> fn;
    double fn_lo = 0.0, fn_hi = 0.0;
  };

  Datum() = default;
  static Datum constant(double value);

  Datum& add_constant(double value);
  Datum& add_bump(double height, const Vec2& centre, double radius);
  Datum& add_tanh(double amplitude, double width, int axis);
  /// amplitude * tanh(x_axis / width) * smooth_cut(|x|, r0, r1)
  Datum& add_far_tanh(double amplitude, double width, int axis, double r0, double r1);
  /// Unbounded; accepted for curvature checks, rejected by the solver.
  Datum& add_affine(const Vec2& gradient, double offset);
  /// Arbitrary callable with declared range [lo, hi].
  Datum& add_function(std::function<double(const Vec2&)> fn, double lo, double hi);

  double operator()(const Vec2& x) const;
  bool bounded() const;
  /// Certified range of psi (sum of per-term ranges).
  double lower() const;
  double upper() const;
  /// Mean of psi over the sphere of radius r about x (2 points in 1-D, 64 in 2-D).
  double sphere_mean(const Vec2& x, double r, int dim) const;

  const std::vector<Term>& terms() const { return terms_; }
  std::string describe() const;

 private:
  std::vector<Term> terms_;
};

/// Parses "bump height=0.1 centre=0,-0.3 radius=0.15; constant value=0" etc.
Datum parse_datum(const std::string& text);

}  // namespace fracstick
