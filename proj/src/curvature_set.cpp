#include "fracstick/curvature.hpp"

#include "fracstick/errors.hpp"
#include "fracstick/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fracstick {
namespace {

Vec3 add(const Vec3& a, const Vec3& b, double t) { return {a[0] + t * b[0], a[1] + t * b[1], a[2] + t * b[2]}; }

Vec3 normalized(const Vec3& v) {
  const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
  return {v[0] / n, v[1] / n, v[2] / n};
}

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

/// Sum over the pieces of [0, 2 pi) of length * (1 - 2 chi), with chi sampled at
/// M points and every sign change located by bisection.
template <class Inside>
double signed_circle_measure(const Inside& inside, int M) {
  const double step = 2.0 * std::numbers::pi / M;
  bool prev = inside(0.0);
  const bool first = prev;
  double piece_start = 0.0;
  double total = 0.0;
  for (int j = 1; j <= M; ++j) {
    const double theta = j * step;
    const bool cur = j == M ? first : inside(theta);
    if (cur != prev) {
      double lo = (j - 1) * step, hi = theta;
      for (int it = 0; it < 60 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        (inside(mid) == prev ? lo : hi) = mid;
      }
      const double cut = 0.5 * (lo + hi);
      total += (cut - piece_start) * (prev ? -1.0 : 1.0);
      piece_start = cut;
      prev = cur;
    }
  }
  total += (2.0 * std::numbers::pi - piece_start) * (prev ? -1.0 : 1.0);
  return total;
}

bool on_boundary(const Region& E, const Vec3& P) {
  const int m = E.dim();
  const double r = 1e-7 * std::max(1.0, std::sqrt(P[0] * P[0] + P[1] * P[1] + P[2] * P[2]));
  bool in = false, out = false;
  std::vector<Vec3> dirs;
  for (int k = 0; k < m; ++k) {
    Vec3 e{0, 0, 0};
    e[k] = 1;
    dirs.push_back(e);
    e[k] = -1;
    dirs.push_back(e);
  }
  const int diag = m == 2 ? 4 : 8;
  for (int k = 0; k < diag; ++k) {
    Vec3 d{(k & 1) ? 1.0 : -1.0, (k & 2) ? 1.0 : -1.0, m == 3 ? ((k & 4) ? 1.0 : -1.0) : 0.0};
    dirs.push_back(normalized(d));
  }
  for (const Vec3& d : dirs) {
    (E.contains(add(P, d, r)) ? in : out) = true;
    if (in && out) return true;
  }
  return false;
}

Vec3 estimate_normal(const Region& E, const Vec3& P) {
  if (auto hint = E.normal_hint(P)) return *hint;
  const int m = E.dim();
  const double r = 1e-6 * std::max(1.0, std::sqrt(P[0] * P[0] + P[1] * P[1] + P[2] * P[2]));
  Vec3 acc{0, 0, 0};
  const int steps = 16;
  for (int a = 0; a < steps; ++a)
    for (int b = 0; b < (m == 3 ? steps : 1); ++b) {
      Vec3 d;
      if (m == 2) {
        const double t = 2 * std::numbers::pi * (a + 0.5) / steps;
        d = {std::cos(t), std::sin(t), 0};
      } else {
        const double ph = std::numbers::pi * (a + 0.5) / steps;
        const double th = 2 * std::numbers::pi * (b + 0.5) / steps;
        d = {std::sin(ph) * std::cos(th), std::sin(ph) * std::sin(th), std::cos(ph)};
      }
      const double sign = E.contains(add(P, d, r)) ? -1.0 : 1.0;
      for (int k = 0; k < 3; ++k) acc[k] += sign * d[k];
    }
  if (acc[0] == 0 && acc[1] == 0 && acc[2] == 0) acc[m - 1] = 1;
  return normalized(acc);
}

/// Fix the sign so that E and its complement produce the same frame.
Vec3 canonical(Vec3 v) {
  for (int k = 0; k < 3; ++k) {
    if (std::fabs(v[k]) > 1e-12) {
      if (v[k] < 0) v = {-v[0], -v[1], -v[2]};
      break;
    }
  }
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------

SubgraphRegion::SubgraphRegion(int n, std::function<double(const Vec2&)> height, double far_lo, double far_hi)
    : n_(n), height_(std::move(height)), far_lo_(far_lo), far_hi_(far_hi) {
  if (n != 1 && n != 2) throw DomainError("SubgraphRegion: n must be 1 or 2");
}

SubgraphRegion SubgraphRegion::from_graph(const GraphFunction& u) {
  auto shared = std::make_shared<GraphFunction>(u);
  auto height = [shared](const Vec2& x) {
    const Grid& g = shared->grid;
    const double fi = (x[0] - g.lo[0]) / g.h;
    const double fj = g.dim == 2 ? (x[1] - g.lo[1]) / g.h : 0.0;
    const int i = static_cast<int>(std::floor(fi));
    const int j = static_cast<int>(std::floor(fj));
    const int jmax = g.dim == 2 ? g.count[1] - 1 : 1;
    if (i < 0 || i >= g.count[0] - 1 || j < 0 || j >= jmax) return (*shared->datum)(x);
    const double a = fi - i;
    if (g.dim == 1) return (1 - a) * shared->values[i] + a * shared->values[i + 1];
    const double b = fj - j;
    const auto& v = shared->values;
    return (1 - a) * (1 - b) * v[g.index(i, j)] + a * (1 - b) * v[g.index(i + 1, j)] +
           (1 - a) * b * v[g.index(i, j + 1)] + a * b * v[g.index(i + 1, j + 1)];
  };
  return SubgraphRegion(u.grid.dim, height, u.datum->lower(), u.datum->upper());
}

bool SubgraphRegion::contains(const Vec3& X) const {
  const Vec2 x{X[0], n_ == 2 ? X[1] : 0.0};
  return X[n_] < height_(x);
}

std::optional<Region::Tail> SubgraphRegion::tail(const Vec3& P, double R, const FractionalParams& params) const {
  const double s = params.s;
  const Vec2 x{P[0], n_ == 2 ? P[1] : 0.0};
  double mean = 0.0;
  if (n_ == 1) {
    mean = 0.5 * (height_({x[0] + R, 0.0}) + height_({x[0] - R, 0.0}));
  } else {
    constexpr int kDirections = 64;
    for (int k = 0; k < kDirections; ++k) {
      const double t = 2.0 * std::numbers::pi * (k + 0.5) / kDirections;
      mean += height_({x[0] + R * std::cos(t), x[1] + R * std::sin(t)});
    }
    mean /= kDirections;
  }
  const double d = P[n_] - mean;
  Tail out;
  if (std::fabs(d) >= R) {
    out.value = 0.0;
    out.error = sphere_measure(n_) * std::pow(R, -s) / s;
    return out;
  }
  if (n_ == 2) {
    out.value = 4.0 * std::numbers::pi * d * std::pow(R, -1.0 - s) / (1.0 + s);
  } else {
    // 4 int_R^inf arcsin(d/r) r^(-1-s) dr with r = R p^(-1/s)
    out.value = 4.0 * std::pow(R, -s) / s *
                gauss_integrate([&](double p) { return std::asin(d * std::pow(p, 1.0 / s) / R); }, 0.0, 1.0, 30);
  }
  const double osc = far_hi_ - far_lo_;
  out.error = 2.0 * sphere_measure(n_ - 1) * osc * std::pow(R, -1.0 - s) / (1.0 + s);
  return out;
}

std::optional<Vec3> SubgraphRegion::normal_hint(const Vec3& P) const {
  const double e = 1e-6;
  Vec3 nrm{0, 0, 0};
  const Vec2 x{P[0], n_ == 2 ? P[1] : 0.0};
  nrm[0] = -(height_({x[0] + e, x[1]}) - height_({x[0] - e, x[1]})) / (2 * e);
  if (n_ == 2) nrm[1] = -(height_({x[0], x[1] + e}) - height_({x[0], x[1] - e})) / (2 * e);
  nrm[n_] = 1.0;
  return normalized(nrm);
}

BallRegion::BallRegion(int dim, const Vec3& centre, double radius) : dim_(dim), centre_(centre), radius_(radius) {
  if (dim != 2 && dim != 3) throw DomainError("BallRegion: dimension must be 2 or 3");
  if (!(radius > 0)) throw DomainError("BallRegion: radius must be positive");
}

bool BallRegion::contains(const Vec3& X) const {
  double r2 = 0.0;
  for (int k = 0; k < dim_; ++k) r2 += (X[k] - centre_[k]) * (X[k] - centre_[k]);
  return r2 < radius_ * radius_;
}

std::optional<Region::Tail> BallRegion::tail(const Vec3& P, double R, const FractionalParams& params) const {
  double d2 = 0.0;
  for (int k = 0; k < dim_; ++k) d2 += (P[k] - centre_[k]) * (P[k] - centre_[k]);
  if (std::sqrt(d2) + radius_ > R) return std::nullopt;
  return Tail{sphere_measure(dim_ - 1) * std::pow(R, -params.s) / params.s, 0.0};
}

std::optional<Vec3> BallRegion::normal_hint(const Vec3& P) const {
  Vec3 d{0, 0, 0};
  for (int k = 0; k < dim_; ++k) d[k] = P[k] - centre_[k];
  return normalized(d);
}

VoxelRegion::VoxelRegion(VoxelSet set) : set_(std::move(set)) {}

std::optional<Region::Tail> VoxelRegion::tail(const Vec3& P, double R, const FractionalParams& params) const {
  // every box corner within R: nothing of the set lies beyond
  const int m = set_.dim();
  for (int corner = 0; corner < (1 << m); ++corner) {
    double d2 = 0.0;
    for (int k = 0; k < m; ++k) {
      const double x = set_.lo()[k] + ((corner >> k) & 1 ? set_.count()[k] * set_.h() : 0.0);
      d2 += (x - P[k]) * (x - P[k]);
    }
    if (d2 > R * R) return std::nullopt;
  }
  return Tail{sphere_measure(m - 1) * std::pow(R, -params.s) / params.s, 0.0};
}

std::optional<Region::Tail> ComplementRegion::tail(const Vec3& P, double R, const FractionalParams& params) const {
  auto t = inner_->tail(P, R, params);
  if (!t) return std::nullopt;
  return Tail{-t->value, t->error};
}

ScaledRegion::ScaledRegion(std::shared_ptr<const Region> inner, double lambda)
    : inner_(std::move(inner)), lambda_(lambda) {
  if (!(lambda > 0)) throw DomainError("ScaledRegion: lambda must be positive");
}

bool ScaledRegion::contains(const Vec3& X) const {
  return inner_->contains({X[0] / lambda_, X[1] / lambda_, X[2] / lambda_});
}

std::optional<Region::Tail> ScaledRegion::tail(const Vec3& P, double R, const FractionalParams& params) const {
  auto t = inner_->tail({P[0] / lambda_, P[1] / lambda_, P[2] / lambda_}, R / lambda_, params);
  if (!t) return std::nullopt;
  const double f = std::pow(lambda_, -params.s);
  return Tail{t->value * f, t->error * f};
}

std::optional<Vec3> ScaledRegion::normal_hint(const Vec3& P) const {
  return inner_->normal_hint({P[0] / lambda_, P[1] / lambda_, P[2] / lambda_});
}

// ---------------------------------------------------------------------------

CurvatureSample set_curvature_pv(const Region& E, const Vec3& P, const FractionalParams& params, double r_in,
                                 double R, PvOptions options) {
  params.validate();
  const int m = E.dim();
  if (m != params.n + 1) throw PreconditionError("set_curvature_pv: region dimension must be n+1");
  if (!(r_in > 0) || !(R > r_in)) throw DomainError("set_curvature_pv: need 0 < r_in < R");
  if (!on_boundary(E, P)) throw DomainError("set_curvature_pv: P is not on the boundary of E");
  const double s = params.s;

  // frame for the sphere in 3-D: polar axis tangent to the surface
  Vec3 ep{1, 0, 0}, b1{0, 1, 0}, b2{0, 0, 1};
  if (m == 3) {
    const Vec3 nu = canonical(estimate_normal(E, P));
    int k = 0;
    for (int i = 1; i < 3; ++i)
      if (std::fabs(nu[i]) < std::fabs(nu[k])) k = i;
    Vec3 ek{0, 0, 0};
    ek[k] = 1;
    ep = normalized(cross(nu, ek));
    b1 = nu;
    b2 = cross(ep, nu);
  }

  auto shell = [&](double r) {
    if (m == 2) {
      return signed_circle_measure(
          [&](double t) { return E.contains({P[0] + r * std::cos(t), P[1] + r * std::sin(t), 0.0}); },
          options.angular_samples);
    }
    const GaussRule& rule = gauss_rule(10);
    double total = 0.0;
    const double panel = std::numbers::pi / options.polar_panels;
    for (int q = 0; q < options.polar_panels; ++q) {
      for (std::size_t g = 0; g < rule.x.size(); ++g) {
        const double phi = panel * (q + 0.5 + 0.5 * rule.x[g]);
        const double c = std::cos(phi), sn = std::sin(phi);
        const double az = signed_circle_measure(
            [&](double t) {
              const double ct = std::cos(t), st = std::sin(t);
              Vec3 d;
              for (int i = 0; i < 3; ++i) d[i] = c * ep[i] + sn * (ct * b1[i] + st * b2[i]);
              return E.contains(add(P, d, r));
            },
            options.azimuth_samples);
        total += 0.5 * panel * rule.w[g] * sn * az;
      }
    }
    return total;
  };

  // g(r) has square-root kinks where a shell touches the boundary tangentially,
  // so each dyadic panel is integrated adaptively.
  double value = 0.0;
  double r1 = 0.0, g1 = 0.0, r2 = 0.0, g2 = 0.0;
  auto integrand = [&](double r) {
    const double gr = shell(r);
    if (r1 == 0.0 || r < r1) {
      r2 = r1;
      g2 = g1;
      r1 = r;
      g1 = gr;
    } else if (r2 == 0.0 || r < r2) {
      r2 = r;
      g2 = gr;
    }
    return std::pow(r, -1.0 - s) * gr;
  };
  double quad_error = 0.0;
  for (double lo = r_in; lo < R; lo *= 2.0) {
    const double hi = std::min(2.0 * lo, R);
    double err = 0.0;
    value += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(integrand, lo, hi, options.max_depth,
                                                                           options.tolerance, &err);
    quad_error += err;
  }
  // g(r) ~ a r near 0 for a C^{1,1} boundary
  const double moment = std::pow(r_in, 1.0 - s) / (1.0 - s);
  const double inner = g1 / r1 * moment;
  value += inner;

  CurvatureSample out;
  out.location = P;
  out.R = R;
  out.singular_error = std::fabs(g1 / r1 - g2 / r2) * moment + 1e-3 * std::fabs(inner) + quad_error;
  if (auto t = E.tail(P, R, params)) {
    value += t->value;
    out.estimated_truncation_error = t->error;
  } else {
    out.estimated_truncation_error = sphere_measure(params.n) * std::pow(R, -s) / s;
  }
  out.value = value;
  return out;
}

std::pair<double, double> curvature_scaling_check(std::shared_ptr<const Region> E, const Vec3& P, double lambda,
                                                  const FractionalParams& params, double r_in, double R,
                                                  PvOptions options) {
  if (!(lambda > 0)) throw DomainError("curvature_scaling_check: lambda must be positive");
  ScaledRegion scaled(E, lambda);
  const Vec3 LP{lambda * P[0], lambda * P[1], lambda * P[2]};
  const double left = set_curvature_pv(scaled, LP, params, lambda * r_in, lambda * R, options).value;
  const double right = std::pow(lambda, -params.s) * set_curvature_pv(*E, P, params, r_in, R, options).value;
  return {left, right};
}

}  // namespace fracstick
