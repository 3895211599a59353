#include "fracstick/geometry.hpp"

#include "fracstick/errors.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

namespace fracstick {
namespace {

double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const double dx = b[0] - a[0], dy = b[1] - a[1];
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0 ? ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p[0] - a[0] - t * dx, p[1] - a[1] - t * dy);
}

bool crossing_inside(const Vec2& p, const std::vector<Vec2>& v) {
  bool inside = false;
  for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
    if ((v[i][1] > p[1]) != (v[j][1] > p[1])) {
      const double x = v[j][0] + (p[1] - v[j][1]) * (v[i][0] - v[j][0]) / (v[i][1] - v[j][1]);
      if (p[0] < x) inside = !inside;
    }
  }
  return inside;
}

double clip_margin(const Box& clip, const Vec2& x) {
  double m = std::min(x[0] - clip.lo[0], clip.hi[0] - x[0]);
  if (clip.dim == 2) m = std::min({m, x[1] - clip.lo[1], clip.hi[1] - x[1]});
  return m;
}

void check_box(const Box& box) {
  for (int k = 0; k < box.dim; ++k)
    if (!(box.hi[k] > box.lo[k])) throw DomainError("box: hi must exceed lo on every axis");
}

std::map<std::string, std::string> key_values(std::istringstream& in) {
  std::map<std::string, std::string> out;
  std::string token;
  while (in >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) throw ConfigError("domain: expected key=value, got '" + token + "'");
    out[token.substr(0, eq)] = token.substr(eq + 1);
  }
  return out;
}

double number(const std::map<std::string, std::string>& kv, const std::string& key) {
  auto it = kv.find(key);
  if (it == kv.end()) throw ConfigError("domain: missing key '" + key + "'");
  try {
    std::size_t used = 0;
    const double v = std::stod(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("domain: key '" + key + "' is not a number");
  }
}

Box parse_box(const std::string& text) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) v.push_back(std::stod(item));
  Box b;
  if (v.size() == 2) {
    b.dim = 1;
    b.lo = {v[0], 0.0};
    b.hi = {v[1], 0.0};
  } else if (v.size() == 4) {
    b.dim = 2;
    b.lo = {v[0], v[1]};
    b.hi = {v[2], v[3]};
  } else {
    throw ConfigError("domain: clip box needs 2 or 4 numbers");
  }
  return b;
}

std::string box_text(const Box& b) {
  std::ostringstream out;
  out.precision(17);
  if (b.dim == 1)
    out << b.lo[0] << ',' << b.hi[0];
  else
    out << b.lo[0] << ',' << b.lo[1] << ',' << b.hi[0] << ',' << b.hi[1];
  return out.str();
}

}  // namespace

bool Box::contains(const Vec2& x) const {
  for (int k = 0; k < dim; ++k)
    if (x[k] < lo[k] || x[k] > hi[k]) return false;
  return true;
}

bool TangentSet::contains(const Vec2& x) const {
  if (dim == 1) return x[0] > 0.0 && x[0] < 2.0 * radius;
  const double dy = x[1] - radius;
  return x[0] * x[0] + dy * dy < radius * radius;
}

double TangentSet::phi(double x1) const {
  const double q = radius * radius - x1 * x1;
  if (q < 0) throw DomainError("TangentSet::phi: |x1| exceeds the radius");
  return radius - std::sqrt(q);
}

double PlanarDomain::wedge_phi(double x1) const {
  const double r = std::fabs(x1);
  if (r <= rho) return c * std::pow(r, beta);
  return c * std::pow(rho, beta) + c * beta * std::pow(rho, beta - 1.0) * (r - rho);
}

double PlanarDomain::polygon_level(const Vec2& x) const {
  double d = INFINITY;
  for (std::size_t i = 0; i < vertices_.size(); ++i)
    d = std::min(d, segment_distance(x, vertices_[i], vertices_[(i + 1) % vertices_.size()]));
  if (d <= 1e-14) return 0.0;
  return crossing_inside(x, vertices_) ? d : -d;
}

double PlanarDomain::level(const Vec2& x) const {
  switch (kind_) {
    case DomainKind::Interval: return std::min(x[0] - a, b - x[0]);
    case DomainKind::Wedge: return std::min(x[1] - wedge_phi(x[0]), clip_margin(clip_, x));
    case DomainKind::SmoothGraph:
      return std::min(x[1] + coeff * std::pow(std::fabs(x[0]), exponent), clip_margin(clip_, x));
    case DomainKind::Polygon: return polygon_level(x);
  }
  return 0.0;
}

double PlanarDomain::max_tangent_radius() const {
  if (kind_ == DomainKind::Interval) return (a == 0.0 && b > 0.0) ? 0.5 * b : 0.0;
  auto fits = [this](double r) {
    const Vec2 centre{0.0, r};
    if (kind_ == DomainKind::Polygon) {
      for (std::size_t i = 0; i < vertices_.size(); ++i)
        if (segment_distance(centre, vertices_[i], vertices_[(i + 1) % vertices_.size()]) < r * (1 - 1e-12))
          return false;
      return crossing_inside(centre, vertices_);
    }
    for (int k = 1; k < 720; ++k) {
      const double t = 2.0 * std::numbers::pi * k / 720.0 - 0.5 * std::numbers::pi;
      const Vec2 p{r * std::cos(t), r + r * std::sin(t)};
      if (level(p) < 0) return false;
    }
    return level(centre) > 0;
  };
  double lo = 0.0, hi = std::max(box_.width(0), box_.width(1));
  if (!fits(1e-9)) return 0.0;
  for (int it = 0; it < 80; ++it) {
    const double mid = 0.5 * (lo + hi);
    (fits(mid) ? lo : hi) = mid;
  }
  return lo;
}

std::string PlanarDomain::describe() const {
  std::ostringstream out;
  out.precision(17);
  switch (kind_) {
    case DomainKind::Interval: out << "interval a=" << a << " b=" << b; break;
    case DomainKind::Wedge:
      out << "wedge c=" << c << " beta=" << beta << " rho=" << rho << " clip=" << box_text(clip_);
      break;
    case DomainKind::Polygon: out << "reentrant angle=" << angle; break;
    case DomainKind::SmoothGraph:
      out << "smooth coeff=" << coeff << " exponent=" << exponent << " clip=" << box_text(clip_);
      break;
  }
  if (tangent_) out << " tangent=" << tangent_->radius;
  return out.str();
}

PlanarDomain make_interval_domain(double a, double b, const Box& box) {
  check_box(box);
  if (box.dim != 1) throw DomainError("interval domain needs a 1-D box");
  if (!(b > a)) throw DomainError("interval domain: need a < b");
  PlanarDomain d;
  d.kind_ = DomainKind::Interval;
  d.box_ = box;
  d.a = a;
  d.b = b;
  return d;
}

PlanarDomain make_wedge_domain(double c, double beta, double rho, const Box& box, const Box& clip) {
  check_box(box);
  if (!(c > 0) || !(beta > 0) || !(rho > 0)) throw DomainError("wedge domain: c, beta, rho must be positive");
  if (box.dim != 2 || clip.dim != 2) throw DomainError("wedge domain is planar");
  PlanarDomain d;
  d.kind_ = DomainKind::Wedge;
  d.box_ = box;
  d.clip_ = clip;
  d.c = c;
  d.beta = beta;
  d.rho = rho;
  return d;
}

PlanarDomain make_reentrant_domain(double angle, const Box& box) {
  check_box(box);
  if (box.dim != 2) throw DomainError("reentrant domain is planar");
  if (!(angle > std::numbers::pi && angle < 2 * std::numbers::pi))
    throw DomainError("reentrant domain: angle must lie in (pi, 2 pi)");
  const double D = 0.25 * std::min(box.width(0), box.width(1));
  const double half_notch = 0.5 * (2 * std::numbers::pi - angle);
  const Vec2 right{std::sin(half_notch), -std::cos(half_notch)};
  const Vec2 left{-std::sin(half_notch), -std::cos(half_notch)};
  auto hit = [D](const Vec2& d) {
    const double t = D / (std::fabs(d[0]) + std::fabs(d[1]));
    return Vec2{t * d[0], t * d[1]};
  };
  PlanarDomain d;
  d.kind_ = DomainKind::Polygon;
  d.box_ = box;
  d.angle = angle;
  std::vector<Vec2> v{{0.0, 0.0}, hit(right)};
  for (const Vec2& corner : {Vec2{D, 0.0}, Vec2{0.0, D}, Vec2{-D, 0.0}}) {
    const Vec2& last = v.back();
    if (std::hypot(corner[0] - last[0], corner[1] - last[1]) > 1e-12 * D) v.push_back(corner);
  }
  const Vec2 end = hit(left);
  if (std::hypot(end[0] - v.back()[0], end[1] - v.back()[1]) > 1e-12 * D) v.push_back(end);
  d.vertices_ = v;
  d.tangent_ = TangentSet{2, 0.75 * d.max_tangent_radius()};
  return d;
}

PlanarDomain make_smooth_domain(double coeff, double exponent, const Box& box, const Box& clip) {
  check_box(box);
  if (box.dim != 2 || clip.dim != 2) throw DomainError("smooth domain is planar");
  if (!(coeff >= 0) || !(exponent > 1)) throw DomainError("smooth domain: need coeff >= 0 and exponent > 1");
  PlanarDomain d;
  d.kind_ = DomainKind::SmoothGraph;
  d.box_ = box;
  d.clip_ = clip;
  d.coeff = coeff;
  d.exponent = exponent;
  d.tangent_ = TangentSet{2, 0.75 * d.max_tangent_radius()};
  return d;
}

Membership membership(const PlanarDomain& domain, const Vec2& x, double band) {
  const double l = domain.level(x);
  if (l > band) return Membership::Interior;
  if (l < -band) return Membership::Exterior;
  return Membership::Boundary;
}

PlanarDomain parse_domain(const std::string& text, const Box& box) {
  std::istringstream in(text);
  std::string kind;
  in >> kind;
  const auto kv = key_values(in);
  PlanarDomain d;
  try {
    if (kind == "interval") {
      d = make_interval_domain(number(kv, "a"), number(kv, "b"), box);
    } else if (kind == "wedge") {
      const Box clip = kv.count("clip") ? parse_box(kv.at("clip")) : box;
      d = make_wedge_domain(number(kv, "c"), number(kv, "beta"), number(kv, "rho"), box, clip);
    } else if (kind == "reentrant") {
      const double angle =
          kv.count("angle_deg") ? number(kv, "angle_deg") * std::numbers::pi / 180.0 : number(kv, "angle");
      d = make_reentrant_domain(angle, box);
    } else if (kind == "smooth") {
      const Box clip = kv.count("clip") ? parse_box(kv.at("clip")) : box;
      d = make_smooth_domain(number(kv, "coeff"), number(kv, "exponent"), box, clip);
    } else {
      throw ConfigError("domain: unknown kind '" + kind + "'");
    }
  } catch (const DomainError& e) {
    throw ConfigError(std::string("domain: ") + e.what());
  }
  if (kv.count("tangent")) {
    const double r = number(kv, "tangent");
    if (!(r > 0)) throw ConfigError("domain: tangent radius must be positive");
    d.set_tangent_set(TangentSet{d.dim(), r});
  } else if (kv.count("tangent_fraction")) {
    d.set_tangent_set(TangentSet{d.dim(), number(kv, "tangent_fraction") * d.max_tangent_radius()});
  }
  return d;
}

}  // namespace fracstick
