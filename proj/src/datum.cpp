#include "fracstick/datum.hpp"

#include "fracstick/errors.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

namespace fracstick {

double plateau_bump(double q) {
  if (q <= 0.5) return 1.0;
  if (q >= 1.0) return 0.0;
  const double z = 2.0 * q - 1.0;
  const double b = 1.0 - z * z;
  return b * b;
}

double plateau_bump_derivative(double q) {
  if (q <= 0.5 || q >= 1.0) return 0.0;
  const double z = 2.0 * q - 1.0;
  return -8.0 * z * (1.0 - z * z);
}

double smooth_cut(double r, double r0, double r1) {
  if (r <= r0) return 0.0;
  if (r >= r1) return 1.0;
  const double t = (r - r0) / (r1 - r0);
  return t * t * t * (t * (6.0 * t - 15.0) + 10.0);
}

Datum Datum::constant(double value) {
  Datum d;
  d.add_constant(value);
  return d;
}

Datum& Datum::add_constant(double value) {
  Term t;
  t.kind = "constant";
  t.amplitude = value;
  terms_.push_back(t);
  return *this;
}

Datum& Datum::add_bump(double height, const Vec2& centre, double radius) {
  if (!(radius > 0)) throw DomainError("datum bump: radius must be positive");
  Term t;
  t.kind = "bump";
  t.amplitude = height;
  t.centre = centre;
  t.radius = radius;
  terms_.push_back(t);
  return *this;
}

Datum& Datum::add_tanh(double amplitude, double width, int axis) {
  if (!(width > 0)) throw DomainError("datum tanh: width must be positive");
  Term t;
  t.kind = "tanh";
  t.amplitude = amplitude;
  t.width = width;
  t.axis = axis;
  terms_.push_back(t);
  return *this;
}

Datum& Datum::add_far_tanh(double amplitude, double width, int axis, double r0, double r1) {
  if (!(width > 0) || !(r1 > r0) || r0 < 0) throw DomainError("datum far_tanh: need width > 0 and 0 <= r0 < r1");
  Term t;
  t.kind = "far_tanh";
  t.amplitude = amplitude;
  t.width = width;
  t.axis = axis;
  t.r0 = r0;
  t.r1 = r1;
  terms_.push_back(t);
  return *this;
}

Datum& Datum::add_affine(const Vec2& gradient, double offset) {
  Term t;
  t.kind = "affine";
  t.gradient = gradient;
  t.amplitude = offset;
  terms_.push_back(t);
  return *this;
}

Datum& Datum::add_function(std::function<double(const Vec2&)> fn, double lo, double hi) {
  Term t;
  t.kind = "custom";
  t.fn = std::move(fn);
  t.fn_lo = lo;
  t.fn_hi = hi;
  terms_.push_back(t);
  return *this;
}

double Datum::operator()(const Vec2& x) const {
  double v = 0.0;
  for (const Term& t : terms_) {
    if (t.kind == "constant") {
      v += t.amplitude;
    } else if (t.kind == "bump") {
      v += t.amplitude * plateau_bump(std::hypot(x[0] - t.centre[0], x[1] - t.centre[1]) / t.radius);
    } else if (t.kind == "tanh") {
      v += t.amplitude * std::tanh(x[t.axis] / t.width);
    } else if (t.kind == "far_tanh") {
      v += t.amplitude * std::tanh(x[t.axis] / t.width) * smooth_cut(std::hypot(x[0], x[1]), t.r0, t.r1);
    } else if (t.kind == "affine") {
      v += t.amplitude + t.gradient[0] * x[0] + t.gradient[1] * x[1];
    } else {
      v += t.fn(x);
    }
  }
  return v;
}

bool Datum::bounded() const {
  for (const Term& t : terms_)
    if (t.kind == "affine" && (t.gradient[0] != 0.0 || t.gradient[1] != 0.0)) return false;
  return true;
}

double Datum::lower() const {
  double v = 0.0;
  for (const Term& t : terms_) {
    if (t.kind == "constant" || t.kind == "affine")
      v += (t.kind == "affine" && !bounded()) ? -INFINITY : t.amplitude;
    else if (t.kind == "bump")
      v += std::min(0.0, t.amplitude);
    else if (t.kind == "custom")
      v += t.fn_lo;
    else
      v -= std::fabs(t.amplitude);
  }
  return v;
}

double Datum::upper() const {
  double v = 0.0;
  for (const Term& t : terms_) {
    if (t.kind == "constant" || t.kind == "affine")
      v += (t.kind == "affine" && !bounded()) ? INFINITY : t.amplitude;
    else if (t.kind == "bump")
      v += std::max(0.0, t.amplitude);
    else if (t.kind == "custom")
      v += t.fn_hi;
    else
      v += std::fabs(t.amplitude);
  }
  return v;
}

double Datum::sphere_mean(const Vec2& x, double r, int dim) const {
  if (dim == 1) return 0.5 * ((*this)({x[0] + r, 0.0}) + (*this)({x[0] - r, 0.0}));
  constexpr int kDirections = 64;
  double sum = 0.0;
  for (int k = 0; k < kDirections; ++k) {
    const double t = 2.0 * std::numbers::pi * (k + 0.5) / kDirections;
    sum += (*this)({x[0] + r * std::cos(t), x[1] + r * std::sin(t)});
  }
  return sum / kDirections;
}

std::string Datum::describe() const {
  std::ostringstream out;
  out.precision(17);
  bool first = true;
  for (const Term& t : terms_) {
    if (!first) out << "; ";
    first = false;
    if (t.kind == "constant") {
      out << "constant value=" << t.amplitude;
    } else if (t.kind == "bump") {
      out << "bump height=" << t.amplitude << " centre=" << t.centre[0] << ',' << t.centre[1]
          << " radius=" << t.radius;
    } else if (t.kind == "tanh") {
      out << "tanh amplitude=" << t.amplitude << " width=" << t.width << " axis=" << t.axis;
    } else if (t.kind == "far_tanh") {
      out << "far_tanh amplitude=" << t.amplitude << " width=" << t.width << " axis=" << t.axis
          << " r0=" << t.r0 << " r1=" << t.r1;
    } else if (t.kind == "affine") {
      out << "affine gradient=" << t.gradient[0] << ',' << t.gradient[1] << " offset=" << t.amplitude;
    } else {
      out << "custom";
    }
  }
  return out.str();
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double to_number(const std::string& key, const std::string& text) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("datum: value of '" + key + "' is not a number: '" + text + "'");
  }
}

Vec2 to_pair(const std::string& key, const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) return {to_number(key, text), 0.0};
  return {to_number(key, text.substr(0, comma)), to_number(key, text.substr(comma + 1))};
}

}  // namespace

Datum parse_datum(const std::string& text) {
  Datum d;
  std::stringstream all(text);
  std::string chunk;
  while (std::getline(all, chunk, ';')) {
    chunk = trim(chunk);
    if (chunk.empty()) continue;
    std::istringstream in(chunk);
    std::string kind, token;
    in >> kind;
    std::map<std::string, std::string> kv;
    while (in >> token) {
      const auto eq = token.find('=');
      if (eq == std::string::npos) throw ConfigError("datum: expected key=value, got '" + token + "'");
      kv[token.substr(0, eq)] = token.substr(eq + 1);
    }
    if (kv.count("center") && !kv.count("centre")) kv["centre"] = kv["center"];
    auto get = [&](const std::string& key, double fallback, bool required) {
      auto it = kv.find(key);
      if (it == kv.end()) {
        if (required) throw ConfigError("datum term '" + kind + "': missing '" + key + "'");
        return fallback;
      }
      return to_number(key, it->second);
    };
    try {
      if (kind == "constant") {
        d.add_constant(get("value", 0.0, true));
      } else if (kind == "bump") {
        if (!kv.count("centre")) throw ConfigError("datum term 'bump': missing 'centre'");
        d.add_bump(get("height", 0.0, true), to_pair("centre", kv.at("centre")), get("radius", 0.0, true));
      } else if (kind == "tanh") {
        d.add_tanh(get("amplitude", 0.0, true), get("width", 0.0, true), static_cast<int>(get("axis", 0, false)));
      } else if (kind == "far_tanh") {
        d.add_far_tanh(get("amplitude", 0.0, true), get("width", 0.0, true), static_cast<int>(get("axis", 0, false)),
                       get("r0", 0.0, true), get("r1", 0.0, true));
      } else if (kind == "affine") {
        if (!kv.count("gradient")) throw ConfigError("datum term 'affine': missing 'gradient'");
        d.add_affine(to_pair("gradient", kv.at("gradient")), get("offset", 0.0, false));
      } else {
        throw ConfigError("datum: unknown term '" + kind + "'");
      }
    } catch (const DomainError& e) {
      throw ConfigError(e.what());
    }
  }
  return d;
}

}  // namespace fracstick
