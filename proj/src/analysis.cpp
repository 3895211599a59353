#include "fracstick/analysis.hpp"

#include "fracstick/errors.hpp"
#include "fracstick/parallel.hpp"
#include "fracstick/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace fracstick {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Diverges: return "diverges";
    case Verdict::Converges: return "converges";
    default: return "inconclusive";
  }
}

namespace {

double shell_integral(double beta, double c, double lo, double hi, double L, const FractionalParams& params,
                      int panels, int points) {
  const double e = params.n + params.s;
  auto inner = [&](double y1) {
    const double top = c * std::pow(y1, beta);
    return gauss_integrate_composite(
        [&](double y2) {
          const double r = std::hypot(y1, y2);
          return 2.0 * std::pow(r, -e) * eval_F(L / r, params);
        },
        0.0, top, panels, points);
  };
  // both signs of y1 and y2
  return 4.0 * gauss_integrate_composite(inner, lo, hi, panels, points);
}

double ratio_fit(const std::vector<double>& terms, int from) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (int k = from; k <= static_cast<int>(terms.size()); ++k) {
    if (!(terms[k - 1] > 0.0)) continue;
    const double y = std::log(terms[k - 1]);
    sx += k;
    sy += y;
    sxx += static_cast<double>(k) * k;
    sxy += k * y;
    ++m;
  }
  if (m < 2) return 0.0;
  return std::exp((m * sxy - sx * sy) / (m * sxx - sx * sx));
}

}  // namespace

DichotomyResult wedge_integral_partial(double beta, double s, double mu, double c, int k_max,
                                       const FractionalParams& params, const DichotomyOptions& options) {
  FractionalParams p = params;
  p.s = s;
  p.validate();
  if (p.n != 2) throw PreconditionError("wedge_integral_partial: only n = 2 is supported");
  if (!(beta > 0.0)) throw PreconditionError("wedge_integral_partial: beta must be positive");
  if (!(mu > 0.0 && mu <= 0.125)) throw PreconditionError("wedge_integral_partial: mu must lie in (0, 1/8]");
  if (!(c > 0.0 && c < 1.0)) throw PreconditionError("wedge_integral_partial: c must lie in (0, 1)");
  if (k_max < 1) throw PreconditionError("wedge_integral_partial: k_max must be positive");

  DichotomyResult out;
  out.beta = beta;
  out.s = s;
  out.mu = mu;
  out.c = c;
  int usable = k_max;
  while (usable > 0 && std::ldexp(mu, -usable) < 1e-12) --usable;
  out.truncated = usable < k_max;

  std::vector<double> terms(usable), check(usable);
  parallel_for(static_cast<std::size_t>(usable), [&](std::size_t idx) {
    const int k = static_cast<int>(idx) + 1;
    const double hi = std::ldexp(mu, -k), lo = 0.5 * hi;
    terms[idx] = shell_integral(beta, c, lo, hi, hi, p, options.panels, options.points);
    check[idx] = shell_integral(beta, c, lo, hi, hi, p, 2 * options.panels, options.points);
  });
  double sum = 0.0;
  for (int k = 0; k < usable; ++k) {
    out.shell_terms.push_back(terms[k]);
    sum += terms[k];
    out.partial_sums.push_back(sum);
    out.quadrature_error = std::max(out.quadrature_error, std::fabs(terms[k] - check[k]) / terms[k]);
  }

  out.fitted_ratio = ratio_fit(out.shell_terms, std::min(options.fit_from, std::max(1, usable - 1)));
  const int w = options.window;
  if (usable >= w) {
    bool positive = true;
    for (int k = usable - w; k < usable; ++k) positive = positive && terms[k] > 0.0;
    if (positive && terms[usable - 1] >= options.floor_ratio * terms[usable - w])
      out.verdict = Verdict::Diverges;
    else if (out.fitted_ratio > 0.0 && out.fitted_ratio < options.converge_ratio)
      out.verdict = Verdict::Converges;
  }
  return out;
}

namespace {

StickinessReport probe(const GraphFunction& u, const Vec2& centre, const std::vector<double>& radii,
                       const std::vector<std::uint8_t>& mask, double reference, bool use_inf) {
  if (radii.empty()) throw PreconditionError("probe: no radii given");
  for (std::size_t j = 1; j < radii.size(); ++j)
    if (!(radii[j] < radii[j - 1])) throw PreconditionError("probe: radii must be strictly decreasing");
  StickinessReport rep;
  rep.radii = radii;
  rep.corner_datum = reference;
  rep.sup.resize(radii.size());
  rep.inf.resize(radii.size());
  rep.modulus.resize(radii.size());
  rep.counts.resize(radii.size());
  parallel_for(radii.size(), [&](std::size_t j) {
    double hi = -INFINITY, lo = INFINITY, mod = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < u.grid.size(); ++i) {
      if (!mask[i]) continue;
      const Vec2 x = u.grid.node(i);
      if (std::hypot(x[0] - centre[0], x[1] - centre[1]) > radii[j] + 1e-12) continue;
      hi = std::max(hi, u.values[i]);
      lo = std::min(lo, u.values[i]);
      mod = std::max(mod, std::fabs(u.values[i] - reference));
      ++count;
    }
    rep.sup[j] = hi;
    rep.inf[j] = lo;
    rep.modulus[j] = mod;
    rep.counts[j] = count;
  });
  if (rep.counts.back() == 0) throw ResolutionError("probe: no nodes within the smallest radius");
  const auto& series = use_inf ? rep.inf : rep.modulus;
  if (radii.size() >= 2) {
    const std::size_t a = radii.size() - 2, b = radii.size() - 1;
    const double slope = (series[a] - series[b]) / (radii[a] - radii[b]);
    rep.extrapolated = series[b] - slope * radii[b];
  } else {
    rep.extrapolated = series.back();
  }
  return rep;
}

std::vector<std::uint8_t> on_lattice(const GraphFunction& u, std::vector<std::uint8_t> mask, int stride) {
  if (stride < 1) throw PreconditionError("probe: stride must be positive");
  if (stride == 1) return mask;
  for (int k = 0; k < u.grid.dim; ++k)
    if ((u.grid.count[k] - 1) % stride != 0) throw PreconditionError("probe: stride must divide the cell count");
  for (std::size_t i = 0; i < mask.size(); ++i) {
    const auto c = u.grid.coords(i);
    if (c[0] % stride != 0 || c[1] % stride != 0) mask[i] = 0;
  }
  return mask;
}

}  // namespace

StickinessReport continuity_modulus(const GraphFunction& u, const Vec2& corner, const std::vector<double>& radii,
                                    int stride) {
  return probe(u, corner, radii, on_lattice(u, u.interior, stride), (*u.datum)(corner), false);
}

StickinessReport measure_jump(const GraphFunction& u, const TangentSet& S, const std::vector<double>& radii,
                              int stride) {
  std::vector<std::uint8_t> mask(u.grid.size(), 0);
  for (std::size_t i = 0; i < u.grid.size(); ++i) mask[i] = u.interior[i] && S.contains(u.grid.node(i)) ? 1 : 0;
  return probe(u, {0.0, 0.0}, radii, on_lattice(u, std::move(mask), stride), (*u.datum)({0.0, 0.0}), true);
}

}  // namespace fracstick

namespace fracstick {

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw PreconditionError("loglog_slope: length mismatch");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0)) continue;
    const double a = std::log(x[i]), b = std::log(y[i]);
    sx += a;
    sy += b;
    sxx += a * a;
    sxy += a * b;
    ++m;
  }
  if (m < 2) throw PreconditionError("loglog_slope: need two positive points");
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace fracstick
