#pragma once

#include <vector>

namespace fracstick {

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> x;
  std::vector<double> w;
};

/// Supported point counts: 7, 10, 15, 20, 25, 30.
const GaussRule& gauss_rule(int points);

template <class Fn>
double gauss_integrate(Fn&& f, double a, double b, int points = 20) {
  const GaussRule& rule = gauss_rule(points);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.x.size(); ++i) sum += rule.w[i] * f(mid + half * rule.x[i]);
  return half * sum;
}

/// Composite rule: `panels` equal panels on [a, b].
template <class Fn>
double gauss_integrate_composite(Fn&& f, double a, double b, int panels, int points = 20) {
  const double step = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) sum += gauss_integrate(f, a + p * step, a + (p + 1) * step, points);
  return sum;
}

}  // namespace fracstick
