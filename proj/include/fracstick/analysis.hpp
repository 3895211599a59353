#pragma once

#include "fracstick/geometry.hpp"
#include "fracstick/graph.hpp"
#include "fracstick/kernel.hpp"

#include <string>
#include <vector>

namespace fracstick {

enum class Verdict { Diverges, Converges, Inconclusive };
const char* to_string(Verdict v);

struct DichotomyOptions {
  /// First shell used for the ratio fit.
  int fit_from = 6;
  /// Last shells that must stay positive and not decay for "diverges".
  int window = 4;
  double floor_ratio = 0.8;
  double converge_ratio = 0.95;
  int panels = 4;
  int points = 20;
};

struct DichotomyResult {
  double beta = 0.0, s = 0.0, mu = 0.0, c = 0.0;
  /// shell_terms[k-1] is the integral over shell k; partial_sums likewise cumulative.
  std::vector<double> shell_terms;
  std::vector<double> partial_sums;
  Verdict verdict = Verdict::Inconclusive;
  /// exp of the least-squares slope of log(shell term) against k.
  double fitted_ratio = 0.0;
  /// Shells skipped because mu 2^-k fell below 1e-12.
  bool truncated = false;
  double quadrature_error = 0.0;
};

/// Integral of |Y|^(-(n+1+s)) over mu 2^-(k+1) < |y1| < mu 2^-k, |y2| < c|y1|^beta, |y3| < mu 2^-k
/// for k = 1..k_max (n = 2). The y3 integral is done in closed form through F.
DichotomyResult wedge_integral_partial(double beta, double s, double mu, double c, int k_max,
                                       const FractionalParams& params, const DichotomyOptions& options = {});

struct StickinessReport {
  std::vector<double> radii;
  std::vector<double> sup, inf;
  /// sup |u - corner datum value| per radius.
  std::vector<double> modulus;
  std::vector<std::size_t> counts;
  /// Linear extrapolation of inf (measure_jump) or sup |u| (continuity_modulus) to radius 0.
  double extrapolated = 0.0;
  double corner_datum = 0.0;
};

/// sup and inf of u over omega-nodes within each radius of the corner. With
/// stride k only nodes whose indices are multiples of k count, i.e. the nodes
/// of a k times coarser grid on the same box.
StickinessReport continuity_modulus(const GraphFunction& u, const Vec2& corner, const std::vector<double>& radii,
                                    int stride = 1);

/// inf (and sup) of u over S-nodes within each radius of 0.
StickinessReport measure_jump(const GraphFunction& u, const TangentSet& S, const std::vector<double>& radii,
                              int stride = 1);

}  // namespace fracstick

namespace fracstick {

/// Least-squares slope of log(y) against log(x); non-positive entries are skipped.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace fracstick
