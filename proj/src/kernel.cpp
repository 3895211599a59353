#include "fracstick/kernel.hpp"

#include "fracstick/errors.hpp"
#include "fracstick/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace fracstick {
namespace {

constexpr double kSeriesSwitch = 2.0;
constexpr int kSeriesTerms = 40;

// c_k = binom(-a, k) / (2a - 1 + 2k); int_t^inf (1+tau^2)^-a = t^(1-2a) sum c_k t^(-2k).
std::vector<double> tail_coefficients(double a, int terms) {
  std::vector<double> c(terms);
  double binom = 1.0;
  for (int k = 0; k < terms; ++k) {
    c[k] = binom / (2.0 * a - 1.0 + 2.0 * k);
    binom *= (-a - k) / (k + 1.0);
  }
  return c;
}

double tail_series(double t, double a, const std::vector<double>& c) {
  const double inv2 = 1.0 / (t * t);
  double sum = 0.0;
  for (int k = static_cast<int>(c.size()) - 1; k >= 0; --k) sum = sum * inv2 + c[k];
  return std::pow(t, 1.0 - 2.0 * a) * sum;
}

double F_reference(double t, const FractionalParams& p) {
  const double a = p.a();
  const double x = std::fabs(t);
  double value;
  if (x <= kSeriesSwitch) {
    const int panels = std::max(1, static_cast<int>(std::ceil(x / 0.25)));
    value = gauss_integrate_composite([a](double tau) { return std::pow(1.0 + tau * tau, -a); }, 0.0, x,
                                      panels, 20);
  } else {
    static thread_local double cached_a = -1.0;
    static thread_local std::vector<double> coef;
    if (cached_a != a) {
      coef = tail_coefficients(a, kSeriesTerms);
      cached_a = a;
    }
    value = eval_F_infinity(p) - tail_series(x, a, coef);
  }
  return t < 0 ? -value : value;
}

}  // namespace

void FractionalParams::validate() const {
  if (n != 1 && n != 2) throw DomainError("FractionalParams: n must be 1 or 2, got " + std::to_string(n));
  if (!(s > 0.0 && s < 1.0)) throw DomainError("FractionalParams: s must lie in (0,1), got " + std::to_string(s));
}

double eval_F(double t, const FractionalParams& params) {
  params.validate();
  if (!std::isfinite(t)) throw DomainError("eval_F: argument must be finite");
  return F_reference(t, params);
}

double eval_F_prime(double t, const FractionalParams& params) {
  return std::pow(1.0 + t * t, -params.a());
}

double eval_F_infinity(const FractionalParams& params) {
  params.validate();
  const double a = params.a();
  return 0.5 * std::sqrt(std::numbers::pi) * std::tgamma(a - 0.5) / std::tgamma(a);
}

double eval_F_antiderivative(double t, const FractionalParams& params) {
  // int_0^t F = t F(t) - int_0^t tau F'(tau) dtau
  const double a = params.a();
  const double moment = (std::pow(1.0 + t * t, 1.0 - a) - 1.0) / (2.0 * (1.0 - a));
  return t * eval_F(t, params) - moment;
}

double sphere_measure(int dim) {
  switch (dim) {
    case 0: return 2.0;
    case 1: return 2.0 * std::numbers::pi;
    case 2: return 4.0 * std::numbers::pi;
    default: throw DomainError("sphere_measure: dimension must be 0, 1 or 2");
  }
}

double exterior_tail_bound(double mu, const FractionalParams& params) {
  params.validate();
  if (!(mu > 0.0) || !std::isfinite(mu)) throw DomainError("exterior_tail_bound: mu must be positive");
  return sphere_measure(params.n) * std::pow(mu, -params.s) / params.s;
}

KernelTable::KernelTable(const FractionalParams& params)
    : params_(params), f_inf_(eval_F_infinity(params)), inv_dt_(1024.0), dt_(1.0 / 1024.0), t_max_(16.0) {
  const std::size_t count = static_cast<std::size_t>(t_max_ * inv_dt_) + 1;
  f_.resize(count);
  df_.resize(count);
  const double a = params.a();
  const double dt = dt_;
  // Accumulate panel integrals so the table is monotone by construction.
  double acc = 0.0;
  f_[0] = 0.0;
  df_[0] = 1.0;
  for (std::size_t i = 1; i < count; ++i) {
    const double t0 = (i - 1) * dt;
    const double t1 = i * dt;
    acc += gauss_integrate([a](double tau) { return std::pow(1.0 + tau * tau, -a); }, t0, t1, 10);
    f_[i] = acc;
    df_[i] = std::pow(1.0 + t1 * t1, -a);
  }
  tail_coef_ = tail_coefficients(a, 12);
}

double KernelTable::tail(double t) const { return tail_series(t, params_.a(), tail_coef_); }

void KernelTable::far(double x, double& f, double& df) const {
  f = f_inf_ - tail(x);
  df = std::pow(1.0 + x * x, -params_.a());
}

double KernelTable::G(double t) const {
  const double a = params_.a();
  return t * F(t) - (std::pow(1.0 + t * t, 1.0 - a) - 1.0) / (2.0 * (1.0 - a));
}

double KernelTable::F(double t) const {
  double f, df;
  eval(t, f, df);
  return f;
}

double KernelTable::dF(double t) const {
  double f, df;
  eval(t, f, df);
  return df;
}

}  // namespace fracstick
