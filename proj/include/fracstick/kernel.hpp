#pragma once

#include <vector>

namespace fracstick {

struct FractionalParams {
  int n = 2;
  double s = 0.5;

  /// Throws DomainError unless n in {1,2} and 0 < s < 1.
  void validate() const;
  /// Exponent of the integrand of F: (n+1+s)/2.
  double a() const { return 0.5 * (n + 1 + s); }
};

/// F(t) = int_0^t (1+tau^2)^(-(n+1+s)/2) dtau.
double eval_F(double t, const FractionalParams& params);

/// F'(t) = (1+t^2)^(-(n+1+s)/2).
double eval_F_prime(double t, const FractionalParams& params);

double eval_F_infinity(const FractionalParams& params);

/// Antiderivative of F vanishing at 0 (even in t).
double eval_F_antiderivative(double t, const FractionalParams& params);

/// Surface measure of the unit sphere S^dim for dim in {0,1,2}.
double sphere_measure(int dim);

/// Upper bound for the kernel mass |X-P|^(-(n+1+s)) outside the cylinder of
/// radius mu centred at P; the cylinder contains B_mu(P), so the bound is
/// |S^n| mu^(-s) / s.
double exterior_tail_bound(double mu, const FractionalParams& params);

/// Cached cubic Hermite interpolant of F for use inside hot loops.
/// Max error below 1e-12 on [0, 16]; the asymptotic series takes over beyond.
class KernelTable {
 public:
  explicit KernelTable(const FractionalParams& params);

  double F(double t) const;
  double dF(double t) const;
  /// F and F' together; cheaper than two calls.
  void eval(double t, double& f, double& df) const {
    const double x = t < 0 ? -t : t;
    if (x >= t_max_) {
      far(x, f, df);
    } else {
      const double pos = x * inv_dt_;
      const std::size_t i = static_cast<std::size_t>(pos);
      const double u = pos - static_cast<double>(i);
      const double f0 = f_[i], f1 = f_[i + 1];
      const double m0 = df_[i] * dt_, m1 = df_[i + 1] * dt_;
      const double u2 = u * u, u3 = u2 * u;
      f = (2 * u3 - 3 * u2 + 1) * f0 + (u3 - 2 * u2 + u) * m0 + (-2 * u3 + 3 * u2) * f1 + (u3 - u2) * m1;
      df = ((6 * u2 - 6 * u) * (f0 - f1) + (3 * u2 - 4 * u + 1) * m0 + (3 * u2 - 2 * u) * m1) * inv_dt_;
    }
    if (t < 0) f = -f;
  }
  /// Antiderivative of F, even in t.
  double G(double t) const;
  double F_infinity() const { return f_inf_; }
  const FractionalParams& params() const { return params_; }

 private:
  double tail(double t) const;
  void far(double x, double& f, double& df) const;

  FractionalParams params_;
  double f_inf_;
  double inv_dt_;
  double dt_;
  double t_max_;
  std::vector<double> f_;
  std::vector<double> df_;
  std::vector<double> tail_coef_;
};

}  // namespace fracstick
