#include "fracstick/curvature.hpp"

#include "fracstick/errors.hpp"
#include "fracstick/parallel.hpp"
#include "fracstick/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

namespace fracstick {
namespace {

// Cutoff of the local correction: smooth at 0, C^3 at 1.
double chi(double t) {
  if (t >= 1.0) return 0.0;
  const double q = 1.0 - t * t;
  return q * q * q * q;
}

constexpr int kFarPoints = 20;
constexpr int kAngles = 128;

}  // namespace

GraphCurvatureOperator::GraphCurvatureOperator(const Grid& grid, std::shared_ptr<const Datum> datum,
                                               std::vector<std::uint8_t> smooth_mask, const FractionalParams& params,
                                               double R, GraphCurvatureOptions options)
    : grid_(grid),
      datum_(std::move(datum)),
      smooth_(std::move(smooth_mask)),
      params_(params),
      R_(R),
      options_(options),
      table_(params) {
  params_.validate();
  if (params_.n != grid_.dim) throw PreconditionError("graph curvature: grid dimension differs from n");
  if (!(R_ >= 4.0 * grid_.h * (1 - 1e-12))) throw ResolutionError("graph curvature: R must be at least 4h");
  if (smooth_.size() != grid_.size()) throw PreconditionError("graph curvature: mask size differs from the grid");
  if (options_.difference_order != 2 && options_.difference_order != 4)
    throw PreconditionError("graph curvature: difference order must be 2 or 4");
  const int n = params_.n;
  const double h = grid_.h;
  const double s = params_.s;

  pad_ = static_cast<int>(std::ceil(R_ / h)) + 2;
  ext_count_[0] = grid_.count[0] + 2 * pad_;
  ext_count_[1] = n == 2 ? grid_.count[1] + 2 * pad_ : 1;
  field_.assign(static_cast<std::size_t>(ext_count_[0]) * ext_count_[1], 0.0);
  for (int j = 0; j < ext_count_[1]; ++j)
    for (int i = 0; i < ext_count_[0]; ++i) {
      const int gi = i - pad_, gj = n == 2 ? j - pad_ : 0;
      field_[static_cast<std::size_t>(j) * ext_count_[0] + i] = (*datum_)(grid_.node(gi, gj));
    }

  // half lattice, ascending |y| then lexicographic (j, i)
  const int K = static_cast<int>(std::ceil(R_ / h + 0.5));
  std::vector<std::tuple<long, int, int>> offsets;
  for (int j = 0; j <= (n == 2 ? K : 0); ++j)
    for (int i = -K; i <= K; ++i) {
      if (j == 0 && i <= 0) continue;
      offsets.emplace_back(static_cast<long>(i) * i + static_cast<long>(j) * j, j, i);
    }
  std::sort(offsets.begin(), offsets.end());
  const double cell = std::pow(h, n);
  for (const auto& [r2, j, i] : offsets) {
    const double r = h * std::sqrt(static_cast<double>(r2));
    const double w = cell * std::clamp((R_ - r) / h + 0.5, 0.0, 1.0);
    if (w <= 0.0) continue;
    delta_.push_back(static_cast<long>(j) * ext_count_[0] + i);
    coef_.push_back(2.0 * w * std::pow(r, -(n + s)));
    inv_r_.push_back(1.0 / r);
    dist_.push_back(r);
  }

  // local correction lattice
  const double cells = std::min(options_.correction_cells, std::floor(R_ / h) - 1.0);
  R0_ = cells * h;
  chi_moment_ = std::pow(R0_, 1.0 - s) / (1.0 - s) *
                gauss_integrate([s](double v) { return chi(std::pow(v, 1.0 / (1.0 - s))); }, 0.0, 1.0, 30);
  const int K0 = static_cast<int>(std::ceil(cells));
  for (int j = 0; j <= (n == 2 ? K0 : 0); ++j)
    for (int i = -K0; i <= K0; ++i) {
      if (j == 0 && i <= 0) continue;
      const double r = h * std::hypot(i, j);
      const double c = chi(r / R0_);
      if (c <= 0.0) continue;
      corr_dir_.push_back({h * i / r, h * j / r});
      corr_weight_.push_back(2.0 * cell * std::pow(r, 1.0 - n - s) * c);
    }
}

std::size_t GraphCurvatureOperator::ext_index(std::size_t node) const {
  const auto c = grid_.coords(node);
  const int j = params_.n == 2 ? c[1] + pad_ : 0;
  return static_cast<std::size_t>(j) * ext_count_[0] + (c[0] + pad_);
}

void GraphCurvatureOperator::load(const std::vector<double>& values) {
  if (values.size() != grid_.size()) throw PreconditionError("graph curvature: value count differs from the grid");
  for (std::size_t k = 0; k < values.size(); ++k) field_[ext_index(k)] = values[k];
}

void GraphCurvatureOperator::set_value(std::size_t node, double value) { field_[ext_index(node)] = value; }

bool GraphCurvatureOperator::stencil_smooth(std::size_t node) const {
  const auto c = grid_.coords(node);
  const int w = options_.difference_order == 4 ? 2 : 1;
  const int jr = params_.n == 2 ? w : 0;
  for (int dj = -jr; dj <= jr; ++dj)
    for (int di = -w; di <= w; ++di) {
      const int i = c[0] + di, j = c[1] + dj;
      if (i < 0 || i >= grid_.count[0] || j < 0 || j >= grid_.count[1]) return false;
      if (!smooth_[grid_.index(i, j)]) return false;
    }
  return true;
}

void GraphCurvatureOperator::correction_kernel(const double* p, double K[3]) const {
  const auto& F = table_;
  double theta[3] = {0, 0, 0};
  if (params_.n == 1) {
    theta[0] = F.dF(p[0]) + F.dF(-p[0]);
  } else {
    for (int k = 0; k < kAngles; ++k) {
      const double a = 2.0 * std::numbers::pi * (k + 0.5) / kAngles;
      const double c = std::cos(a), sn = std::sin(a);
      const double w = F.dF(p[0] * c + p[1] * sn) * 2.0 * std::numbers::pi / kAngles;
      theta[0] += w * c * c;
      theta[1] += w * sn * sn;
      theta[2] += w * c * sn;
    }
  }
  double lattice[3] = {0, 0, 0};
  for (std::size_t k = 0; k < corr_dir_.size(); ++k) {
    const auto& d = corr_dir_[k];
    const double w = corr_weight_[k] * F.dF(p[0] * d[0] + p[1] * d[1]);
    lattice[0] += w * d[0] * d[0];
    lattice[1] += w * d[1] * d[1];
    lattice[2] += w * d[0] * d[1];
  }
  for (int i = 0; i < 3; ++i) K[i] = -chi_moment_ * theta[i] + lattice[i];
}

void GraphCurvatureOperator::correction_terms(std::size_t node, double& c0, double& c1, double& third) const {
  const double h = grid_.h;
  const std::size_t e = ext_index(node);
  const long sx = 1, sy = ext_count_[0];
  const double* u = field_.data();
  double p[2] = {(u[e + sx] - u[e - sx]) / (2 * h), 0.0};
  if (params_.n == 2) p[1] = (u[e + sy] - u[e - sy]) / (2 * h);
  double K[3];
  correction_kernel(p, K);
  const double h2 = h * h;
  if (options_.difference_order == 4) {
    c0 = K[0] * (16.0 * (u[e + sx] + u[e - sx]) - (u[e + 2 * sx] + u[e - 2 * sx])) / (12.0 * h2);
    c1 = -2.5 * K[0] / h2;
  } else {
    c0 = K[0] * (u[e + sx] + u[e - sx]) / h2;
    c1 = -2.0 * K[0] / h2;
  }
  third = std::fabs(K[0]) * std::fabs(u[e + 2 * sx] - 2 * u[e + sx] + 2 * u[e - sx] - u[e - 2 * sx]) / (2 * h2);
  if (params_.n == 2) {
    double a12 = (u[e + sx + sy] - u[e + sx - sy] - u[e - sx + sy] + u[e - sx - sy]) / (4 * h2);
    if (options_.difference_order == 4) {
      const long dx = 2 * sx, dy = 2 * sy;
      const double wide = (u[e + dx + dy] - u[e + dx - dy] - u[e - dx + dy] + u[e - dx - dy]) / (16 * h2);
      a12 = (4.0 * a12 - wide) / 3.0;
      c0 += K[1] * (16.0 * (u[e + sy] + u[e - sy]) - (u[e + 2 * sy] + u[e - 2 * sy])) / (12.0 * h2) + 2.0 * K[2] * a12;
      c1 += -2.5 * K[1] / h2;
    } else {
      c0 += K[1] * (u[e + sy] + u[e - sy]) / h2 + 2.0 * K[2] * a12;
      c1 += -2.0 * K[1] / h2;
    }
    third += std::fabs(K[1]) * std::fabs(u[e + 2 * sy] - 2 * u[e + sy] + 2 * u[e - sy] - u[e - 2 * sy]) / (2 * h2);
  }
}

double GraphCurvatureOperator::far_value(double t, double mean, double* dfar) const {
  const double s = params_.s;
  const double scale = 2.0 * sphere_measure(params_.n - 1) * std::pow(R_, -s) / s;
  const GaussRule& rule = gauss_rule(kFarPoints);
  double v = 0.0, dv = 0.0;
  for (std::size_t q = 0; q < rule.x.size(); ++q) {
    const double pq = 0.5 * (rule.x[q] + 1.0);
    const double k = std::pow(pq, 1.0 / s) / R_;
    double f, df;
    table_.eval((t - mean) * k, f, df);
    v += 0.5 * rule.w[q] * f;
    dv += 0.5 * rule.w[q] * df * k;
  }
  if (dfar) *dfar = scale * dv;
  return scale * v;
}

void GraphCurvatureOperator::local(std::size_t node, Local& out) const {
  out.op_ = this;
  const std::size_t e = ext_index(node);
  const std::size_t m = delta_.size();
  out.minus_.resize(m);
  out.plus_.resize(m);
  const double* u = field_.data();
  for (std::size_t k = 0; k < m; ++k) {
    out.minus_[k] = u[e - delta_[k]];
    out.plus_[k] = u[e + delta_[k]];
  }
  out.far_mean_ = datum_->sphere_mean(grid_.node(node), R_, params_.n);
  out.c0_ = out.c1_ = 0.0;
  const bool apply = options_.singular == SingularMode::Correct ||
                     (options_.singular == SingularMode::Auto && stencil_smooth(node));
  if (apply) {
    double third;
    correction_terms(node, out.c0_, out.c1_, third);
  }
}

void GraphCurvatureOperator::Local::eval(double t, double& H, double& dH) const {
  const KernelTable& F = op_->table_;
  const double* coef = op_->coef_.data();
  const double* ir = op_->inv_r_.data();
  const std::size_t m = minus_.size();
  double sum = 0.0, dsum = 0.0;
  for (std::size_t k = 0; k < m; ++k) {
    double f1, d1, f2, d2;
    F.eval((t - minus_[k]) * ir[k], f1, d1);
    F.eval((t - plus_[k]) * ir[k], f2, d2);
    sum += coef[k] * (f1 + f2);
    dsum += coef[k] * ir[k] * (d1 + d2);
  }
  double dfar;
  const double far = op_->far_value(t, far_mean_, &dfar);
  H = sum + far + c0_ + c1_ * t;
  dH = dsum + dfar + c1_;
}

double GraphCurvatureOperator::curvature(std::size_t node) const {
  thread_local Local scratch;
  local(node, scratch);
  double H, dH;
  scratch.eval(value(node), H, dH);
  return H;
}

double GraphCurvatureOperator::truncation_error() const {
  const int n = params_.n;
  const double s = params_.s;
  const double S = sphere_measure(n - 1);
  const double cap = 4.0 * S * table_.F_infinity() * std::pow(R_, -s) / s;
  const double osc = datum_->upper() - datum_->lower();
  if (!std::isfinite(osc)) return cap;
  const double far = 2.0 * S * osc * std::pow(R_, -1.0 - s) / (1.0 + s);
  const double ramp = 2.0 * S * std::pow(R_, -1.0 - s) * 0.5 * grid_.h * std::min(table_.F_infinity(), osc / R_);
  return std::min(far + ramp, cap);
}

CurvatureSample GraphCurvatureOperator::sample(std::size_t node) const {
  CurvatureSample out;
  const Vec2 x = grid_.node(node);
  const double t = value(node);
  out.location = params_.n == 1 ? Vec3{x[0], t, 0.0} : Vec3{x[0], x[1], t};
  out.value = curvature(node);
  out.R = R_;
  out.estimated_truncation_error = truncation_error();
  const bool apply = options_.singular == SingularMode::Correct ||
                     (options_.singular == SingularMode::Auto && stencil_smooth(node));
  const double h = grid_.h;
  const double s = params_.s;
  if (apply) {
    double c0, c1, third;
    correction_terms(node, c0, c1, third);
    out.singular_error = third;
  } else {
    const std::size_t e = ext_index(node);
    double L = 0.0;
    for (int axis = 0; axis < params_.n; ++axis) {
      const long d = axis == 0 ? 1 : ext_count_[0];
      L = std::max({L, std::fabs(field_[e + d] - field_[e]), std::fabs(field_[e] - field_[e - d])});
    }
    L /= h;
    out.singular_error = 2.0 * sphere_measure(params_.n - 1) * L * std::pow(h, 1.0 - s) / (1.0 - s);
  }
  return out;
}

double GraphCurvatureOperator::solve_node(std::size_t node, double lo, double hi, double start, double tol,
                                          Local& scratch) const {
  local(node, scratch);
  double a = lo, b = hi;
  double t = std::clamp(start, lo, hi);
  double H, dH;
  scratch.eval(t, H, dH);
  bool bracket_checked = false;
  for (int it = 0; it < 200; ++it) {
    if (std::fabs(H) <= tol) return t;
    if (H < 0)
      a = t;
    else
      b = t;
    if (b - a <= 4e-16 * std::max(1.0, std::fabs(t))) {
      if (!bracket_checked && (a == lo || b == hi)) {
        // the root may sit outside the assumed bracket; widen once
        bracket_checked = true;
        const double width = std::max(hi - lo, 1e-3);
        if (a == lo) a = lo - width;
        if (b == hi) b = hi + width;
      } else {
        return t;
      }
    }
    double next = t - H / dH;
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    t = next;
    scratch.eval(t, H, dH);
  }
  return t;
}

double GraphCurvatureOperator::lattice_energy(const std::vector<std::uint8_t>& active) const {
  double total = 0.0;
  for (std::size_t node = 0; node < grid_.size(); ++node) {
    if (!active[node]) continue;
    const std::size_t e = ext_index(node);
    const auto c = grid_.coords(node);
    const double t = field_[e];
    for (std::size_t k = 0; k < delta_.size(); ++k) {
      for (int sign : {-1, 1}) {
        const long idx = static_cast<long>(e) + sign * delta_[k];
        // halve pairs whose other end is also active, so each pair counts once
        const long ei = idx % ext_count_[0] - pad_;
        const long ej = params_.n == 2 ? idx / ext_count_[0] - pad_ : 0;
        double weight = 1.0;
        if (ei >= 0 && ei < grid_.count[0] && ej >= 0 && ej < grid_.count[1] &&
            active[grid_.index(static_cast<int>(ei), static_cast<int>(ej))])
          weight = 0.5;
        const double d = (t - field_[idx]) * inv_r_[k];
        total += weight * coef_[k] * dist_[k] * table_.G(d);
      }
    }
    (void)c;
  }
  return total;
}

CurvatureSample graph_curvature(const GraphFunction& u, std::size_t node, const FractionalParams& params, double R,
                                GraphCurvatureOptions options) {
  if (node >= u.grid.size() || !u.grid.strictly_inside(node))
    throw DomainError("graph_curvature: node must lie strictly inside the grid");
  GraphCurvatureOperator op(u.grid, u.datum, u.interior, params, R, options);
  op.load(u.values);
  return op.sample(node);
}

std::vector<CurvatureSample> graph_curvature_batch(const GraphFunction& u, const std::vector<std::size_t>& nodes,
                                                   const FractionalParams& params, double R,
                                                   GraphCurvatureOptions options) {
  for (std::size_t node : nodes)
    if (node >= u.grid.size() || !u.grid.strictly_inside(node))
      throw DomainError("graph_curvature: node must lie strictly inside the grid");
  GraphCurvatureOperator op(u.grid, u.datum, u.interior, params, R, options);
  op.load(u.values);
  std::vector<CurvatureSample> out(nodes.size());
  parallel_for(nodes.size(), [&](std::size_t k) { out[k] = op.sample(nodes[k]); });
  return out;
}

}  // namespace fracstick
