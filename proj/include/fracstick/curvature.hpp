#pragma once

#include "fracstick/graph.hpp"
#include "fracstick/kernel.hpp"
#include "fracstick/voxel.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

namespace fracstick {

/// Curvature with the normalisation constant fixed to 1: the raw integral
/// of (chi_{E^c} - chi_E) |X-P|^(-(n+1+s)).
struct CurvatureSample {
  Vec3 location{0, 0, 0};
  double value = 0.0;
  double R = 0.0;
  double estimated_truncation_error = 0.0;
  /// Error attributed to the cells nearest the singularity (or r_in for sets).
  double singular_error = 0.0;
};

enum class SingularMode {
  Auto,     ///< correct where the 3^n stencil lies in the smooth part, skip elsewhere
  Skip,     ///< omit the origin cell and report a Lipschitz bound
  Correct,  ///< always apply the second-order local correction
};

struct GraphCurvatureOptions {
  SingularMode singular = SingularMode::Auto;
  /// Radius of the local correction in cells.
  double correction_cells = 6.0;
  /// Order of the second differences in the correction. 2 keeps the scheme
  /// monotone (the solver needs it); 4 is more accurate on smooth graphs.
  int difference_order = 2;
};

/// Lattice discretisation of the graph curvature
///   2 int F((u(x)-u(x-y))/|y|) |y|^(-(n+s)) dy
/// with antipodal pairs summed together, ramp weights at |y| = R, a radial
/// far field using the sphere mean of psi, and a local correction for the
/// missing cells near y = 0.
class GraphCurvatureOperator {
 public:
  GraphCurvatureOperator(const Grid& grid, std::shared_ptr<const Datum> datum, std::vector<std::uint8_t> smooth_mask,
                         const FractionalParams& params, double R, GraphCurvatureOptions options = {});

  /// Copies grid values into the padded field.
  void load(const std::vector<double>& values);
  void set_value(std::size_t node, double value);
  double value(std::size_t node) const { return field_[ext_index(node)]; }

  double curvature(std::size_t node) const;
  CurvatureSample sample(std::size_t node) const;

  /// The scalar map t -> H(x) with u(x) = t and everything else frozen.
  class Local {
   public:
    void eval(double t, double& H, double& dH) const;
    double far_mean() const { return far_mean_; }

   private:
    friend class GraphCurvatureOperator;
    const GraphCurvatureOperator* op_ = nullptr;
    std::vector<double> minus_, plus_;
    double far_mean_ = 0.0;
    double c0_ = 0.0, c1_ = 0.0;
  };
  void local(std::size_t node, Local& out) const;

  /// Root of H(x) = 0 in [lo, hi] by safeguarded Newton; `start` is the first guess.
  double solve_node(std::size_t node, double lo, double hi, double start, double tol, Local& scratch) const;

  /// Lattice pair energy sum c |y| G(d/|y|) over pairs touching a smooth-mask node.
  double lattice_energy(const std::vector<std::uint8_t>& active) const;

  const Grid& grid() const { return grid_; }
  const FractionalParams& params() const { return params_; }
  double R() const { return R_; }
  const KernelTable& table() const { return table_; }
  std::size_t pair_count() const { return coef_.size(); }

 private:
  std::size_t ext_index(std::size_t node) const;
  bool stencil_smooth(std::size_t node) const;
  /// Correction coefficients K_ij(p) so that correction = sum K_ij A_ij.
  void correction_kernel(const double* p, double K[3]) const;
  void correction_terms(std::size_t node, double& c0, double& c1, double& third) const;
  double far_value(double t, double mean, double* dfar) const;
  double truncation_error() const;

  Grid grid_;
  std::shared_ptr<const Datum> datum_;
  std::vector<std::uint8_t> smooth_;
  FractionalParams params_;
  double R_;
  GraphCurvatureOptions options_;
  KernelTable table_;

  int pad_ = 0;
  std::array<int, 2> ext_count_{1, 1};
  std::vector<double> field_;

  std::vector<long> delta_;
  std::vector<double> coef_, inv_r_, dist_;

  // local correction lattice (half lattice, |y| < R0)
  double R0_ = 0.0;
  double chi_moment_ = 0.0;
  std::vector<std::array<double, 2>> corr_dir_;
  std::vector<double> corr_weight_;
};

/// One-off evaluation at a grid node. Throws DomainError if the node is on the
/// outer layer or outside the grid, ResolutionError if R < 4h.
CurvatureSample graph_curvature(const GraphFunction& u, std::size_t node, const FractionalParams& params, double R,
                                GraphCurvatureOptions options = {});

/// Evaluates many nodes concurrently; results in input order.
std::vector<CurvatureSample> graph_curvature_batch(const GraphFunction& u, const std::vector<std::size_t>& nodes,
                                                   const FractionalParams& params, double R,
                                                   GraphCurvatureOptions options = {});

// ---------------------------------------------------------------------------
// General sets

/// A measurable set in R^{n+1}, queried pointwise.
class Region {
 public:
  struct Tail {
    double value = 0.0;
    double error = 0.0;
  };
  virtual ~Region() = default;
  virtual int dim() const = 0;
  virtual bool contains(const Vec3& X) const = 0;
  /// Contribution of |X-P| > R when the region admits a closed form there.
  virtual std::optional<Tail> tail(const Vec3&, double, const FractionalParams&) const { return std::nullopt; }
  virtual std::optional<Vec3> normal_hint(const Vec3&) const { return std::nullopt; }
};

/// {x_{n+1} < height(x)}; far_lo/far_hi bound the height far away.
class SubgraphRegion : public Region {
 public:
  SubgraphRegion(int n, std::function<double(const Vec2&)> height, double far_lo, double far_hi);
  /// Piecewise-linear interpolation of the grid values, psi outside the grid.
  static SubgraphRegion from_graph(const GraphFunction& u);

  int dim() const override { return n_ + 1; }
  bool contains(const Vec3& X) const override;
  std::optional<Tail> tail(const Vec3& P, double R, const FractionalParams& params) const override;
  std::optional<Vec3> normal_hint(const Vec3& P) const override;
  double height(const Vec2& x) const { return height_(x); }

 private:
  int n_;
  std::function<double(const Vec2&)> height_;
  double far_lo_, far_hi_;
};

class BallRegion : public Region {
 public:
  BallRegion(int dim, const Vec3& centre, double radius);
  int dim() const override { return dim_; }
  bool contains(const Vec3& X) const override;
  std::optional<Tail> tail(const Vec3& P, double R, const FractionalParams& params) const override;
  std::optional<Vec3> normal_hint(const Vec3& P) const override;

 private:
  int dim_;
  Vec3 centre_;
  double radius_;
};

class VoxelRegion : public Region {
 public:
  explicit VoxelRegion(VoxelSet set);
  int dim() const override { return set_.dim(); }
  bool contains(const Vec3& X) const override { return set_.contains(X); }
  std::optional<Tail> tail(const Vec3& P, double R, const FractionalParams& params) const override;
  const VoxelSet& set() const { return set_; }

 private:
  VoxelSet set_;
};

class ComplementRegion : public Region {
 public:
  explicit ComplementRegion(std::shared_ptr<const Region> inner) : inner_(std::move(inner)) {}
  int dim() const override { return inner_->dim(); }
  bool contains(const Vec3& X) const override { return !inner_->contains(X); }
  std::optional<Tail> tail(const Vec3& P, double R, const FractionalParams& params) const override;
  std::optional<Vec3> normal_hint(const Vec3& P) const override { return inner_->normal_hint(P); }

 private:
  std::shared_ptr<const Region> inner_;
};

/// lambda * E.
class ScaledRegion : public Region {
 public:
  ScaledRegion(std::shared_ptr<const Region> inner, double lambda);
  int dim() const override { return inner_->dim(); }
  bool contains(const Vec3& X) const override;
  std::optional<Tail> tail(const Vec3& P, double R, const FractionalParams& params) const override;
  std::optional<Vec3> normal_hint(const Vec3& P) const override;

 private:
  std::shared_ptr<const Region> inner_;
  double lambda_;
};

struct PvOptions {
  int angular_samples = 512;    ///< circle samples before bisection (2-D)
  int azimuth_samples = 256;    ///< per latitude circle (3-D)
  int polar_panels = 8;         ///< Gauss panels in the polar angle (3-D)
  int max_depth = 6;            ///< adaptive bisection depth per dyadic radial panel
  double tolerance = 1e-9;      ///< relative tolerance per radial panel
};

/// Principal value over r_in < |X-P| < R by exact angular measure per
/// shell; the tail beyond R comes from Region::tail when available.
CurvatureSample set_curvature_pv(const Region& E, const Vec3& P, const FractionalParams& params, double r_in, double R,
                                 PvOptions options = {});

/// (H of lambda E at lambda P, lambda^-s H of E at P), both from
/// set_curvature_pv with r_in and R scaled by lambda on the left.
std::pair<double, double> curvature_scaling_check(std::shared_ptr<const Region> E, const Vec3& P, double lambda,
                                                  const FractionalParams& params, double r_in, double R,
                                                  PvOptions options = {});

}  // namespace fracstick
