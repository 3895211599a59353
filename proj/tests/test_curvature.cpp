#include "doctest.h"
#include "fracstick/curvature.hpp"
#include "fracstick/errors.hpp"

#include <cmath>
#include <memory>

using namespace fracstick;

namespace {

GraphFunction affine_graph(int n, int cells, const Vec2& grad, double offset) {
  const Box box = n == 1 ? Box{1, {-1, 0}, {1, 0}} : Box{2, {-1, -1}, {1, 1}};
  const Grid g = Grid::over_box(box, cells);
  auto datum = std::make_shared<Datum>();
  datum->add_affine(grad, offset);
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) v[i] = (*datum)(g.node(i));
  return GraphFunction::from_values(g, v, std::vector<std::uint8_t>(g.size(), 1), datum);
}

// closed forms from pairing antipodal rays: each inward direction at angle theta to the
// inner normal meets the ball along a chord of length 2 cos(theta), contributing 2 L^(-s)/s
double disk_curvature(double s) {
  return (2 / s) * std::pow(2, -s) * std::sqrt(M_PI) * std::tgamma((1 - s) / 2) / std::tgamma(1 - s / 2);
}
double ball_curvature(double s) { return (2 / s) * std::pow(2, -s) * 2 * M_PI / (1 - s); }

double gaussian_sum(const Vec2& x) {
  return 0.3 * std::exp(-std::pow((x[0] - 0.1) / 0.4, 2)) - 0.2 * std::exp(-std::pow((x[0] + 0.3) / 0.35, 2));
}

}  // namespace

TEST_CASE("affine graphs have zero curvature") {
  for (double s : {0.3, 0.5, 0.8}) {
    const GraphFunction u1 = affine_graph(1, 64, {0.7, 0}, 0.2);
    for (std::size_t node : {10u, 32u, 50u})
      CHECK(std::fabs(graph_curvature(u1, node, {1, s}, 1.0).value) < 1e-8);
    const GraphFunction u2 = affine_graph(2, 32, {0.4, -1.3}, -0.1);
    for (std::size_t node : {u2.grid.index(16, 16), u2.grid.index(5, 20)})
      CHECK(std::fabs(graph_curvature(u2, node, {2, s}, 1.0).value) < 1e-8);
  }
}

TEST_CASE("half-space has zero set curvature at a boundary point") {
  const SubgraphRegion flat1(1, [](const Vec2&) { return 0.25; }, 0.25, 0.25);
  CHECK(std::fabs(set_curvature_pv(flat1, {0.3, 0.25, 0}, {1, 0.5}, 1e-4, 4.0).value) < 1e-6);
  const SubgraphRegion flat2(2, [](const Vec2&) { return 0.0; }, 0.0, 0.0);
  CHECK(std::fabs(set_curvature_pv(flat2, {0.1, -0.2, 0.0}, {2, 0.5}, 1e-4, 4.0).value) < 1e-6);
}

TEST_CASE("disk curvature matches the closed form") {
  const BallRegion disk(2, {0, 0, 0}, 1.0);
  for (double s : {0.3, 0.5, 0.7}) {
    const CurvatureSample c = set_curvature_pv(disk, {1, 0, 0}, {1, s}, 1e-4, 4.0);
    CHECK(c.value == doctest::Approx(disk_curvature(s)).epsilon(1e-5));
    CHECK(std::fabs(c.value - disk_curvature(s)) <= c.estimated_truncation_error + c.singular_error);
  }
  // radius 1/2: homogeneity of degree -s
  const BallRegion half(2, {0, 0, 0}, 0.5);
  CHECK(set_curvature_pv(half, {0, 0.5, 0}, {1, 0.5}, 1e-4, 2.0).value ==
        doctest::Approx(std::pow(0.5, -0.5) * disk_curvature(0.5)).epsilon(1e-5));
}

TEST_CASE("ball curvature in three dimensions matches the closed form") {
  const BallRegion ball(3, {0, 0, 0}, 1.0);
  const CurvatureSample c = set_curvature_pv(ball, {0, 0, 1}, {2, 0.5}, 1e-4, 4.0);
  CHECK(c.value == doctest::Approx(ball_curvature(0.5)).epsilon(1e-4));
}

TEST_CASE("graph curvature agrees with the set principal value (n = 1)") {
  const FractionalParams p{1, 0.5};
  auto datum = std::make_shared<Datum>();
  datum->add_function(gaussian_sum, -0.5, 0.5);
  const Grid g = Grid::over_box(Box{1, {-1, 0}, {1, 0}}, 64);
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) v[i] = gaussian_sum(g.node(i));
  const GraphFunction u = GraphFunction::from_values(g, v, std::vector<std::uint8_t>(g.size(), 1), datum);
  const SubgraphRegion E(1, gaussian_sum, -0.5, 0.5);
  for (int i : {16, 28, 36, 48}) {
    const double gv = graph_curvature(u, i, p, 8.0).value;
    const double pv = set_curvature_pv(E, {g.node(i)[0], v[i], 0}, p, 1e-4, 8.0).value;
    CHECK(std::fabs(gv - pv) <= std::max(0.02 * std::fabs(pv), 1e-3));
  }
}

TEST_CASE("fourth-order differences tighten the agreement on a smooth graph") {
  const FractionalParams p{1, 0.5};
  auto datum = std::make_shared<Datum>();
  datum->add_function(gaussian_sum, -0.5, 0.5);
  const Grid g = Grid::over_box(Box{1, {-1, 0}, {1, 0}}, 64);
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) v[i] = gaussian_sum(g.node(i));
  const GraphFunction u = GraphFunction::from_values(g, v, std::vector<std::uint8_t>(g.size(), 1), datum);
  const SubgraphRegion E(1, gaussian_sum, -0.5, 0.5);
  GraphCurvatureOptions fourth;
  fourth.difference_order = 4;
  double e2 = 0.0, e4 = 0.0;
  for (int i : {16, 24, 32, 40, 48}) {
    const double pv = set_curvature_pv(E, {g.node(i)[0], v[i], 0}, p, 1e-4, 8.0).value;
    e2 = std::max(e2, std::fabs(graph_curvature(u, i, p, 8.0).value - pv));
    e4 = std::max(e4, std::fabs(graph_curvature(u, i, p, 8.0, fourth).value - pv));
  }
  CHECK(e4 < e2);
  GraphCurvatureOptions bad;
  bad.difference_order = 3;
  CHECK_THROWS_AS(graph_curvature(u, 32, p, 8.0, bad), PreconditionError);
}

TEST_CASE("vertical translation leaves graph curvature unchanged") {
  const FractionalParams p{2, 0.4};
  const Grid g = Grid::over_box(Box{2, {-1, -1}, {1, 1}}, 32);
  auto make = [&](double shift) {
    auto datum = std::make_shared<Datum>(parse_datum("bump height=0.3 centre=0.2,0 radius=0.5"));
    datum->add_constant(shift);
    std::vector<double> v(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) v[i] = (*datum)(g.node(i));
    return GraphFunction::from_values(g, v, std::vector<std::uint8_t>(g.size(), 1), datum);
  };
  const std::size_t node = g.index(14, 17);
  CHECK(graph_curvature(make(0.0), node, p, 1.0).value ==
        doctest::Approx(graph_curvature(make(0.75), node, p, 1.0).value).epsilon(1e-12));
}

TEST_CASE("skipped and corrected singular cells agree within the reported bound") {
  const FractionalParams p{1, 0.5};
  auto datum = std::make_shared<Datum>();
  datum->add_function(gaussian_sum, -0.5, 0.5);
  const Grid g = Grid::over_box(Box{1, {-1, 0}, {1, 0}}, 128);
  std::vector<double> v(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) v[i] = gaussian_sum(g.node(i));
  const GraphFunction u = GraphFunction::from_values(g, v, std::vector<std::uint8_t>(g.size(), 1), datum);
  const CurvatureSample skip = graph_curvature(u, 60, p, 4.0, {SingularMode::Skip});
  const CurvatureSample corr = graph_curvature(u, 60, p, 4.0, {SingularMode::Correct});
  CHECK(std::fabs(skip.value - corr.value) <= skip.singular_error);
}

TEST_CASE("curvature scaling on a voxelized disk") {
  auto disk = std::make_shared<VoxelRegion>(VoxelSet::from_predicate(
      2, {-1, -1, 0}, 1.0 / 32, {64, 64, 1}, [](const Vec3& x) { return x[0] * x[0] + x[1] * x[1] < 0.25; }));
  // a face midpoint on the staircase boundary: right face of the voxel at the x-axis
  double edge = 0.0;
  for (int i = 0; i < 64; ++i)
    if (disk->contains({-1 + (i + 0.5) / 32, 1.0 / 64, 0})) edge = -1 + (i + 1) / 32.0;
  const Vec3 P{edge, 1.0 / 64, 0};
  for (double lambda : {0.5, 2.0}) {
    const auto [lhs, rhs] = curvature_scaling_check(disk, P, lambda, {1, 0.5}, 1e-4, 4.0);
    CHECK(lhs == doctest::Approx(rhs).epsilon(0.02));
  }
}

TEST_CASE("errors for bad nodes, radii and points") {
  const GraphFunction u = affine_graph(1, 32, {0, 0}, 0);
  CHECK_THROWS_AS(graph_curvature(u, 0, {1, 0.5}, 1.0), DomainError);
  CHECK_THROWS_AS(graph_curvature(u, 10, {1, 0.5}, 0.1), ResolutionError);
  const BallRegion disk(2, {0, 0, 0}, 1.0);
  CHECK_THROWS_AS(set_curvature_pv(disk, {0.5, 0, 0}, {1, 0.5}, 1e-4, 4.0), DomainError);
  CHECK_THROWS_AS(set_curvature_pv(disk, {1, 0, 0}, {2, 0.5}, 1e-4, 4.0), PreconditionError);
}
