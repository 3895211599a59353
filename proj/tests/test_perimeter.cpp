#include "doctest.h"
#include "fracstick/errors.hpp"
#include "fracstick/parallel.hpp"
#include "fracstick/perimeter.hpp"

#include <cmath>
#include <random>

using namespace fracstick;

namespace {

VoxelSet random_set(std::mt19937_64& rng, int m, double fill) {
  std::bernoulli_distribution B(fill);
  VoxelSet v(3, {0, 0, 0}, 1.0 / m, {m, m, m});
  for (std::size_t i = 0; i < v.size(); ++i) v.set(i, B(rng));
  return v;
}

}  // namespace

TEST_CASE("interaction is bitwise symmetric and worker independent") {
  std::mt19937_64 rng(5);
  const VoxelSet A = random_set(rng, 8, 0.4);
  const VoxelSet B = A.complement();
  const FractionalParams p{2, 0.5};
  const double ab = interaction(A, B, p);
  CHECK(ab == interaction(B, A, p));
  set_worker_count(3);
  CHECK(ab == interaction(A, B, p));
  set_worker_count(1);
}

TEST_CASE("two separated squares against a four-dimensional quadrature") {
  // [0,1]^2 and [2,3]x[0,1], s = 0.5: scipy nquad gives 0.2032876721 (1e-14)
  const int m = 32;
  const double h = 1.0 / m;
  const VoxelSet A = VoxelSet::from_predicate(1 + 1, {0, 0, 0}, h, {3 * m, m, 1},
                                              [](const Vec3& x) { return x[0] < 1.0; });
  const VoxelSet B = VoxelSet::from_predicate(2, {0, 0, 0}, h, {3 * m, m, 1},
                                              [](const Vec3& x) { return x[0] > 2.0; });
  CHECK(interaction(A, B, {1, 0.5}) == doctest::Approx(0.2032876721).epsilon(2e-3));
}

TEST_CASE("energy_delta_remove equals the perimeter difference") {
  std::mt19937_64 rng(21);
  const FractionalParams p{2, 0.5};
  const VoxelSet Omega =
      VoxelSet::from_predicate(3, {0, 0, 0}, 0.125, {8, 8, 8}, [](const Vec3& x) {
        return x[0] > 0.25 && x[0] < 0.75 && x[1] > 0.25 && x[1] < 0.75;
      });
  for (int trial = 0; trial < 5; ++trial) {
    const VoxelSet E = random_set(rng, 8, 0.5);
    std::bernoulli_distribution pick(0.3);
    VoxelSet A = E.empty_like();
    for (std::size_t i = 0; i < E.size(); ++i) A.set(i, E.at(i) && Omega.at(i) && pick(rng));
    const double delta = energy_delta_remove(E, A, Omega, p);
    const double direct = fractional_perimeter(E, Omega, p).value - fractional_perimeter(E.minus(A), Omega, p).value;
    CHECK(std::fabs(delta - direct) <= 1e-10 * std::max(1.0, std::fabs(direct)));
  }
}

TEST_CASE("perimeter scales like lambda^(n+1-s) under matched refinement") {
  auto ball = [](const Vec3& x) { return std::pow(x[0] - 0.5, 2) + std::pow(x[1] - 0.5, 2) + std::pow(x[2] - 0.5, 2) < 0.09; };
  const FractionalParams p{2, 0.5};
  const VoxelSet E1 = VoxelSet::from_predicate(3, {0, 0, 0}, 1.0 / 10, {10, 10, 10}, ball);
  const VoxelSet E2 = VoxelSet::from_predicate(3, {0, 0, 0}, 2.0 / 10, {10, 10, 10}, [&](const Vec3& x) {
    return ball({x[0] / 2, x[1] / 2, x[2] / 2});
  });
  const VoxelSet O1 = E1.complement().unite(E1), O2 = E2.complement().unite(E2);
  const double r = fractional_perimeter(E2, O2, p).value / fractional_perimeter(E1, O1, p).value;
  CHECK(r == doctest::Approx(std::pow(2.0, 3 - 0.5)).epsilon(1e-10));
}

TEST_CASE("tail bound is finite when E stays off the box edge") {
  const VoxelSet E = VoxelSet::from_predicate(2, {0, 0, 0}, 0.1, {10, 10, 1}, [](const Vec3& x) {
    return std::fabs(x[0] - 0.5) < 0.2 && std::fabs(x[1] - 0.5) < 0.2;
  });
  const PerimeterResult r = fractional_perimeter(E, E.complement().unite(E), {1, 0.5});
  CHECK(r.value > 0.0);
  CHECK(std::isfinite(r.tail_bound));
  CHECK(r.tail_bound > 0.0);
}

TEST_CASE("overlapping sets and wrong grids are rejected") {
  const VoxelSet A = VoxelSet::from_predicate(2, {0, 0, 0}, 0.25, {4, 4, 1}, [](const Vec3& x) { return x[0] < 0.7; });
  const VoxelSet B = VoxelSet::from_predicate(2, {0, 0, 0}, 0.25, {4, 4, 1}, [](const Vec3& x) { return x[0] > 0.3; });
  CHECK_THROWS_AS(interaction(A, B, {1, 0.5}), PreconditionError);
  const VoxelSet C(2, {0, 0, 0}, 0.5, {2, 2, 1});
  CHECK_THROWS_AS(interaction(A, C, {1, 0.5}), PreconditionError);
  CHECK_THROWS_AS(interaction(A, A.complement(), {2, 0.5}), PreconditionError);
}
