#include "doctest.h"
#include "fracstick/errors.hpp"
#include "fracstick/kernel.hpp"

#include <cmath>
#include <random>

using namespace fracstick;

TEST_CASE("F against mpmath quadrature") {
  // mpmath: quad((1+t^2)^(-a), [0, t])
  CHECK(eval_F(1.0, {1, 0.5}) == doctest::Approx(0.744303079760492874).epsilon(1e-13));
  CHECK(eval_F(2.0, {2, 0.5}) == doctest::Approx(0.817193219457643045).epsilon(1e-13));
  CHECK(eval_F_infinity({2, 0.5}) == doctest::Approx(0.874019184764039937).epsilon(1e-13));
  CHECK(eval_F(1e6, {2, 0.5}) == doctest::Approx(0.874019184764039937).epsilon(1e-9));
}

TEST_CASE("F is odd, increasing and bounded by F_inf") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(-20.0, 20.0);
  for (int n : {1, 2})
    for (double s : {0.1, 0.5, 0.9}) {
      const FractionalParams p{n, s};
      const double finf = eval_F_infinity(p);
      for (int k = 0; k < 100; ++k) {
        const double t = U(rng);
        const double f = eval_F(t, p);
        CHECK(std::fabs(f + eval_F(-t, p)) <= 1e-12);
        CHECK(std::fabs(f) <= finf + 1e-12);
        CHECK(eval_F(t + 1e-3, p) > f);
      }
    }
}

TEST_CASE("F' matches central differences at second order") {
  const FractionalParams p{2, 0.3};
  for (double t : {-3.0, -0.7, 0.0, 0.4, 1.9, 2.1, 5.0}) {
    const double e1 = std::fabs((eval_F(t + 1e-2, p) - eval_F(t - 1e-2, p)) / 2e-2 - eval_F_prime(t, p));
    const double e2 = std::fabs((eval_F(t + 5e-3, p) - eval_F(t - 5e-3, p)) / 1e-2 - eval_F_prime(t, p));
    CHECK(e1 < 1e-4);
    // halving the step cuts the error by about four
    if (e1 > 1e-10) CHECK(e2 < 0.3 * e1);
  }
}

TEST_CASE("series and quadrature branches meet at |t| = 2") {
  for (double s : {0.2, 0.8}) {
    const FractionalParams p{1, s};
    CHECK(eval_F(2.0 - 1e-12, p) == doctest::Approx(eval_F(2.0 + 1e-12, p)).epsilon(1e-11));
  }
}

TEST_CASE("kernel table reproduces F and F'") {
  for (double s : {0.3, 0.7}) {
    const FractionalParams p{2, s};
    const KernelTable T(p);
    for (double t = -30.0; t <= 30.0; t += 0.173) {
      double f, df;
      T.eval(t, f, df);
      CHECK(f == doctest::Approx(eval_F(t, p)).epsilon(1e-10));
      CHECK(df == doctest::Approx(eval_F_prime(t, p)).epsilon(1e-8));
    }
  }
}

TEST_CASE("antiderivative G differentiates to F") {
  const FractionalParams p{1, 0.5};
  const KernelTable T(p);
  for (double t : {-4.0, -0.5, 0.3, 1.0, 3.0}) {
    const double d = (eval_F_antiderivative(t + 1e-5, p) - eval_F_antiderivative(t - 1e-5, p)) / 2e-5;
    CHECK(d == doctest::Approx(eval_F(t, p)).epsilon(1e-7));
    CHECK(T.G(t) == doctest::Approx(eval_F_antiderivative(t, p)).epsilon(1e-9));
  }
  CHECK(eval_F_antiderivative(0.0, p) == 0.0);
}

TEST_CASE("sphere measures and tail bound") {
  CHECK(sphere_measure(0) == 2.0);
  CHECK(sphere_measure(1) == doctest::Approx(2 * M_PI));
  CHECK(sphere_measure(2) == doctest::Approx(4 * M_PI));
  CHECK(exterior_tail_bound(0.5, {2, 0.5}) == doctest::Approx(4 * M_PI * std::pow(0.5, -0.5) / 0.5));
}

TEST_CASE("parameters outside the admissible range are rejected") {
  CHECK_THROWS_AS(eval_F(1.0, {2, 0.0}), DomainError);
  CHECK_THROWS_AS(eval_F(1.0, {2, 1.0}), DomainError);
  CHECK_THROWS_AS(eval_F(1.0, {0, 0.5}), DomainError);
}
