#include "doctest.h"
#include "fracstick/analysis.hpp"
#include "fracstick/errors.hpp"

#include <cmath>
#include <memory>

using namespace fracstick;

namespace {

const FractionalParams kP{2, 0.5};

double tail_ratio(const DichotomyResult& r, int from) {
  double acc = 0.0;
  int m = 0;
  for (int k = from; k < static_cast<int>(r.shell_terms.size()); ++k, ++m) acc += r.shell_terms[k] / r.shell_terms[k - 1];
  return acc / m;
}

GraphFunction constant_graph(double value) {
  const Grid g = Grid::over_box(Box{2, {-1, -1}, {1, 1}}, 64);
  auto d = std::make_shared<Datum>(Datum::constant(value));
  std::vector<std::uint8_t> mask(g.size(), 0);
  for (std::size_t i = 0; i < g.size(); ++i) mask[i] = g.node(i)[1] > 0;
  return GraphFunction::from_values(g, std::vector<double>(g.size(), value), mask, d);
}

}  // namespace

TEST_CASE("shell ratios follow 2^(1+s-beta)") {
  for (double beta : {1.2, 1.5, 1.7}) {
    const DichotomyResult r = wedge_integral_partial(beta, 0.5, 0.125, 0.5, 12, kP);
    CHECK(tail_ratio(r, 6) == doctest::Approx(std::pow(2.0, 1.5 - beta)).epsilon(0.05));
    for (std::size_t k = 1; k < r.partial_sums.size(); ++k) {
      CHECK(r.shell_terms[k] > 0.0);
      CHECK(r.partial_sums[k] >= r.partial_sums[k - 1]);
    }
  }
}

TEST_CASE("verdicts on both sides of beta = 1 + s") {
  const DichotomyResult crit = wedge_integral_partial(1.5, 0.5, 0.125, 0.5, 12, kP);
  CHECK(crit.verdict == Verdict::Diverges);
  for (int k = 5; k <= 12; ++k) CHECK(crit.shell_terms[k - 1] == doctest::Approx(crit.shell_terms[11]).epsilon(0.1));
  const DichotomyResult fast = wedge_integral_partial(1.7, 0.5, 0.125, 0.5, 12, kP);
  CHECK(fast.verdict == Verdict::Converges);
  CHECK(fast.fitted_ratio == doctest::Approx(std::pow(2.0, -0.2)).epsilon(0.05));
  const DichotomyResult lip = wedge_integral_partial(1.0, 0.5, 0.125, 0.5, 12, kP);
  CHECK(lip.verdict == Verdict::Diverges);
  CHECK(lip.fitted_ratio == doctest::Approx(std::sqrt(2.0)).epsilon(0.05));
  CHECK(std::string(to_string(Verdict::Converges)) == "converges");
}

TEST_CASE("dichotomy preconditions and truncation") {
  CHECK_THROWS_AS(wedge_integral_partial(1.5, 0.5, 0.5, 0.5, 12, kP), PreconditionError);
  CHECK_THROWS_AS(wedge_integral_partial(1.5, 0.5, 0.125, 1.5, 12, kP), PreconditionError);
  CHECK_THROWS_AS(wedge_integral_partial(1.5, 0.5, 0.125, 0.5, 12, {1, 0.5}), PreconditionError);
  const DichotomyResult r = wedge_integral_partial(1.5, 0.5, 0.125, 0.5, 60, kP);
  CHECK(r.truncated);
  CHECK(r.shell_terms.size() < 60);
}

TEST_CASE("probes of constant graphs") {
  const StickinessReport zero = continuity_modulus(constant_graph(0.0), {0, 0}, {0.2, 0.1, 0.05});
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(zero.sup[j] == 0.0);
    CHECK(zero.inf[j] == 0.0);
  }
  const StickinessReport shifted = continuity_modulus(constant_graph(0.7), {0, 0}, {0.2, 0.1, 0.05});
  for (std::size_t j = 0; j < 3; ++j) {
    CHECK(shifted.sup[j] == doctest::Approx(0.7));
    CHECK(shifted.modulus[j] == 0.0);
  }
  const StickinessReport jump = measure_jump(constant_graph(0.0), TangentSet{2, 0.3}, {0.2, 0.1});
  CHECK(jump.inf[1] == 0.0);
  CHECK_THROWS_AS(continuity_modulus(constant_graph(0.0), {0, 0}, {0.1, 0.2}), PreconditionError);
  CHECK_THROWS_AS(continuity_modulus(constant_graph(0.0), {0, 0}, {0.2, 0.01}), ResolutionError);
}

TEST_CASE("strided probes see the nodes of the coarser grid") {
  auto linear = [](int cells) {
    const Grid g = Grid::over_box(Box{2, {-1, -1}, {1, 1}}, cells);
    auto d = std::make_shared<Datum>(Datum::constant(0.0));
    std::vector<double> v(g.size());
    std::vector<std::uint8_t> mask(g.size(), 0);
    for (std::size_t i = 0; i < g.size(); ++i) {
      v[i] = g.node(i)[0] + 2.0 * g.node(i)[1];
      mask[i] = g.node(i)[1] > 0;
    }
    return GraphFunction::from_values(g, v, mask, d);
  };
  const std::vector<double> radii{0.3, 0.15, 0.07};
  const StickinessReport coarse = continuity_modulus(linear(32), {0, 0}, radii);
  const StickinessReport fine = continuity_modulus(linear(64), {0, 0}, radii, 2);
  CHECK(fine.counts == coarse.counts);
  for (std::size_t j = 0; j < radii.size(); ++j) CHECK(fine.modulus[j] == doctest::Approx(coarse.modulus[j]).epsilon(1e-14));
  CHECK(continuity_modulus(linear(64), {0, 0}, radii).counts[0] > coarse.counts[0]);
  CHECK_THROWS_AS(continuity_modulus(linear(64), {0, 0}, radii, 3), PreconditionError);
  CHECK_THROWS_AS(continuity_modulus(linear(64), {0, 0}, radii, 0), PreconditionError);
}

TEST_CASE("log-log slope") {
  CHECK(loglog_slope({1e-1, 1e-2, 1e-3}, {3e-2, 3e-4, 3e-6}) == doctest::Approx(2.0));
}
