#include "fracstick/graph.hpp"

#include "fracstick/errors.hpp"

#include <cmath>

namespace fracstick {

Grid Grid::over_box(const Box& box, int cells) {
  if (cells < 2) throw ResolutionError("grid: need at least 2 cells");
  Grid g;
  g.dim = box.dim;
  g.h = box.width(0) / cells;
  g.lo = box.lo;
  for (int k = 0; k < g.dim; ++k) {
    const double n = box.width(k) / g.h;
    if (std::fabs(n - std::round(n)) > 1e-9) throw ResolutionError("grid: box sides are not multiples of h");
    const double o = -box.lo[k] / g.h;
    if (std::fabs(o - std::round(o)) > 1e-9) throw ResolutionError("grid: the origin must be a grid node");
    g.count[k] = static_cast<int>(std::round(n)) + 1;
  }
  if (g.dim == 1) {
    g.count[1] = 1;
    g.lo[1] = 0.0;
  }
  return g;
}

Vec2 Grid::node(std::size_t idx) const {
  const auto c = coords(idx);
  return node(c[0], c[1]);
}

std::size_t Grid::origin() const {
  const int i = static_cast<int>(std::lround(-lo[0] / h));
  const int j = dim == 2 ? static_cast<int>(std::lround(-lo[1] / h)) : 0;
  if (i < 0 || i >= count[0] || j < 0 || j >= count[1]) throw DomainError("grid: origin outside the lattice");
  return index(i, j);
}

bool Grid::strictly_inside(std::size_t idx) const {
  if (idx >= size()) return false;
  const auto c = coords(idx);
  if (c[0] <= 0 || c[0] >= count[0] - 1) return false;
  if (dim == 2 && (c[1] <= 0 || c[1] >= count[1] - 1)) return false;
  return true;
}

bool Grid::same_as(const Grid& o) const {
  return dim == o.dim && lo == o.lo && h == o.h && count == o.count;
}

GraphFunction GraphFunction::on_domain(const PlanarDomain& domain, std::shared_ptr<const Datum> datum,
                                       const Grid& grid) {
  GraphFunction u;
  u.grid = grid;
  u.datum = std::move(datum);
  u.values.resize(grid.size());
  u.interior.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec2 x = grid.node(i);
    u.interior[i] = membership(domain, x) == Membership::Interior ? 1 : 0;
    u.values[i] = (*u.datum)(x);
  }
  return u;
}

GraphFunction GraphFunction::from_values(const Grid& grid, std::vector<double> values,
                                         std::vector<std::uint8_t> interior, std::shared_ptr<const Datum> datum) {
  if (values.size() != grid.size() || interior.size() != grid.size())
    throw PreconditionError("GraphFunction: value or mask size differs from the grid");
  GraphFunction u;
  u.grid = grid;
  u.values = std::move(values);
  u.interior = std::move(interior);
  u.datum = std::move(datum);
  return u;
}

void GraphFunction::check_invariants() const {
  double bound = std::max(std::fabs(datum->lower()), std::fabs(datum->upper()));
  if (std::isfinite(cap)) bound = std::max(bound, cap);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) throw PreconditionError("GraphFunction: non-finite value");
    if (!interior[i] && values[i] != (*datum)(grid.node(i)))
      throw PreconditionError("GraphFunction: exterior node differs from the datum");
    if (std::fabs(values[i]) > bound * (1 + 1e-12) + 1e-300)
      throw PreconditionError("GraphFunction: value exceeds the declared bound");
  }
}

std::size_t GraphFunction::interior_count() const {
  std::size_t n = 0;
  for (auto m : interior) n += m;
  return n;
}

}  // namespace fracstick
