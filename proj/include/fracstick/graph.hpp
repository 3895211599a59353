#pragma once

#include "fracstick/datum.hpp"
#include "fracstick/geometry.hpp"

#include <array>
#include <cstdint>
#include <limits>
#include <memory>
#include <vector>

namespace fracstick {

/// Uniform node lattice lo + h * index; the origin is always a node.
struct Grid {
  int dim = 2;
  Vec2 lo{0.0, 0.0};
  double h = 1.0;
  std::array<int, 2> count{1, 1};

  /// `cells` intervals along axis 0; other axes must divide evenly.
  static Grid over_box(const Box& box, int cells);

  std::size_t size() const { return static_cast<std::size_t>(count[0]) * count[1]; }
  std::size_t index(int i, int j = 0) const { return static_cast<std::size_t>(j) * count[0] + i; }
  std::array<int, 2> coords(std::size_t idx) const {
    return {static_cast<int>(idx % count[0]), static_cast<int>(idx / count[0])};
  }
  Vec2 node(std::size_t idx) const;
  Vec2 node(int i, int j) const { return {lo[0] + h * i, dim == 2 ? lo[1] + h * j : 0.0}; }
  /// Index of the node at the origin.
  std::size_t origin() const;
  /// True if the node is not on the outer layer of the lattice.
  bool strictly_inside(std::size_t idx) const;
  bool same_as(const Grid& other) const;
};

/// Heights on a grid together with the exterior datum and the omega mask.
struct GraphFunction {
  Grid grid;
  std::vector<double> values;
  std::vector<std::uint8_t> interior;
  std::shared_ptr<const Datum> datum;
  double cap = std::numeric_limits<double>::infinity();

  /// Exterior nodes take psi; interior nodes take psi as a placeholder.
  static GraphFunction on_domain(const PlanarDomain& domain, std::shared_ptr<const Datum> datum, const Grid& grid);
  /// Values given explicitly; `interior` marks nodes that belong to the smooth part.
  static GraphFunction from_values(const Grid& grid, std::vector<double> values, std::vector<std::uint8_t> interior,
                                   std::shared_ptr<const Datum> datum);

  /// Throws PreconditionError if exterior nodes differ from psi or values are not finite.
  void check_invariants() const;
  std::size_t interior_count() const;
};

}  // namespace fracstick
