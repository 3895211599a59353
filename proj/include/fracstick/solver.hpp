#pragma once

#include "fracstick/curvature.hpp"
#include "fracstick/geometry.hpp"
#include "fracstick/graph.hpp"

#include <memory>
#include <string>
#include <vector>

namespace fracstick {

enum class Scheme { NodewiseRoot, DampedFlow };

struct SolverConfig {
  /// Stop once max |curvature| over omega-nodes is at most this.
  double tolerance = 1e-7;
  int max_iterations = 20000;
  /// Step factor eta for the damped flow.
  double damping = 0.5;
  Scheme scheme = Scheme::NodewiseRoot;
  double R = 1.0;
  /// Lattice energy is recorded every this many iterations (0 disables).
  int energy_every = 0;
  /// Nodes solved against the same frozen field before their values are written.
  int batch = 8;
  /// Consecutive residual increases that count as divergence.
  int divergence_window = 50;
  GraphCurvatureOptions curvature{};

  void validate(double h) const;
};

struct SolveReport {
  double residual_max = 0.0;
  double residual_l2 = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> residual_trace;
  /// (iteration, energy) pairs.
  std::vector<std::pair<int, double>> energy_trace;
  double wall_seconds = 0.0;
  /// Final damping factor after back-off (damped flow only).
  double damping = 0.0;
};

struct SolveResult {
  GraphFunction u;
  SolveReport report;
};

/// u = psi off omega and zero discrete curvature on omega-nodes.
/// Returns the best iterate with converged = false when max_iterations runs out.
SolveResult solve_minimal_graph(const PlanarDomain& domain, std::shared_ptr<const Datum> psi,
                                const FractionalParams& params, const Grid& grid, const SolverConfig& config);

/// Same, starting from the values of `start` on its omega-nodes.
SolveResult solve_minimal_graph(GraphFunction start, const FractionalParams& params, const SolverConfig& config);

struct ComparisonReport {
  /// max(u1 - u2) over omega-nodes (<= 0 when ordered).
  double max_violation = 0.0;
  std::size_t worst_node = 0;
  std::size_t nodes = 0;
};

/// Requires matching grids and masks with u1 <= u2 off omega.
ComparisonReport comparison_check(const GraphFunction& u1, const GraphFunction& u2);

struct SubsolutionReport {
  std::size_t violations = 0;
  /// max(v - u) over omega-nodes.
  double max_deficit = 0.0;
  std::size_t worst_node = 0;
  double tolerance = 0.0;
  bool passed() const { return violations == 0; }
};

/// Counts omega-nodes with v > u + tolerance.
SubsolutionReport subsolution_check(const GraphFunction& u, const GraphFunction& v, double tolerance = 1e-8);

/// Initial guess: each omega-node takes the value of the nearest exterior node.
std::vector<double> nearest_exterior_fill(const GraphFunction& u);

}  // namespace fracstick
