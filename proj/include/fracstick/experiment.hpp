#pragma once

#include "fracstick/geometry.hpp"
#include "fracstick/kernel.hpp"
#include "fracstick/solver.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace fracstick {

/// Exit statuses of `fracstick run`.
enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitNotConverged = 2, kExitConfig = 3 };

struct ExperimentConfig {
  /// convex-corner, reentrant-stickiness, barrier-certify, dichotomy, oracle-crossval
  std::string kind;
  FractionalParams params;
  Box box;
  std::string domain;
  std::string datum;
  std::vector<int> resolutions;
  SolverConfig solver;
  std::vector<double> radii{0.2, 0.1, 0.05};
  std::string output = "out";
  int workers = 0;
  bool override_hypotheses = false;

  // barrier
  double alpha = 0.9;
  double gamma = 0.0;
  Vec2 p0{0.0, -0.3};
  double bump_radius = 0.15;
  int k_max = 16;
  std::vector<double> epsilons{1e-1, 1e-2, 1e-3, 1e-4};
  double subsolution_tolerance = 1e-6;

  // dichotomy
  double beta = 1.5;
  double mu = 0.125;
  double c = 0.5;
  int shells = 12;

  // oracle cross-validation
  int seed = 1;
  int graphs = 5;
  int crossval_cells = 64;
  double crossval_R = 8.0;
  std::vector<double> s_values{0.3, 0.5, 0.7};
};

/// Reads the sectioned key = value format described in docs/config.md.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

struct Violation {
  std::string field;
  std::string message;
  /// The hypothesis the rule protects, or "consistency" for plumbing rules.
  std::string hypothesis;
};

std::vector<Violation> validate(const ExperimentConfig& config);

/// Runs the experiment and writes artifacts under config.output.
int run(const ExperimentConfig& config, std::ostream& log);

struct CrossvalRow {
  double s = 0.0;
  int graph = 0;
  int node = 0;
  double x = 0.0;
  double graph_value = 0.0;
  double pv_value = 0.0;
  double pv_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// graph_curvature against set_curvature_pv on random sums of three Gaussians (n = 1).
std::vector<CrossvalRow> oracle_crossval(int seed, const std::vector<double>& s_values, int graphs, int cells,
                                         double R);

std::string format_number(double v);

}  // namespace fracstick
