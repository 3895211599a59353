#include "fracstick/experiment.hpp"

#include "fracstick/analysis.hpp"
#include "fracstick/barriers.hpp"
#include "fracstick/curvature.hpp"
#include "fracstick/datum.hpp"
#include "fracstick/errors.hpp"
#include "fracstick/parallel.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>

namespace fracstick {

using nlohmann::json;
namespace pt = boost::property_tree;

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

const std::set<std::string> kKinds{"convex-corner", "reentrant-stickiness", "barrier-certify", "dichotomy",
                                   "oracle-crossval"};

const std::map<std::string, std::set<std::string>> kKeys{
    {"experiment", {"kind", "output", "workers", "override_hypotheses"}},
    {"params", {"n", "s"}},
    {"domain", {"box", "shape"}},
    {"datum", {"terms"}},
    {"grid", {"resolutions"}},
    {"solver", {"tolerance", "max_iterations", "damping", "scheme", "R", "energy_every", "batch", "singular"}},
    {"analysis", {"radii"}},
    {"barrier", {"alpha", "gamma", "p0", "bump_radius", "k_max", "epsilons", "subsolution_tolerance"}},
    {"dichotomy", {"beta", "mu", "c", "shells"}},
    {"crossval", {"seed", "graphs", "cells", "R", "s_values"}},
};

std::vector<double> parse_list(const std::string& text, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
      if (used != item.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw ConfigError("config: '" + key + "' must be a comma-separated list of numbers");
    }
  }
  return out;
}

template <class T>
T get(const pt::ptree& tree, const std::string& path, T fallback) {
  const auto node = tree.get_optional<std::string>(path);
  if (!node) return fallback;
  try {
    return tree.get<T>(path);
  } catch (const pt::ptree_error&) {
    throw ConfigError("config: '" + path + "' has the wrong type: '" + *node + "'");
  }
}

bool get_bool(const pt::ptree& tree, const std::string& path, bool fallback) {
  const auto node = tree.get_optional<std::string>(path);
  if (!node) return fallback;
  if (*node == "true" || *node == "1" || *node == "yes") return true;
  if (*node == "false" || *node == "0" || *node == "no") return false;
  throw ConfigError("config: '" + path + "' must be true or false");
}

Box parse_box_text(const std::string& text) {
  const auto v = parse_list(text, "domain.box");
  Box b;
  if (v.size() == 2) {
    b.dim = 1;
    b.lo = {v[0], 0.0};
    b.hi = {v[1], 0.0};
  } else if (v.size() == 4) {
    b.dim = 2;
    b.lo = {v[0], v[1]};
    b.hi = {v[2], v[3]};
  } else {
    throw ConfigError("config: 'domain.box' needs 2 or 4 numbers");
  }
  return b;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

std::string solution_csv(const GraphFunction& u) {
  std::ostringstream out;
  out << (u.grid.dim == 2 ? "x,y,u,interior\n" : "x,u,interior\n");
  for (std::size_t i = 0; i < u.grid.size(); ++i) {
    const Vec2 x = u.grid.node(i);
    out << format_number(x[0]) << ',';
    if (u.grid.dim == 2) out << format_number(x[1]) << ',';
    out << format_number(u.values[i]) << ',' << int(u.interior[i]) << '\n';
  }
  return out.str();
}

json metric(double value, const char* module, double error) {
  return json{{"value", value}, {"module", module}, {"quadrature_error", error}};
}

json metric_list(const std::vector<double>& values, const char* module, double error) {
  json arr = json::array();
  for (double v : values) arr.push_back(metric(v, module, error));
  return arr;
}

struct OperatorErrors {
  double truncation = 0.0, singular = 0.0;
};

OperatorErrors operator_errors(const GraphFunction& u, const FractionalParams& params, const SolverConfig& cfg) {
  std::vector<std::size_t> nodes;
  for (std::size_t i = 0; i < u.grid.size(); ++i)
    if (u.interior[i] && u.grid.strictly_inside(i)) nodes.push_back(i);
  OperatorErrors e;
  for (const auto& c : graph_curvature_batch(u, nodes, params, cfg.R, cfg.curvature)) {
    e.truncation = std::max(e.truncation, c.estimated_truncation_error);
    e.singular = std::max(e.singular, c.singular_error);
  }
  return e;
}

double max_principle_violation(const GraphFunction& u) {
  double v = 0.0;
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    if (!u.interior[i]) continue;
    v = std::max({v, u.values[i] - u.datum->upper(), u.datum->lower() - u.values[i]});
  }
  return v;
}

json solve_json(const SolveResult& r, const Grid& g, const OperatorErrors& e) {
  return json{{"cells", g.count[0] - 1},
              {"h", g.h},
              {"residual", {{"max", r.report.residual_max}, {"l2", r.report.residual_l2}}},
              {"iterations", r.report.iterations},
              {"converged", r.report.converged},
              {"errors", {{"truncation", e.truncation}, {"singular_cell", e.singular}}}};
}

json params_json(const ExperimentConfig& c) {
  return json{{"n", c.params.n}, {"s", c.params.s}, {"R", c.solver.R}, {"tolerance", c.solver.tolerance}};
}

SolveResult solve_logged(const PlanarDomain& dom, std::shared_ptr<const Datum> psi, const ExperimentConfig& c,
                         const Grid& g, std::ostream& log) {
  log << "solving on " << g.count[0] - 1 << " cells\n";
  SolveResult r = solve_minimal_graph(dom, std::move(psi), c.params, g, c.solver);
  log << "  iterations " << r.report.iterations << ", residual " << r.report.residual_max << ", "
      << r.report.wall_seconds << " s\n";
  return r;
}

struct Outcome {
  json report;
  std::string summary;
  bool converged = true;
};

Outcome run_convex_corner(const ExperimentConfig& c, const std::filesystem::path& dir, std::ostream& log) {
  Outcome out;
  auto psi = std::make_shared<Datum>(parse_datum(c.datum));
  const PlanarDomain dom = parse_domain(c.domain, c.box);
  std::ostringstream summary;
  summary << "cells,h,residual,iterations";
  for (double r : c.radii) summary << ",modulus_" << format_number(r);
  summary << '\n';
  json per = json::array();
  bool decreasing = true;
  std::vector<double> smallest;
  std::vector<double> slack;
  for (int cells : c.resolutions) {
    const Grid g = Grid::over_box(c.box, cells);
    const SolveResult r = solve_logged(dom, psi, c, g, log);
    out.converged = out.converged && r.report.converged;
    write_file(dir / ("solution_" + std::to_string(cells) + ".csv"), solution_csv(r.u));
    const StickinessReport m = continuity_modulus(r.u, {0.0, 0.0}, c.radii);
    // same physical nodes on every grid: those of the coarsest one
    const StickinessReport mc = continuity_modulus(r.u, {0.0, 0.0}, c.radii, cells / c.resolutions.front());
    const OperatorErrors e = operator_errors(r.u, c.params, c.solver);
    json entry = solve_json(r, g, e);
    for (std::size_t j = 1; j < m.modulus.size(); ++j) decreasing = decreasing && m.modulus[j] < m.modulus[j - 1];
    smallest.push_back(mc.modulus.back());
    // value change a residual of this size can cause: the grid spacing times the residual
    slack.push_back(g.h * r.report.residual_max);
    entry["metrics"] = {{"radii", c.radii},
                        {"sup_abs", metric_list(m.modulus, "analysis", e.truncation + e.singular)},
                        {"sup_abs_common_nodes", metric_list(mc.modulus, "analysis", e.truncation + e.singular)},
                        {"sup", metric_list(m.sup, "analysis", e.truncation + e.singular)},
                        {"inf", metric_list(m.inf, "analysis", e.truncation + e.singular)},
                        {"node_counts", m.counts},
                        {"max_principle_violation", metric(max_principle_violation(r.u), "solver", 0.0)}};
    per.push_back(entry);
    summary << cells << ',' << format_number(g.h) << ',' << format_number(r.report.residual_max) << ','
            << r.report.iterations;
    for (double v : m.modulus) summary << ',' << format_number(v);
    summary << '\n';
  }
  bool refined = true;
  for (std::size_t k = 1; k < smallest.size(); ++k)
    refined = refined && smallest[k] <= smallest[k - 1] + slack[k] + slack[k - 1];
  out.report = {{"per_resolution", per},
                {"checks", {{"modulus_strictly_decreasing", decreasing}, {"smallest_radius_not_increasing", refined}}},
                {"verdict", !out.converged ? "not-converged" : decreasing && refined ? "continuous" : "inconclusive"}};
  out.summary = summary.str();
  return out;
}

BarrierSpec barrier_spec(const ExperimentConfig& c, const PlanarDomain& dom) {
  if (!dom.tangent_set()) throw ConfigError("barrier: the domain has no tangent set");
  BarrierSpec b;
  b.S = *dom.tangent_set();
  b.alpha = c.alpha;
  b.gamma = c.gamma;
  b.p0 = c.p0;
  b.bump_radius = c.bump_radius;
  b.validate(c.params, &dom);
  estimate_holder_norm(b);
  return b;
}

Outcome run_stickiness(const ExperimentConfig& c, const std::filesystem::path& dir, std::ostream& log) {
  Outcome out;
  auto psi = std::make_shared<Datum>(parse_datum(c.datum));
  const PlanarDomain dom = parse_domain(c.domain, c.box);
  BarrierSpec b = barrier_spec(c, dom);
  const double gamma = b.gamma_value(c.params);
  const double height = psi->upper();
  std::ostringstream summary;
  summary << "cells,h,residual,iterations,epsilon_star,epsilon_v,jump_inf,subsolution_violations\n";
  json per = json::array();
  std::vector<double> jumps;
  bool dominated = true;
  for (int cells : c.resolutions) {
    const Grid g = Grid::over_box(c.box, cells);
    const Certification cert = certify_epsilon(b, c.params, g, c.solver.R, c.k_max);
    log << "  certified eps* " << cert.epsilon_star << '\n';
    double eps_v = std::pow(height, 1.0 / gamma);
    if (cert.certified) eps_v = std::min(eps_v, cert.epsilon_star);
    BarrierSpec bv = b;
    bv.epsilon = eps_v;
    const BarrierReport v = build_v(bv, c.params, g, c.solver.R);
    double datum_excess = -INFINITY;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (!v.v.interior[i]) datum_excess = std::max(datum_excess, v.v.values[i] - (*psi)(g.node(i)));

    const SolveResult r = solve_logged(dom, psi, c, g, log);
    out.converged = out.converged && r.report.converged;
    write_file(dir / ("solution_" + std::to_string(cells) + ".csv"), solution_csv(r.u));
    write_file(dir / ("barrier_" + std::to_string(cells) + ".csv"), solution_csv(v.v));
    const StickinessReport m = measure_jump(r.u, b.S, c.radii);
    const StickinessReport mc = measure_jump(r.u, b.S, c.radii, cells / c.resolutions.front());
    const SubsolutionReport sub = subsolution_check(r.u, v.v, c.subsolution_tolerance);
    // comparison needs v <= psi outside omega as well as u >= v inside
    dominated = dominated && sub.passed() && cert.certified && v.certified && datum_excess <= 1e-12;
    jumps.push_back(m.inf.back());
    const OperatorErrors e = operator_errors(r.u, c.params, c.solver);
    const double qe = e.truncation + e.singular;
    json entry = solve_json(r, g, e);
    json trail = json::array();
    for (auto [eps, h] : cert.trail) trail.push_back({{"epsilon", eps}, {"max_curvature", h}});
    entry["metrics"] = {
        {"radii", c.radii},
        {"inf", metric_list(m.inf, "analysis", qe)},
        {"inf_common_nodes", metric_list(mc.inf, "analysis", qe)},
        {"sup", metric_list(m.sup, "analysis", qe)},
        {"node_counts", m.counts},
        {"jump_extrapolated", metric(m.extrapolated, "analysis", qe)},
        {"barrier",
         {{"holder_norm", metric(b.holder_norm, "barriers", b.holder_spacing)},
          {"gamma", gamma},
          {"epsilon_star", metric(cert.epsilon_star, "barriers", qe)},
          {"certified", cert.certified},
          {"trail", trail},
          {"epsilon_v", eps_v},
          {"v_max_curvature", metric(v.max_curvature, "barriers", qe)},
          {"v_certified", v.certified},
          {"v_datum_excess", datum_excess},
          {"subsolution_violations", sub.violations},
          {"subsolution_max_deficit", metric(sub.max_deficit, "solver", c.subsolution_tolerance)}}},
        {"max_principle_violation", metric(max_principle_violation(r.u), "solver", 0.0)}};
    per.push_back(entry);
    summary << cells << ',' << format_number(g.h) << ',' << format_number(r.report.residual_max) << ','
            << r.report.iterations << ',' << format_number(cert.epsilon_star) << ',' << format_number(eps_v) << ','
            << format_number(m.inf.back()) << ',' << sub.violations << '\n';
  }
  bool positive = true, stable = true;
  for (std::size_t k = 0; k < jumps.size(); ++k) {
    positive = positive && jumps[k] > 0.0;
    if (k > 0) stable = stable && std::fabs(jumps[k] - jumps[k - 1]) <= 0.2 * std::fabs(jumps[k - 1]);
  }
  out.report = {{"per_resolution", per},
                {"checks", {{"jump_positive", positive}, {"jump_stable", stable}, {"dominates_barrier", dominated}}},
                {"delta0", jumps.empty() ? 0.0 : jumps.back()},
                {"verdict", !out.converged                         ? "not-converged"
                            : positive && stable && dominated ? "sticky"
                                                              : "inconclusive"}};
  out.summary = summary.str();
  return out;
}

Outcome run_barrier(const ExperimentConfig& c, std::ostream& log) {
  Outcome out;
  const PlanarDomain dom = parse_domain(c.domain, c.box);
  BarrierSpec b = barrier_spec(c, dom);
  std::ostringstream summary;
  summary << "cells,epsilon,bound,max_sample,all_below\n";
  json per = json::array();
  bool all_ok = true;
  for (int cells : c.resolutions) {
    const Grid g = Grid::over_box(c.box, cells);
    std::vector<double> bounds, maxima;
    json rows = json::array();
    bool below = true;
    for (double eps : c.epsilons) {
      b.epsilon = eps;
      const BoundReport r = curvature_bound_w(b, c.params, g, c.solver.R);
      bounds.push_back(r.bound);
      maxima.push_back(r.max_sample);
      below = below && r.all_below;
      double qe = 0.0;
      for (const auto& smp : r.samples) qe = std::max(qe, smp.estimated_truncation_error + smp.singular_error);
      rows.push_back({{"epsilon", eps},
                      {"bound", metric(r.bound, "barriers", 0.0)},
                      {"max_sample", metric(r.max_sample, "curvature", qe)},
                      {"all_below", r.all_below}});
      summary << cells << ',' << format_number(eps) << ',' << format_number(r.bound) << ','
              << format_number(r.max_sample) << ',' << r.all_below << '\n';
    }
    const double target = c.params.s / c.alpha;
    const double bound_slope = loglog_slope(c.epsilons, bounds);
    double sample_slope = NAN;
    try {
      sample_slope = loglog_slope(c.epsilons, maxima);
    } catch (const PreconditionError&) {
    }
    const Certification cert = certify_epsilon(b, c.params, g, c.solver.R, c.k_max);
    BarrierSpec neg = b;
    neg.bump_sign = -1.0;
    const Certification control = certify_epsilon(neg, c.params, g, c.solver.R, c.k_max);
    log << "  cells " << cells << ": eps* " << cert.epsilon_star << ", control certified " << control.certified
        << '\n';
    all_ok = all_ok && below && cert.certified && !control.certified;
    per.push_back({{"cells", cells},
                   {"h", g.h},
                   {"holder_norm", metric(b.holder_norm, "barriers", b.holder_spacing)},
                   {"samples", rows},
                   {"bound_slope", bound_slope},
                   {"sample_slope", std::isfinite(sample_slope) ? json(sample_slope) : json(nullptr)},
                   {"target_slope", target},
                   {"epsilon_star", cert.epsilon_star},
                   {"certified", cert.certified},
                   {"negative_control_certified", control.certified}});
  }
  out.report = {{"per_resolution", per}, {"verdict", all_ok ? "certified" : "not-certified"}};
  out.summary = summary.str();
  return out;
}

Outcome run_dichotomy(const ExperimentConfig& c) {
  Outcome out;
  const DichotomyResult r = wedge_integral_partial(c.beta, c.params.s, c.mu, c.c, c.shells, c.params);
  std::ostringstream summary;
  summary << "k,shell_term,partial_sum\n";
  for (std::size_t k = 0; k < r.shell_terms.size(); ++k)
    summary << k + 1 << ',' << format_number(r.shell_terms[k]) << ',' << format_number(r.partial_sums[k]) << '\n';
  out.report = {{"per_resolution", json::array()},
                {"metrics",
                 {{"beta", c.beta},
                  {"mu", c.mu},
                  {"c", c.c},
                  {"shell_terms", metric_list(r.shell_terms, "analysis", r.quadrature_error)},
                  {"partial_sums", metric_list(r.partial_sums, "analysis", r.quadrature_error)},
                  {"fitted_ratio", metric(r.fitted_ratio, "analysis", r.quadrature_error)},
                  {"predicted_ratio", std::pow(2.0, 1.0 + c.params.s - c.beta)},
                  {"truncated", r.truncated}}},
                {"verdict", to_string(r.verdict)}};
  out.summary = summary.str();
  return out;
}

Outcome run_crossval(const ExperimentConfig& c) {
  Outcome out;
  const auto rows = oracle_crossval(c.seed, c.s_values, c.graphs, c.crossval_cells, c.crossval_R);
  std::ostringstream summary;
  summary << "s,graph,node,x,graph_value,pv_value,pv_error,tolerance,pass\n";
  std::size_t fails = 0;
  for (const auto& r : rows) {
    summary << format_number(r.s) << ',' << r.graph << ',' << r.node << ',' << format_number(r.x) << ','
            << format_number(r.graph_value) << ',' << format_number(r.pv_value) << ',' << format_number(r.pv_error)
            << ',' << format_number(r.tolerance) << ',' << r.pass << '\n';
    fails += !r.pass;
  }
  out.report = {{"per_resolution", json::array()},
                {"metrics", {{"comparisons", rows.size()}, {"failures", fails}, {"seed", c.seed}}},
                {"verdict", fails == 0 ? "agree" : "disagree"}};
  out.summary = summary.str();
  return out;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  for (const auto& [section, body] : tree) {
    auto it = kKeys.find(section);
    if (it == kKeys.end()) throw ConfigError("config: unknown section [" + section + "]");
    for (const auto& [key, value] : body)
      if (!it->second.count(key)) throw ConfigError("config: unknown key '" + section + "." + key + "'");
  }
  ExperimentConfig c;
  c.kind = get<std::string>(tree, "experiment.kind", "");
  c.output = get<std::string>(tree, "experiment.output", c.output);
  c.workers = get<int>(tree, "experiment.workers", 0);
  c.override_hypotheses = get_bool(tree, "experiment.override_hypotheses", false);
  c.params.n = get<int>(tree, "params.n", 2);
  c.params.s = get<double>(tree, "params.s", 0.5);
  c.box = c.params.n == 1 ? Box{1, {-2.0, 0.0}, {2.0, 0.0}} : Box{2, {-1.0, -1.0}, {1.0, 1.0}};
  if (auto box = tree.get_optional<std::string>("domain.box")) c.box = parse_box_text(*box);
  c.domain = get<std::string>(tree, "domain.shape", "");
  c.datum = get<std::string>(tree, "datum.terms", "constant value=0");
  if (auto res = tree.get_optional<std::string>("grid.resolutions"))
    for (double v : parse_list(*res, "grid.resolutions")) {
      if (v != std::floor(v)) throw ConfigError("config: resolutions must be integers");
      c.resolutions.push_back(static_cast<int>(v));
    }
  c.solver.tolerance = get<double>(tree, "solver.tolerance", 1e-6);
  c.solver.max_iterations = get<int>(tree, "solver.max_iterations", 5000);
  c.solver.damping = get<double>(tree, "solver.damping", 0.5);
  c.solver.R = get<double>(tree, "solver.R", 1.0);
  c.solver.energy_every = get<int>(tree, "solver.energy_every", 0);
  c.solver.batch = get<int>(tree, "solver.batch", 8);
  const std::string scheme = get<std::string>(tree, "solver.scheme", "nodewise-root");
  if (scheme == "nodewise-root")
    c.solver.scheme = Scheme::NodewiseRoot;
  else if (scheme == "damped-flow")
    c.solver.scheme = Scheme::DampedFlow;
  else
    throw ConfigError("config: solver.scheme must be nodewise-root or damped-flow");
  const std::string singular = get<std::string>(tree, "solver.singular", "auto");
  if (singular == "auto")
    c.solver.curvature.singular = SingularMode::Auto;
  else if (singular == "skip")
    c.solver.curvature.singular = SingularMode::Skip;
  else if (singular == "correct")
    c.solver.curvature.singular = SingularMode::Correct;
  else
    throw ConfigError("config: solver.singular must be auto, skip or correct");
  if (auto r = tree.get_optional<std::string>("analysis.radii")) c.radii = parse_list(*r, "analysis.radii");
  c.alpha = get<double>(tree, "barrier.alpha", c.alpha);
  c.gamma = get<double>(tree, "barrier.gamma", c.gamma);
  if (auto p = tree.get_optional<std::string>("barrier.p0")) {
    const auto v = parse_list(*p, "barrier.p0");
    if (v.size() != 2) throw ConfigError("config: barrier.p0 needs two numbers");
    c.p0 = {v[0], v[1]};
  }
  c.bump_radius = get<double>(tree, "barrier.bump_radius", c.bump_radius);
  c.k_max = get<int>(tree, "barrier.k_max", c.k_max);
  if (auto e = tree.get_optional<std::string>("barrier.epsilons")) c.epsilons = parse_list(*e, "barrier.epsilons");
  c.subsolution_tolerance = get<double>(tree, "barrier.subsolution_tolerance", c.subsolution_tolerance);
  c.beta = get<double>(tree, "dichotomy.beta", c.beta);
  c.mu = get<double>(tree, "dichotomy.mu", c.mu);
  c.c = get<double>(tree, "dichotomy.c", c.c);
  c.shells = get<int>(tree, "dichotomy.shells", c.shells);
  c.seed = get<int>(tree, "crossval.seed", c.seed);
  c.graphs = get<int>(tree, "crossval.graphs", c.graphs);
  c.crossval_cells = get<int>(tree, "crossval.cells", c.crossval_cells);
  c.crossval_R = get<double>(tree, "crossval.R", c.crossval_R);
  if (auto v = tree.get_optional<std::string>("crossval.s_values")) c.s_values = parse_list(*v, "crossval.s_values");
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::vector<Violation> validate(const ExperimentConfig& c) {
  std::vector<Violation> out;
  auto add = [&](std::string field, std::string message, std::string hypothesis) {
    out.push_back({std::move(field), std::move(message), std::move(hypothesis)});
  };
  const std::string kOrder = "fractional order: s in (0, 1)";
  const std::string kPlumbing = "consistency";
  if (!kKinds.count(c.kind)) {
    add("experiment.kind", "unknown experiment kind '" + c.kind + "'", kPlumbing);
    return out;
  }
  if (!(c.params.s > 0.0 && c.params.s < 1.0)) add("params.s", "s must lie in (0, 1)", kOrder);
  if (c.params.n != 1 && c.params.n != 2) add("params.n", "n must be 1 or 2", kPlumbing);
  if (c.workers < 0) add("experiment.workers", "workers must be non-negative", kPlumbing);

  const bool solves = c.kind == "convex-corner" || c.kind == "reentrant-stickiness";
  const bool needs_grid = solves || c.kind == "barrier-certify";
  if (needs_grid) {
    if (c.resolutions.empty()) add("grid.resolutions", "at least one resolution is required", kPlumbing);
    for (std::size_t k = 1; k < c.resolutions.size(); ++k)
      if (c.resolutions[k] <= c.resolutions[k - 1])
        add("grid.resolutions", "resolutions must be strictly increasing", kPlumbing);
    if (solves)
      for (int cells : c.resolutions)
        if (cells % c.resolutions.front() != 0)
          add("grid.resolutions", "every resolution must be a multiple of the first", kPlumbing);
    if (c.box.dim != c.params.n) add("domain.box", "box dimension must equal n", kPlumbing);
    for (int cells : c.resolutions) {
      try {
        const Grid g = Grid::over_box(c.box, cells);
        if (c.solver.R < 4.0 * g.h) add("solver.R", "R must be at least 4h on every grid", kPlumbing);
      } catch (const std::exception& e) {
        add("grid.resolutions", e.what(), kPlumbing);
      }
    }
    if (!(c.solver.tolerance > 0.0)) add("solver.tolerance", "tolerance must be positive", kPlumbing);
    if (!(c.solver.damping > 0.0 && c.solver.damping <= 1.0))
      add("solver.damping", "damping must lie in (0, 1]", kPlumbing);
    if (c.solver.max_iterations < 0) add("solver.max_iterations", "must be non-negative", kPlumbing);
    if (c.solver.batch < 1) add("solver.batch", "must be positive", kPlumbing);
  }

  std::optional<PlanarDomain> dom;
  if (needs_grid) {
    try {
      dom = parse_domain(c.domain, c.box);
    } catch (const std::exception& e) {
      add("domain.shape", e.what(), kPlumbing);
    }
  }
  std::optional<Datum> psi;
  if (solves) {
    try {
      psi = parse_datum(c.datum);
      if (!psi->bounded()) add("datum.terms", "the exterior datum must be bounded", "bounded exterior datum");
    } catch (const std::exception& e) {
      add("datum.terms", e.what(), kPlumbing);
    }
  }
  for (std::size_t j = 0; j < c.radii.size(); ++j) {
    if (!(c.radii[j] > 0.0)) add("analysis.radii", "radii must be positive", kPlumbing);
    if (j > 0 && !(c.radii[j] < c.radii[j - 1])) add("analysis.radii", "radii must be strictly decreasing", kPlumbing);
  }

  if (c.kind == "convex-corner" && dom) {
    if (dom->kind() != DomainKind::Wedge) {
      add("domain.shape", "the convex-corner experiment needs a wedge domain", kPlumbing);
    } else if (dom->beta > 1.0 + c.params.s && !c.override_hypotheses) {
      add("domain.shape", "beta must not exceed 1 + s",
          "continuity at an outward singularity: the boundary near the corner lies below c|x'|^beta with beta <= 1 + s");
    }
  }
  if ((c.kind == "reentrant-stickiness" || c.kind == "barrier-certify") && dom) {
    const bool alpha_ok = c.alpha > c.params.s && c.alpha < 1.0;
    if (!alpha_ok)
      add("barrier.alpha", "alpha must exceed s (and stay below 1)",
          "stickiness: an inward tangent set with C^{1,alpha} boundary, alpha > s");
    const double gamma = c.gamma > 0.0 ? c.gamma : 0.5 * c.params.s / c.alpha;
    if (!(gamma > 0.0 && gamma < c.params.s / c.alpha))
      add("barrier.gamma", "gamma must lie strictly inside (0, s/alpha)",
          "barrier exponent: gamma in the open interval (0, s/alpha)");
    if (!dom->tangent_set()) {
      add("domain.shape", "the domain needs an inward tangent set (tangent= or tangent_fraction=)",
          "stickiness: an inward tangent set S inside omega with 0 on its boundary");
    } else if (alpha_ok && c.params.n == 2) {
      BarrierSpec b;
      b.S = *dom->tangent_set();
      b.alpha = c.alpha;
      b.gamma = c.gamma;
      b.p0 = c.p0;
      b.bump_radius = c.bump_radius;
      try {
        b.validate(c.params, &*dom);
      } catch (const PreconditionError& e) {
        add("barrier.p0", e.what(), "barrier bump: the closed ball around p0 stays away from the closure of omega");
      }
    }
    if (c.params.n != 2) add("params.n", "barriers are built for n = 2", kPlumbing);
    if (c.k_max < 1) add("barrier.k_max", "must be positive", kPlumbing);
    for (double e : c.epsilons)
      if (!(e > 0.0)) add("barrier.epsilons", "epsilons must be positive", kPlumbing);
  }
  if (c.kind == "reentrant-stickiness" && psi && psi->bounded()) {
    const std::string hyp = "stickiness: a non-negative datum supported away from the closure of omega";
    if (psi->lower() < 0.0) add("datum.terms", "the datum must take values in [0, eps]", hyp);
    if (dom && !c.resolutions.empty()) {
      try {
        const Grid g = Grid::over_box(c.box, c.resolutions.back());
        for (std::size_t i = 0; i < g.size(); ++i)
          if (dom->level(g.node(i)) >= 0.0 && (*psi)(g.node(i)) != 0.0) {
            add("datum.terms", "the datum must vanish on the closure of omega", hyp);
            break;
          }
      } catch (const std::exception&) {
      }
    }
  }
  if (c.kind == "dichotomy") {
    if (c.params.n != 2) add("params.n", "the shell integrals are set up for n = 2", kPlumbing);
    if (!(c.beta > 0.0)) add("dichotomy.beta", "beta must be positive", kPlumbing);
    if (!(c.mu > 0.0 && c.mu <= 0.125)) add("dichotomy.mu", "mu must lie in (0, 1/8]", "normalisation mu <= 1/8");
    if (!(c.c > 0.0 && c.c < 1.0)) add("dichotomy.c", "c must lie in (0, 1)", "normalisation c in (0, 1)");
    if (c.shells < 1) add("dichotomy.shells", "must be positive", kPlumbing);
  }
  if (c.kind == "oracle-crossval") {
    if (c.graphs < 1) add("crossval.graphs", "must be positive", kPlumbing);
    if (c.crossval_cells < 16) add("crossval.cells", "must be at least 16", kPlumbing);
    for (double s : c.s_values)
      if (!(s > 0.0 && s < 1.0)) add("crossval.s_values", "each s must lie in (0, 1)", kOrder);
  }
  return out;
}

int run(const ExperimentConfig& c, std::ostream& log) {
  const auto violations = validate(c);
  if (!violations.empty()) {
    for (const auto& v : violations) log << "config error: " << v.field << ": " << v.message << " [" << v.hypothesis << "]\n";
    return kExitConfig;
  }
  if (c.workers > 0) set_worker_count(c.workers);
  const std::filesystem::path dir(c.output);
  std::filesystem::create_directories(dir);
  Outcome out;
  try {
    if (c.kind == "convex-corner")
      out = run_convex_corner(c, dir, log);
    else if (c.kind == "reentrant-stickiness")
      out = run_stickiness(c, dir, log);
    else if (c.kind == "barrier-certify")
      out = run_barrier(c, log);
    else if (c.kind == "dichotomy")
      out = run_dichotomy(c);
    else
      out = run_crossval(c);
  } catch (const DivergedError& e) {
    log << "error: " << e.what() << '\n';
    return kExitNotConverged;
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const PreconditionError& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  json report = out.report;
  report["experiment"] = c.kind;
  report["params"] = params_json(c);
  write_file(dir / "report.json", report.dump(2) + "\n");
  write_file(dir / "summary.csv", out.summary);
  log << "verdict: " << report["verdict"].get<std::string>() << '\n';
  if (!out.converged) return kExitNotConverged;
  return report["verdict"] == "disagree" ? kExitFailure : kExitOk;
}

std::vector<CrossvalRow> oracle_crossval(int seed, const std::vector<double>& s_values, int graphs, int cells,
                                         double R) {
  std::mt19937_64 rng(static_cast<std::uint64_t>(seed));
  std::uniform_real_distribution<double> U(0.0, 1.0);
  struct Family {
    double A[3], c[3], w[3];
  };
  std::vector<Family> fam(static_cast<std::size_t>(graphs));
  for (auto& f : fam)
    for (int k = 0; k < 3; ++k) {
      f.A[k] = 0.5 * (2.0 * U(rng) - 1.0);
      f.c[k] = 0.5 * (2.0 * U(rng) - 1.0);
      f.w[k] = 0.3 + 0.2 * U(rng);
    }
  const Grid g = Grid::over_box(Box{1, {-1.0, 0.0}, {1.0, 0.0}}, cells);
  std::vector<int> nodes;
  for (int i = cells / 8; i <= cells - cells / 8; i += std::max(1, cells / 16)) nodes.push_back(i);

  std::vector<CrossvalRow> rows;
  for (double s : s_values) {
    const FractionalParams p{1, s};
    for (int gi = 0; gi < graphs; ++gi) {
      const Family f = fam[static_cast<std::size_t>(gi)];
      auto fn = [f](const Vec2& x) {
        double v = 0.0;
        for (int k = 0; k < 3; ++k) v += f.A[k] * std::exp(-std::pow((x[0] - f.c[k]) / f.w[k], 2));
        return v;
      };
      auto datum = std::make_shared<Datum>();
      datum->add_function(fn, -1.5, 1.5);
      std::vector<double> vals(g.size());
      for (std::size_t i = 0; i < g.size(); ++i) vals[i] = fn(g.node(i));
      const GraphFunction u = GraphFunction::from_values(g, vals, std::vector<std::uint8_t>(g.size(), 1), datum);
      const SubgraphRegion E(1, fn, -1.5, 1.5);
      std::vector<std::size_t> idx(nodes.begin(), nodes.end());
      GraphCurvatureOptions opts;
      opts.difference_order = 4;
      const auto graph_vals = graph_curvature_batch(u, idx, p, R, opts);
      std::vector<CrossvalRow> block(nodes.size());
      parallel_for(nodes.size(), [&](std::size_t k) {
        const int i = nodes[k];
        const CurvatureSample pv = set_curvature_pv(E, {g.node(i)[0], vals[i], 0.0}, p, 1e-4, R);
        CrossvalRow& r = block[k];
        r.s = s;
        r.graph = gi;
        r.node = i;
        r.x = g.node(i)[0];
        r.graph_value = graph_vals[k].value;
        r.pv_value = pv.value;
        r.pv_error = pv.estimated_truncation_error + pv.singular_error;
        r.tolerance = std::max(0.02 * std::fabs(pv.value), 1e-3);
        r.pass = std::fabs(r.graph_value - r.pv_value) <= r.tolerance;
      });
      rows.insert(rows.end(), block.begin(), block.end());
    }
  }
  return rows;
}

}  // namespace fracstick
