#include <cctype>
#include <cmath>
#include <limits>
#include <fstream>
#include <set>
#include <sstream>

#include "pfsaddle/harness.hpp"

namespace pfsaddle {

using nlohmann::json;

namespace {

/// Reads the fields of one JSON object and rejects keys nobody asked for.
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j.is_object()) fail(ErrorKind::config, where_ + " must be an object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }
  void mark(const std::string& key) { seen_.insert(key); }

  template <typename T>
  void read(const std::string& key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    convert(j_.at(key), where_ + "." + key, out);
  }

  template <typename T>
  void require(const std::string& key, T& out) {
    if (!j_.contains(key)) fail(ErrorKind::config, where_ + "." + key + " is required");
    read(key, out);
  }

  void finish() const {
    for (const auto& [key, value] : j_.items())
      if (!seen_.count(key)) fail(ErrorKind::config, "unknown key " + where_ + "." + key);
  }

  static void convert(const json& v, const std::string& at, double& out) {
    if (!v.is_number()) fail(ErrorKind::config, at + " must be a number");
    out = v.get<double>();
    if (!std::isfinite(out)) fail(ErrorKind::config, at + " must be finite");
  }
  static void convert(const json& v, const std::string& at, int& out) {
    if (!v.is_number_integer()) fail(ErrorKind::config, at + " must be an integer");
    const auto x = v.get<std::int64_t>();
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
      fail(ErrorKind::config, at + " is out of range");
    out = static_cast<int>(x);
  }
  static void convert(const json& v, const std::string& at, long& out) {
    if (!v.is_number_integer()) fail(ErrorKind::config, at + " must be an integer");
    out = static_cast<long>(v.get<std::int64_t>());
  }
  static void convert(const json& v, const std::string& at, std::uint64_t& out) {
    if (v.is_number_unsigned()) {
      out = v.get<std::uint64_t>();
    } else if (v.is_number_integer() && v.get<std::int64_t>() >= 0) {
      out = static_cast<std::uint64_t>(v.get<std::int64_t>());
    } else {
      fail(ErrorKind::config, at + " must be a nonnegative integer");
    }
  }
  static void convert(const json& v, const std::string& at, std::string& out) {
    if (!v.is_string()) fail(ErrorKind::config, at + " must be a string");
    out = v.get<std::string>();
  }
  static void convert(const json& v, const std::string& at, Tunable& out) {
    if (v.is_string() && v.get<std::string>() == "auto") {
      out.value.reset();
      return;
    }
    if (!v.is_number()) fail(ErrorKind::config, at + " must be a number or \"auto\"");
    double d = 0.0;
    convert(v, at, d);
    out.value = d;
  }
  static void convert(const json& v, const std::string& at, std::optional<double>& out) {
    double d = 0.0;
    convert(v, at, d);
    out = d;
  }
  template <typename T>
  static void convert(const json& v, const std::string& at, std::vector<T>& out) {
    if (!v.is_array()) fail(ErrorKind::config, at + " must be an array");
    out.clear();
    for (std::size_t i = 0; i < v.size(); ++i) {
      T item{};
      convert(v[i], at + "[" + std::to_string(i) + "]", item);
      out.push_back(item);
    }
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

TopologySpec parse_topology(const json& j) {
  ObjectReader r(j, "topology");
  TopologySpec t;
  r.require("kind", t.kind);
  r.read("num_nodes", t.num_nodes);
  r.read("seed", t.seed);
  r.read("edge_prob", t.edge_prob);
  r.read("scale", t.scale);
  r.finish();
  return t;
}

ProblemSpec parse_problem(const json& j) {
  ObjectReader r(j, "problem");
  ProblemSpec p;
  r.require("family", p.family);
  r.read("dim_x", p.dim_x);
  r.read("dim_y", p.dim_y);
  r.read("mu", p.mu);
  r.read("L", p.L);
  r.read("heterogeneity", p.heterogeneity);
  r.read("curvature_share", p.curvature_share);
  r.read("radius_x", p.radius_x);
  r.read("radius_y", p.radius_y);
  r.read("samples_per_node", p.samples_per_node);
  r.read("beta_x", p.beta_x);
  r.read("beta_y", p.beta_y);
  r.read("noise", p.noise);
  r.read("seed", p.seed);
  r.finish();
  return p;
}

AlgorithmSpec parse_algorithm(const json& j, const std::string& where) {
  ObjectReader r(j, where);
  AlgorithmSpec a;
  r.require("kind", a.kind);
  r.read("label", a.label);
  r.read("gamma", a.gamma);
  r.read("inner_T", a.inner_T);
  r.read("delta_rel", a.delta_rel);
  r.read("p", a.p);
  r.read("case", a.problem_case);
  r.read("variant", a.variant);
  r.read("schedule", a.schedule);
  r.read("output", a.output);
  r.read("max_outer", a.max_outer);
  r.finish();
  return a;
}

json tunable_json(const Tunable& t) { return t.value ? json(*t.value) : json("auto"); }

}  // namespace

ExperimentConfig parse_config(const json& j) {
  ObjectReader r(j, "config");
  ExperimentConfig c;
  if (!r.has("topology")) fail(ErrorKind::config, "config.topology is required");
  if (!r.has("problem")) fail(ErrorKind::config, "config.problem is required");
  r.mark("topology");
  c.topology = parse_topology(j.at("topology"));
  r.mark("problem");
  c.problem = parse_problem(j.at("problem"));
  r.read("lambdas", c.lambdas);
  r.mark("algorithms");
  if (r.has("algorithms")) {
    const json& algs = j.at("algorithms");
    if (!algs.is_array()) fail(ErrorKind::config, "config.algorithms must be an array");
    c.algorithms.clear();
    for (std::size_t i = 0; i < algs.size(); ++i)
      c.algorithms.push_back(parse_algorithm(algs[i], "algorithms[" + std::to_string(i) + "]"));
  }
  r.read("seeds", c.seeds);
  r.mark("target");
  if (r.has("target")) {
    ObjectReader t(j.at("target"), "target");
    t.read("kind", c.target.kind);
    t.read("epsilon", c.target.epsilon);
    t.read("iterations", c.target.iterations);
    t.finish();
  }
  r.mark("record");
  if (r.has("record")) {
    ObjectReader t(j.at("record"), "record");
    t.read("every", c.record.every);
    t.read("gap", c.record.gap);
    t.read("gap_inner_tol", c.record.gap_inner_tol);
    t.finish();
  }
  r.mark("start");
  if (r.has("start")) {
    ObjectReader t(j.at("start"), "start");
    t.read("kind", c.start.kind);
    t.read("scale", c.start.scale);
    t.finish();
  }
  r.read("reference", c.reference);
  r.read("reference_tol", c.reference_tol);
  r.read("output_dir", c.output_dir);
  r.finish();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(ErrorKind::config, path.string() + ": " + e.what());
  }
  return parse_config(j);
}

ExperimentConfig load_config_or_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::io, "cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    fail(ErrorKind::config, path.string() + ": " + e.what());
  }
  if (j.is_object() && j.contains("config") && j.contains("runs")) return parse_config(j.at("config"));
  return parse_config(j);
}

json serialize_config(const ExperimentConfig& c, bool include_output_dir) {
  json j;
  j["topology"] = {{"kind", c.topology.kind},
                   {"num_nodes", c.topology.num_nodes},
                   {"seed", c.topology.seed},
                   {"edge_prob", c.topology.edge_prob},
                   {"scale", c.topology.scale}};
  json p = {{"family", c.problem.family},
            {"dim_x", c.problem.dim_x},
            {"dim_y", c.problem.dim_y},
            {"mu", c.problem.mu},
            {"L", c.problem.L},
            {"heterogeneity", c.problem.heterogeneity},
            {"curvature_share", c.problem.curvature_share},
            {"samples_per_node", c.problem.samples_per_node},
            {"beta_x", c.problem.beta_x},
            {"beta_y", c.problem.beta_y},
            {"noise", c.problem.noise},
            {"seed", c.problem.seed}};
  if (c.problem.radius_x) p["radius_x"] = *c.problem.radius_x;
  if (c.problem.radius_y) p["radius_y"] = *c.problem.radius_y;
  j["problem"] = p;
  j["lambdas"] = c.lambdas;
  json algs = json::array();
  for (const auto& a : c.algorithms) {
    json o = {{"kind", a.kind},
              {"gamma", tunable_json(a.gamma)},
              {"inner_T", tunable_json(a.inner_T)},
              {"delta_rel", tunable_json(a.delta_rel)},
              {"p", tunable_json(a.p)},
              {"case", a.problem_case},
              {"variant", a.variant},
              {"schedule", a.schedule},
              {"output", a.output},
              {"max_outer", a.max_outer}};
    if (!a.label.empty()) o["label"] = a.label;
    algs.push_back(o);
  }
  j["algorithms"] = algs;
  j["seeds"] = c.seeds;
  j["target"] = {{"kind", c.target.kind}, {"epsilon", c.target.epsilon}, {"iterations", c.target.iterations}};
  j["record"] = {{"every", c.record.every}, {"gap", c.record.gap}, {"gap_inner_tol", c.record.gap_inner_tol}};
  j["start"] = {{"kind", c.start.kind}, {"scale", c.start.scale}};
  j["reference"] = c.reference;
  j["reference_tol"] = c.reference_tol;
  if (include_output_dir) j["output_dir"] = c.output_dir;
  return j;
}

namespace {

void check(bool ok, const std::string& message) {
  if (!ok) fail(ErrorKind::config, message);
}

bool valid_label(const std::string& s) {
  if (s.empty()) return false;
  for (char ch : s)
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || ch == '.')) return false;
  return true;
}

void check_tunable(const Tunable& t, const std::string& name, double lo, double hi, bool open_hi) {
  if (t.is_auto()) return;
  const double v = *t.value;
  check(v > lo && (open_hi ? v < hi : v <= hi), name + " is out of range");
}

}  // namespace

void validate(const ExperimentConfig& c) {
  parse_topology_kind(c.topology.kind);
  check(c.topology.num_nodes >= 2, "topology.num_nodes must be >= 2");
  check(c.topology.edge_prob > 0.0 && c.topology.edge_prob <= 1.0, "topology.edge_prob must lie in (0, 1]");
  check(c.topology.scale > 0.0, "topology.scale must be > 0");

  const auto& p = c.problem;
  const bool robust = p.family == "robust_regression";
  check(p.family == "quadratic" || p.family == "bilinear" || robust,
        "problem.family must be quadratic, bilinear or robust_regression");
  check(p.dim_x >= 1 && p.dim_y >= 1, "problem dimensions must be >= 1");
  check(p.L > 0.0, "problem.L must be > 0");
  check(p.mu >= 0.0, "problem.mu must be >= 0");
  if (p.family == "quadratic") {
    check(p.mu > 0.0, "quadratic problems need mu > 0 (use bilinear for mu = 0)");
    check(p.L >= p.mu, "problem.L must be >= mu");
  }
  check(p.heterogeneity >= 0.0, "problem.heterogeneity must be >= 0");
  check(p.curvature_share >= 0.0 && p.curvature_share < 1.0, "problem.curvature_share must lie in [0, 1)");
  check(!p.radius_x || *p.radius_x > 0.0, "problem.radius_x must be > 0");
  check(!p.radius_y || *p.radius_y > 0.0, "problem.radius_y must be > 0");
  check(p.samples_per_node >= 1, "problem.samples_per_node must be >= 1");
  check(p.beta_x >= 0.0 && p.beta_y >= 0.0, "problem betas must be >= 0");
  check(p.noise >= 0.0, "problem.noise must be >= 0");

  check(!c.lambdas.empty(), "lambdas must not be empty");
  for (double l : c.lambdas) check(l >= 0.0, "lambdas must be >= 0");
  check(!c.seeds.empty(), "seeds must not be empty");

  check(!c.algorithms.empty(), "algorithms must not be empty");
  std::set<std::string> labels;
  for (const auto& a : c.algorithms) {
    parse_algorithm_kind(a.kind);
    const std::string label = a.effective_label();
    check(valid_label(label), "algorithm label '" + label + "' may only use letters, digits, '_', '-', '.'");
    check(labels.insert(label).second, "duplicate algorithm label '" + label + "' (set \"label\")");
    check(a.problem_case == "auto" || a.problem_case == "scsc" || a.problem_case == "cc",
          "algorithm case must be auto, scsc or cc");
    parse_sliding_variant(a.variant);
    parse_rles_schedule(a.schedule);
    check(a.output == "auto" || a.output == "last" || a.output == "average",
          "algorithm output must be auto, last or average");
    check(a.max_outer >= 0, "max_outer must be >= 0");
    check_tunable(a.gamma, label + ".gamma", 0.0, std::numeric_limits<double>::infinity(), true);
    check_tunable(a.delta_rel, label + ".delta_rel", 0.0, 1.0, true);
    check_tunable(a.p, label + ".p", 0.0, 1.0, true);
    if (!a.inner_T.is_auto()) {
      const double t = *a.inner_T.value;
      check(t >= 1.0 && t == std::floor(t) && t <= 1e9, label + ".inner_T must be an integer >= 1");
    }
  }

  const StopKind stop = parse_stop_kind(c.target.kind);
  check(c.target.epsilon > 0.0, "target.epsilon must be > 0");
  check(c.target.iterations >= 0, "target.iterations must be >= 0");
  check(c.record.every >= 1, "record.every must be >= 1");
  parse_gap_mode(c.record.gap);
  check(c.record.gap_inner_tol > 0.0, "record.gap_inner_tol must be > 0");
  check(c.start.kind == "random" || c.start.kind == "zero", "start.kind must be random or zero");
  check(c.start.scale >= 0.0 && c.start.scale <= 1.0, "start.scale must lie in [0, 1]");
  check(c.reference == "auto" || c.reference == "always" || c.reference == "never",
        "reference must be auto, always or never");
  check(c.reference_tol > 0.0, "reference_tol must be > 0");
  if (stop == StopKind::distance) {
    check(c.reference != "never", "a distance target needs reference solutions (reference != never)");
    check(c.reference == "always" || p.family != "bilinear",
          "bilinear problems have no automatic reference; use a gap or iterations target, or reference = always");
  }
}

}  // namespace pfsaddle
