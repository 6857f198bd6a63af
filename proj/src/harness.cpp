#include "pfsaddle/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <thread>

namespace pfsaddle {

using nlohmann::json;

GossipMatrix build_gossip(const TopologySpec& spec) {
  Topology t;
  t.kind = parse_topology_kind(spec.kind);
  t.num_nodes = spec.num_nodes;
  t.seed = spec.seed;
  t.edge_prob = spec.edge_prob;
  GossipMatrix w = laplacian(t);
  return spec.scale == 1.0 ? w : scale(w, spec.scale);
}

ProblemPtr build_problem(const ExperimentConfig& config) {
  const ProblemSpec& p = config.problem;
  const int M = config.topology.num_nodes;
  if (p.family == "robust_regression") {
    RobustGenParams g;
    g.num_nodes = M;
    g.dim = p.dim_x;
    g.samples_per_node = p.samples_per_node;
    g.beta_x = p.beta_x;
    g.beta_y = p.beta_y;
    g.heterogeneity = p.heterogeneity;
    g.noise = p.noise;
    g.radius_x = p.radius_x.value_or(1.0);
    g.radius_y = p.radius_y.value_or(1.0);
    g.seed = p.seed;
    return make_robust_regression(g);
  }
  QuadraticGenParams g;
  g.num_nodes = M;
  g.dim_x = p.dim_x;
  g.dim_y = p.dim_y;
  g.mu = p.mu;
  g.L = p.L;
  g.heterogeneity = p.heterogeneity;
  g.curvature_share = p.curvature_share;
  g.radius_x = p.radius_x.value_or(10.0);
  g.radius_y = p.radius_y.value_or(10.0);
  g.seed = p.seed;
  if (p.family == "bilinear") return make_bilinear(g);
  if (p.family == "quadratic") return make_quadratic(g);
  fail(ErrorKind::config, "unknown problem family '" + p.family + "'");
}

StackedPoint build_start(const ExperimentConfig& config, const SaddleProblem& problem, std::uint64_t seed) {
  const BallDomain& d = problem.domain();
  Vector x0 = d.center_x;
  Vector y0 = d.center_y;
  if (config.start.kind == "random") {
    Xoshiro256 rng(seed ^ 0x57a7'7c0d'e5ee'd5ULL);
    Vector gx(problem.dim_x()), gy(problem.dim_y());
    for (auto& v : gx) v = rng.normal();
    for (auto& v : gy) v = rng.normal();
    x0 += config.start.scale * d.radius_x * gx / gx.norm();
    y0 += config.start.scale * d.radius_y * gy / gy.norm();
  }
  return project(d, StackedPoint::replicated(problem.num_nodes(), x0, y0));
}

ResolvedAlgorithm resolve_algorithm(const AlgorithmSpec& spec, const ExperimentConfig& config,
                                    const SaddleProblem& problem, const GossipMatrix& gossip, double lambda,
                                    std::uint64_t seed) {
  ResolvedAlgorithm r;
  AlgorithmConfig& a = r.config;
  a.kind = parse_algorithm_kind(spec.kind);
  a.lambda = lambda;
  a.seed = seed;
  a.max_outer = spec.max_outer;
  a.target.kind = parse_stop_kind(config.target.kind);
  a.target.epsilon = config.target.epsilon;
  a.target.iterations = config.target.iterations;
  a.schedule = parse_rles_schedule(spec.schedule);

  const double L = problem.smoothness();
  const double mu = problem.strong_convexity();
  const double lmax = gossip.lambda_max();
  r.problem_case = spec.problem_case == "auto" ? (mu > 0.0 ? ProblemCase::scsc : ProblemCase::cc)
                                               : parse_problem_case(spec.problem_case);

  switch (a.kind) {
    case AlgorithmKind::extragradient:
      a.gamma = spec.gamma.value.value_or(1.0 / (2.0 * (L + lambda * lmax)));
      break;
    case AlgorithmKind::sliding: {
      const bool need_auto = spec.gamma.is_auto() || (spec.inner_T.is_auto() && spec.delta_rel.is_auto());
      SlidingParams auto_params;
      if (need_auto)
        auto_params = params_sliding(r.problem_case, L, mu, lambda, lmax, config.target.epsilon,
                                     problem.domain().diameter(), parse_sliding_variant(spec.variant));
      a.gamma = spec.gamma.value.value_or(auto_params.gamma);
      a.delta_rel = spec.delta_rel.value.value_or(auto_params.delta);
      if (!spec.inner_T.is_auto()) {
        a.inner_T = static_cast<int>(*spec.inner_T.value);
      } else if (!spec.delta_rel.is_auto()) {
        a.inner_T = static_cast<int>(std::max(1.0, std::ceil((1.0 + a.gamma * L) * std::log(1.0 / a.delta_rel))));
      } else {
        a.inner_T = spec.gamma.is_auto()
                        ? auto_params.inner_T
                        : static_cast<int>(std::max(1.0, std::ceil((1.0 + a.gamma * L) * std::log(1.0 / a.delta_rel))));
      }
      a.average_output = spec.output == "average" || (spec.output == "auto" && r.problem_case == ProblemCase::cc);
      break;
    }
    case AlgorithmKind::rles: {
      if (spec.gamma.is_auto() || spec.p.is_auto()) {
        const RlesParams rp = params_rles(L, lambda, lmax);
        r.L_eff = rp.L_eff;
        a.gamma = spec.gamma.value.value_or(rp.gamma);
        a.p = spec.p.value.value_or(rp.p);
      } else {
        a.gamma = *spec.gamma.value;
        a.p = *spec.p.value;
      }
      break;
    }
  }
  return r;
}

namespace {

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json resolved_json(const ResolvedAlgorithm& r) {
  const AlgorithmConfig& a = r.config;
  json j = {{"kind", to_string(a.kind)}, {"gamma", a.gamma}, {"lambda", a.lambda}, {"max_outer", a.max_outer}};
  if (a.kind == AlgorithmKind::sliding) {
    j["inner_T"] = a.inner_T;
    j["delta_rel"] = a.delta_rel;
    j["case"] = to_string(r.problem_case);
    j["output"] = a.average_output ? "average" : "last";
  }
  if (a.kind == AlgorithmKind::rles) {
    j["p"] = a.p;
    j["schedule"] = to_string(a.schedule);
    j["seed"] = a.seed;
    if (r.L_eff) j["L_eff"] = *r.L_eff;
  }
  return j;
}

std::filesystem::path output_directory(const ExperimentConfig& config, const RunOptions& options) {
  if (options.output_dir) return *options.output_dir;
  if (const char* env = std::getenv("PFSADDLE_OUTPUT_DIR"); env != nullptr && *env != '\0') return env;
  return config.output_dir;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::io, "cannot write " + path.string());
  out << text;
  out.close();
  if (!out) fail(ErrorKind::io, "write failed for " + path.string());
}

/// Runs fn(i) for i in [0, n) on `jobs` threads; exceptions are the caller's job.
template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  for (auto& t : pool) t.join();
}

struct ReferenceSlot {
  std::optional<ReferenceReport> report;
  std::optional<ErrorKind> error_kind;
  std::string error;
};

std::string summary_csv(const std::vector<RunSummary>& runs) {
  std::string s =
      "label,algorithm,lambda_index,lambda,seed,status,iterations,reached_target,final_dist_sq,final_gap,"
      "comm_rounds,local_grad_batches,file\n";
  for (const auto& r : runs) {
    s += r.label + ',' + r.algorithm + ',' + std::to_string(r.lambda_index) + ',' + format_number(r.lambda) + ',' +
         std::to_string(r.seed) + ',' + (r.ok ? "ok" : "failed") + ',' + std::to_string(r.iterations) + ',' +
         (r.reached_target ? "1" : "0") + ',' + format_number(r.final_dist_sq) + ',' + format_number(r.final_gap) +
         ',' + std::to_string(r.counters.comm_rounds) + ',' + std::to_string(r.counters.local_grad_batches) + ',' +
         r.file + '\n';
  }
  return s;
}

}  // namespace

int ResultBundle::exit_code() const {
  for (const auto& r : runs)
    if (!r.ok) return r.error_kind ? exit_code_for(*r.error_kind) : 2;
  return 0;
}

ResultBundle run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  validate(config);
  const GossipMatrix gossip = build_gossip(config.topology);
  const ProblemPtr problem = build_problem(config);

  const bool want_reference =
      config.reference == "always" || (config.reference == "auto" && problem->strong_convexity() > 0.0);
  std::vector<ReferenceSlot> refs(config.lambdas.size());
  if (want_reference) {
    parallel_for(config.lambdas.size(), options.jobs, [&](std::size_t i) {
      try {
        refs[i].report = reference_solution_report(*problem, gossip, config.lambdas[i], config.reference_tol);
      } catch (const Error& e) {
        refs[i].error_kind = e.kind();
        refs[i].error = e.what();
      }
    });
  }

  const RecordOptions record{config.record.every, parse_gap_mode(config.record.gap), config.record.gap_inner_tol};
  const std::size_t n_alg = config.algorithms.size();
  const std::size_t n_lambda = config.lambdas.size();
  const std::size_t n_seed = config.seeds.size();
  const std::size_t cells = n_alg * n_lambda * n_seed;

  ResultBundle bundle;
  bundle.directory = output_directory(config, options);
  bundle.runs.resize(cells);
  std::vector<std::string> csv(cells);

  parallel_for(cells, options.jobs, [&](std::size_t idx) {
    const std::size_t ai = idx / (n_lambda * n_seed);
    const std::size_t li = (idx / n_seed) % n_lambda;
    const std::size_t si = idx % n_seed;
    const AlgorithmSpec& spec = config.algorithms[ai];
    RunSummary& s = bundle.runs[idx];
    s.label = spec.effective_label();
    s.algorithm = spec.kind;
    s.lambda_index = li;
    s.lambda = config.lambdas[li];
    s.seed = config.seeds[si];
    s.file = "runs/" + s.label + "-l" + std::to_string(li) + "-s" + std::to_string(s.seed) + ".csv";
    try {
      if (refs[li].error_kind) fail(*refs[li].error_kind, "reference solution: " + refs[li].error);
      const ResolvedAlgorithm resolved = resolve_algorithm(spec, config, *problem, gossip, s.lambda, s.seed);
      s.resolved = resolved_json(resolved);
      std::optional<StackedPoint> ref;
      if (refs[li].report) ref = refs[li].report->solution;
      const StackedPoint start = build_start(config, *problem, s.seed);
      RunOutcome outcome = run_algorithm(*problem, gossip, resolved.config, start, ref, record);
      csv[idx] = outcome.record.to_csv();
      s.ok = true;
      s.iterations = outcome.iterations;
      s.reached_target = outcome.reached_target;
      s.final_dist_sq = outcome.final_dist_sq;
      s.final_gap = outcome.final_gap;
      s.counters = outcome.counters;
    } catch (const Error& e) {
      s.ok = false;
      s.error_kind = e.kind();
      s.error = std::string(to_string(e.kind())) + ": " + e.what() + " [algorithm " + s.label + ", lambda[" +
                std::to_string(li) + "] = " + format_number(s.lambda) + ", seed " + std::to_string(s.seed) + "]";
    }
  });

  json manifest;
  manifest["config"] = serialize_config(config, false);
  manifest["constants"] = {{"L", problem->smoothness()},
                           {"mu", problem->strong_convexity()},
                           {"lambda_max", gossip.lambda_max()},
                           {"omega", problem->domain().diameter()}};
  json references = json::array();
  for (std::size_t i = 0; i < n_lambda; ++i) {
    json r = {{"lambda", config.lambdas[i]}};
    if (refs[i].report) {
      r["iterations"] = refs[i].report->iterations;
      r["residual_sq"] = refs[i].report->residual_sq;
      r["linear_check_dist_sq"] = optional_json(refs[i].report->linear_check_dist_sq);
    } else if (refs[i].error_kind) {
      r["status"] = "failed";
      r["error"] = refs[i].error;
    } else {
      r["status"] = "not computed";
    }
    references.push_back(r);
  }
  manifest["references"] = references;
  json runs = json::array();
  for (const auto& s : bundle.runs) {
    json r = {{"file", s.file},
              {"label", s.label},
              {"algorithm", s.algorithm},
              {"lambda_index", s.lambda_index},
              {"lambda", s.lambda},
              {"seed", s.seed},
              {"status", s.ok ? "ok" : "failed"}};
    if (!s.ok) r["error"] = s.error;
    if (!s.resolved.is_null()) r["resolved"] = s.resolved;
    runs.push_back(r);
  }
  manifest["runs"] = runs;
  bundle.manifest = manifest;

  std::error_code ec;
  std::filesystem::create_directories(bundle.directory / "runs", ec);
  if (ec) fail(ErrorKind::io, "cannot create " + (bundle.directory / "runs").string() + ": " + ec.message());
  for (std::size_t i = 0; i < cells; ++i)
    if (bundle.runs[i].ok) write_file(bundle.directory / bundle.runs[i].file, csv[i]);
  write_file(bundle.directory / "summary.csv", summary_csv(bundle.runs));
  write_file(bundle.directory / "manifest.json", manifest.dump(2) + "\n");
  return bundle;
}

}  // namespace pfsaddle
