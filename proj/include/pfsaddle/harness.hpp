#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "pfsaddle/algorithms.hpp"
#include "pfsaddle/gossip.hpp"
#include "pfsaddle/problems.hpp"

namespace pfsaddle {

/// A number or "auto" (empty).
struct Tunable {
  std::optional<double> value;

  bool is_auto() const { return !value.has_value(); }
  bool operator==(const Tunable&) const = default;
};

struct TopologySpec {
  std::string kind;          // required
  int num_nodes = 8;
  std::uint64_t seed = 0;
  double edge_prob = 0.5;
  double scale = 1.0;        // W <- scale * Laplacian

  bool operator==(const TopologySpec&) const = default;
};

struct ProblemSpec {
  std::string family;        // required: quadratic | bilinear | robust_regression
  int dim_x = 4;
  int dim_y = 4;             // quadratic / bilinear; robust regression uses dim_x for both
  double mu = 1.0;
  double L = 10.0;
  double heterogeneity = 0.5;
  double curvature_share = 0.5;
  std::optional<double> radius_x;   // default 10 (quadratic, bilinear) or 1 (robust regression)
  std::optional<double> radius_y;
  int samples_per_node = 20;
  double beta_x = 0.5;
  double beta_y = 3.0;
  double noise = 0.1;
  std::uint64_t seed = 1;

  bool operator==(const ProblemSpec&) const = default;
};

struct AlgorithmSpec {
  std::string kind = "sliding";
  std::string label;         // file prefix; defaults to kind
  Tunable gamma;
  Tunable inner_T;
  Tunable delta_rel;
  Tunable p;
  std::string problem_case = "auto";   // auto | scsc | cc
  std::string variant = "conservative";
  std::string schedule = "randomized";
  std::string output = "auto";         // auto | last | average
  long max_outer = 100'000;

  std::string effective_label() const { return label.empty() ? kind : label; }
  bool operator==(const AlgorithmSpec&) const = default;
};

struct TargetSpec {
  std::string kind = "distance";
  double epsilon = 1e-8;
  long iterations = 1000;

  bool operator==(const TargetSpec&) const = default;
};

struct RecordSpec {
  long every = 1;
  std::string gap = "none";
  double gap_inner_tol = 1e-10;

  bool operator==(const RecordSpec&) const = default;
};

struct StartSpec {
  std::string kind = "random";   // random | zero
  double scale = 0.5;            // random: ||x0 - c|| = scale * radius

  bool operator==(const StartSpec&) const = default;
};

struct ExperimentConfig {
  TopologySpec topology;
  ProblemSpec problem;
  std::vector<double> lambdas{1.0};
  std::vector<AlgorithmSpec> algorithms{AlgorithmSpec{}};
  std::vector<std::uint64_t> seeds{1};
  TargetSpec target;
  RecordSpec record;
  StartSpec start;
  std::string reference = "auto";   // auto (when mu > 0) | always | never
  double reference_tol = kReferenceTolerance;
  std::string output_dir = "results";

  bool operator==(const ExperimentConfig&) const = default;
};

/// Strict: unknown keys, wrong types and missing required fields are config errors.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json serialize_config(const ExperimentConfig& config, bool include_output_dir = true);
/// Cross-field checks that need no computation.
void validate(const ExperimentConfig& config);

GossipMatrix build_gossip(const TopologySpec& spec);
ProblemPtr build_problem(const ExperimentConfig& config);
/// Replicated start point for a seed.
StackedPoint build_start(const ExperimentConfig& config, const SaddleProblem& problem, std::uint64_t seed);

struct ResolvedAlgorithm {
  AlgorithmConfig config;
  std::optional<double> L_eff;
  ProblemCase problem_case = ProblemCase::scsc;
};

ResolvedAlgorithm resolve_algorithm(const AlgorithmSpec& spec, const ExperimentConfig& config,
                                    const SaddleProblem& problem, const GossipMatrix& gossip, double lambda,
                                    std::uint64_t seed);

struct RunSummary {
  std::string label;
  std::string algorithm;
  std::size_t lambda_index = 0;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  std::string file;
  bool ok = false;
  std::string error;
  std::optional<ErrorKind> error_kind;
  long iterations = 0;
  bool reached_target = false;
  std::optional<double> final_dist_sq;
  std::optional<double> final_gap;
  OracleCounters counters;
  nlohmann::json resolved;
};

struct ResultBundle {
  std::filesystem::path directory;
  std::vector<RunSummary> runs;
  nlohmann::json manifest;

  /// 0 when every cell succeeded, else the code of the first failure.
  int exit_code() const;
};

struct RunOptions {
  int jobs = 1;
  std::optional<std::filesystem::path> output_dir;   // overrides config.output_dir
};

/// Executes the grid algorithms x lambdas x seeds and writes
///   runs/<label>-l<lambda index>-s<seed>.csv, summary.csv, manifest.json.
ResultBundle run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

/// Accepts either a config or a manifest (anything with a "config" key).
ExperimentConfig load_config_or_manifest(const std::filesystem::path& path);

inline constexpr double kPlotFloor = 1e-16;

/// Pointwise median over curves aligned by row index, truncated to the shortest.
std::vector<double> pointwise_median(const std::vector<std::vector<double>>& curves);

/// Writes <bundle>/plot/<quantity>-vs-<x_axis>/<run>.dat (two columns) plus a
/// <label>-l<i>-median.dat per (algorithm, lambda) group. Returns the files written.
std::vector<std::filesystem::path> emit_plot_data(const std::filesystem::path& bundle, std::string_view quantity,
                                                  std::string_view x_axis);

/// CLI entry point (run / plot / validate). Returns the process exit code.
int run_cli(int argc, char** argv);

}  // namespace pfsaddle
