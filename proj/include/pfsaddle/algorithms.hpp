#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>

#include "pfsaddle/gossip.hpp"
#include "pfsaddle/metrics.hpp"
#include "pfsaddle/problems.hpp"
#include "pfsaddle/rng.hpp"

namespace pfsaddle {

// --- baseline extragradient ---------------------------------------------------

struct ExtragradientState {
  StackedPoint z;
  OracleCounters counters;
  long iteration = 0;
};

/// One extragradient iteration on the full operator of F. Returns the
/// fixed-point residual ||z - proj(z - gamma g(z))||^2 at the starting point.
double extragradient_step(ExtragradientState& state, const SaddleProblem& problem, const GossipMatrix& gossip,
                          double lambda, double gamma);

struct ExtragradientStop {
  long max_iterations = 10'000'000;
  /// Stop once the residual (squared) is <= residual_tol^2; 0 disables.
  double residual_tol = 0.0;
};

struct ExtragradientResult {
  StackedPoint z;
  OracleCounters counters;
  long iterations = 0;
  double residual_sq = 0.0;
  bool converged = false;
};

ExtragradientResult extragradient_run(const SaddleProblem& problem, const GossipMatrix& gossip, double lambda,
                                      double gamma, const StackedPoint& start, const ExtragradientStop& stop);

/// Divergence guard: frobenius_sq(z) above 1e12 Omega^2 (or past 1e12 times
/// the start norm on unbounded domains), or a non-finite entry.
void check_divergence(const StackedPoint& z, const BallDomain& domain, double scale_sq, const char* what);

// --- Algorithm 1: sliding ------------------------------------------------------

struct NodePoint {
  Vector x;
  Vector y;
};

/// inner_T extragradient iterations on the node-m prox problem
///   min_ux max_uy gamma f_m(u) + 1/2 ||ux - vx||^2 - 1/2 ||uy - vy||^2
/// over the node's balls, step 1/(2 (1 + gamma L)), started at `start`.
NodePoint solve_prox(const SaddleProblem& problem, Eigen::Index node, const NodePoint& v, const NodePoint& start,
                     double gamma, int inner_T);

struct SlidingConfig {
  double gamma = 0.0;
  double lambda = 0.0;
  int inner_T = 1;
  /// Output the mean of the prox points U^0..U^{K-1} instead of the last iterate.
  bool average_output = false;
};

struct SlidingState {
  StackedPoint z;
  StackedPoint anchor_sum;   // sum of U^k
  long averaged = 0;
  OracleCounters counters;
  long k = 0;

  /// Last iterate, or the running mean of the prox points (falls back to z at k = 0).
  StackedPoint output(const SlidingConfig& config) const;
};

SlidingState sliding_init(const SaddleProblem& problem, const StackedPoint& start);
void sliding_outer_step(SlidingState& state, const SaddleProblem& problem, const GossipMatrix& gossip,
                        const SlidingConfig& config);

// --- Algorithm 2: randomized local extra step ---------------------------------------

enum class RlesSchedule { randomized, deterministic };

std::string_view to_string(RlesSchedule schedule);
RlesSchedule parse_rles_schedule(std::string_view name);

/// Coin values as in the algorithm: true means xi = 1 (local step / keep anchor).
struct Coins {
  bool xi = true;
  bool xi_half = true;
};

struct RlesConfig {
  double gamma = 0.0;
  double lambda = 0.0;
  double p = 0.5;
  RlesSchedule schedule = RlesSchedule::randomized;
  std::uint64_t seed = 0;
  /// Test hook: when set, replaces both coin draws at iteration k.
  std::function<Coins(long k)> forced_coins;
};

struct RlesState {
  StackedPoint z;
  StackedPoint anchor;        // U^k
  StackedPoint anchor_grad;   // grad f(U^k)
  StackedPoint anchor_wu;     // (lambda W U_x, lambda W U_y)
  OracleCounters counters;
  Xoshiro256 rng;
  long k = 0;
  long comm_iterations = 0;   // iterations with at least one gossip product
  long anchor_refreshes = 0;
};

/// U^0 = Z^0 with its cache: 1 comm round + 1 local batch.
RlesState rles_init(const SaddleProblem& problem, const GossipMatrix& gossip, const StackedPoint& start,
                    const RlesConfig& config);
void rles_outer_step(RlesState& state, const SaddleProblem& problem, const GossipMatrix& gossip,
                     const RlesConfig& config);

/// G(X, Y) for a fixed coin: grad f / (1 - p) when xi = 1, (lambda W X, -lambda W Y) / p when xi = 0.
StackedPoint rles_estimator(const SaddleProblem& problem, const GossipMatrix& gossip, double lambda, double p,
                            const StackedPoint& point, bool xi);

/// Expected gossip products per iteration (line-5 coin plus anchor refresh).
double rles_expected_comm_per_iteration(double p);

// --- parameter selection -------------------------------------------------------------

enum class ProblemCase { scsc, cc };
enum class SlidingVariant { conservative, aggressive };

std::string_view to_string(ProblemCase c);
ProblemCase parse_problem_case(std::string_view name);
std::string_view to_string(SlidingVariant v);
SlidingVariant parse_sliding_variant(std::string_view name);

struct SlidingParams {
  double gamma = 0.0;
  double delta = 0.0;   // inner precision used for T (relative for scsc)
  int inner_T = 1;
};

/// SC-SC conservative: gamma = min{1/(12 mu), 1/(4 ll)},
///   delta = 1 / (2 (2 + 4 gamma ll / mu + 4 / (gamma mu) + 4 gamma^2 ll)).
/// SC-SC aggressive: gamma = min{1/(2 ll), 1/(6 mu)}, delta = min{1/4, (64/(gamma mu) + 64 gamma L^2 / mu)^-1}.
/// C-C: gamma = 1/(2 ll), delta = min{1/4, 1/(16 (1 + gamma^2 L^2)), eps^2 gamma^2 / ((1 + gamma L)^2 Omega^2)}.
/// T = ceil((1 + gamma L) log(1/delta)). ll = lambda * lambda_max.
SlidingParams params_sliding(ProblemCase problem_case, double L, double mu, double lambda, double lambda_max,
                             double epsilon, double omega, SlidingVariant variant = SlidingVariant::conservative);

/// ceil(log(d0 / epsilon) / (gamma mu)) outer steps.
long sliding_iteration_bound(double gamma, double mu, double d0, double epsilon);

struct RlesParams {
  double gamma = 0.0;
  double p = 0.0;
  double L_eff = 0.0;
};

/// p = ll / (ll + L), gamma = sqrt(ll) / (2 (ll + L)^1.5), L_eff = sqrt(L^2/(1-p) + ll^2/p).
RlesParams params_rles(double L, double lambda, double lambda_max);

// --- driver -------------------------------------------------------------------------

enum class AlgorithmKind { extragradient, sliding, rles };

std::string_view to_string(AlgorithmKind kind);
AlgorithmKind parse_algorithm_kind(std::string_view name);

enum class StopKind { distance, gap, iterations };

std::string_view to_string(StopKind kind);
StopKind parse_stop_kind(std::string_view name);

struct StopTarget {
  StopKind kind = StopKind::iterations;
  double epsilon = 1e-8;
  long iterations = 1000;
};

struct AlgorithmConfig {
  AlgorithmKind kind = AlgorithmKind::sliding;
  double gamma = 0.0;
  double lambda = 0.0;
  int inner_T = 1;
  double delta_rel = 0.0;   // informational; inner_T is what runs
  double p = 0.5;
  RlesSchedule schedule = RlesSchedule::randomized;
  std::uint64_t seed = 0;
  long max_outer = 100'000;
  StopTarget target;
  bool average_output = false;
};

enum class GapMode { none, full, local, both };

std::string_view to_string(GapMode mode);
GapMode parse_gap_mode(std::string_view name);

struct RecordOptions {
  /// Record every `every` iterations (the first and last iterate are always recorded).
  long every = 1;
  GapMode gap = GapMode::none;
  double gap_inner_tol = 1e-10;
};

struct RunOutcome {
  RunRecord record;
  StackedPoint output;
  OracleCounters counters;
  long iterations = 0;
  bool reached_target = false;
  std::optional<double> final_dist_sq;
  std::optional<double> final_gap;
};

/// Runs one algorithm from `start` until its target or max_outer. Distance
/// targets need `reference`; gap targets evaluate the F-gap at record points.
RunOutcome run_algorithm(const SaddleProblem& problem, const GossipMatrix& gossip, const AlgorithmConfig& config,
                         const StackedPoint& start, const std::optional<StackedPoint>& reference,
                         const RecordOptions& record = {});

}  // namespace pfsaddle
