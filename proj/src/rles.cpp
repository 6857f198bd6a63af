#include <cmath>
#include <string>

#include "pfsaddle/algorithms.hpp"

namespace pfsaddle {

std::string_view to_string(RlesSchedule schedule) {
  return schedule == RlesSchedule::randomized ? "randomized" : "deterministic";
}

RlesSchedule parse_rles_schedule(std::string_view name) {
  if (name == "randomized") return RlesSchedule::randomized;
  if (name == "deterministic") return RlesSchedule::deterministic;
  fail(ErrorKind::config, "unknown schedule '" + std::string(name) + "' (randomized | deterministic)");
}

namespace {

void check_config(const RlesConfig& c) {
  if (!(c.p > 0.0 && c.p < 1.0)) fail(ErrorKind::invalid_argument, "rles: p must lie in (0, 1)");
  if (!(c.gamma > 0.0)) fail(ErrorKind::invalid_argument, "rles: gamma must be > 0");
  if (!(c.lambda >= 0.0)) fail(ErrorKind::invalid_argument, "rles: lambda must be >= 0");
}

long schedule_period(double p) { return std::max(1L, std::lround(1.0 / p)); }

void refresh_anchor(RlesState& s, const SaddleProblem& problem, const GossipMatrix& gossip, double lambda) {
  problem.grad_f(s.anchor, s.anchor_grad);
  gossip.apply(s.anchor.x, lambda, s.anchor_wu.x);
  gossip.apply(s.anchor.y, lambda, s.anchor_wu.y);
  s.counters.comm_rounds += 1;
  s.counters.local_grad_batches += 1;
  ++s.anchor_refreshes;
}

Coins draw_coins(RlesState& s, const RlesConfig& c) {
  if (c.forced_coins) return c.forced_coins(s.k);
  if (c.schedule == RlesSchedule::deterministic) {
    const long period = schedule_period(c.p);
    const bool local = s.k % period != period - 1;
    return {local, local};
  }
  Coins coins;
  coins.xi = !(s.rng.uniform() < c.p);
  coins.xi_half = !(s.rng.uniform() < c.p);
  return coins;
}

}  // namespace

RlesState rles_init(const SaddleProblem& problem, const GossipMatrix& gossip, const StackedPoint& start,
                    const RlesConfig& config) {
  check_config(config);
  problem.check_point(start, "rles");
  RlesState s;
  s.z = project(problem.domain(), start);
  s.anchor = s.z;
  s.rng = Xoshiro256(config.seed);
  refresh_anchor(s, problem, gossip, config.lambda);
  s.anchor_refreshes = 0;
  s.comm_iterations = 0;
  return s;
}

void rles_outer_step(RlesState& s, const SaddleProblem& problem, const GossipMatrix& gossip,
                     const RlesConfig& config) {
  check_config(config);
  const double p = config.p;
  const double gamma = config.gamma;

  // full operator at the anchor from the cache
  const Matrix fux = s.anchor_grad.x + s.anchor_wu.x;
  const Matrix fuy = s.anchor_grad.y - s.anchor_wu.y;

  // extrapolate toward the anchor
  const Matrix bar_x = (1.0 - p) * s.z.x + p * s.anchor.x;
  const Matrix bar_y = (1.0 - p) * s.z.y + p * s.anchor.y;

  // half step with the exact operator at the anchor
  StackedPoint half(bar_x - gamma * fux, bar_y + gamma * fuy);
  project_in_place(problem.domain(), half);

  // one coin picks which half of the operator gets refreshed
  const Coins coins = draw_coins(s, config);
  Matrix gx_half, gy_half, gx_anchor, gy_anchor;
  bool communicated = false;
  if (coins.xi) {
    const StackedPoint g = problem.grad_f(half);
    s.counters.local_grad_batches += 1;
    gx_half = g.x / (1.0 - p);
    gy_half = g.y / (1.0 - p);
    gx_anchor = s.anchor_grad.x / (1.0 - p);
    gy_anchor = s.anchor_grad.y / (1.0 - p);
  } else {
    gossip.apply(half.x, config.lambda / p, gx_half);
    gossip.apply(half.y, -config.lambda / p, gy_half);
    s.counters.comm_rounds += 1;
    communicated = true;
    gx_anchor = s.anchor_wu.x / p;
    gy_anchor = -s.anchor_wu.y / p;
  }

  // variance-reduced full step
  s.z.x = bar_x - gamma * (gx_half - gx_anchor + fux);
  s.z.y = bar_y + gamma * (gy_half - gy_anchor + fuy);
  check_divergence(s.z, problem.domain(), 1.0, "rles");
  project_in_place(problem.domain(), s.z);

  // occasional anchor refresh
  if (!coins.xi_half) {
    s.anchor = s.z;
    refresh_anchor(s, problem, gossip, config.lambda);
    communicated = true;
  }
  if (communicated) ++s.comm_iterations;
  ++s.k;
}

StackedPoint rles_estimator(const SaddleProblem& problem, const GossipMatrix& gossip, double lambda, double p,
                            const StackedPoint& point, bool xi) {
  if (!(p > 0.0 && p < 1.0)) fail(ErrorKind::invalid_argument, "rles_estimator: p must lie in (0, 1)");
  if (xi) {
    StackedPoint g = problem.grad_f(point);
    g.x /= (1.0 - p);
    g.y /= (1.0 - p);
    return g;
  }
  StackedPoint g;
  gossip.apply(point.x, lambda / p, g.x);
  gossip.apply(point.y, -lambda / p, g.y);
  return g;
}

double rles_expected_comm_per_iteration(double p) { return 2.0 * p; }

}  // namespace pfsaddle
