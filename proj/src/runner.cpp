#include <string>

#include "pfsaddle/algorithms.hpp"

namespace pfsaddle {

std::string_view to_string(AlgorithmKind kind) {
  switch (kind) {
    case AlgorithmKind::extragradient: return "extragradient";
    case AlgorithmKind::sliding: return "sliding";
    case AlgorithmKind::rles: return "rles";
  }
  return "unknown";
}

AlgorithmKind parse_algorithm_kind(std::string_view name) {
  for (auto k : {AlgorithmKind::extragradient, AlgorithmKind::sliding, AlgorithmKind::rles})
    if (to_string(k) == name) return k;
  fail(ErrorKind::config, "unknown algorithm '" + std::string(name) + "' (extragradient | sliding | rles)");
}

std::string_view to_string(StopKind kind) {
  switch (kind) {
    case StopKind::distance: return "distance";
    case StopKind::gap: return "gap";
    case StopKind::iterations: return "iterations";
  }
  return "unknown";
}

StopKind parse_stop_kind(std::string_view name) {
  for (auto k : {StopKind::distance, StopKind::gap, StopKind::iterations})
    if (to_string(k) == name) return k;
  fail(ErrorKind::config, "unknown target kind '" + std::string(name) + "' (distance | gap | iterations)");
}

std::string_view to_string(GapMode mode) {
  switch (mode) {
    case GapMode::none: return "none";
    case GapMode::full: return "full";
    case GapMode::local: return "local";
    case GapMode::both: return "both";
  }
  return "unknown";
}

GapMode parse_gap_mode(std::string_view name) {
  for (auto m : {GapMode::none, GapMode::full, GapMode::local, GapMode::both})
    if (to_string(m) == name) return m;
  fail(ErrorKind::config, "unknown gap mode '" + std::string(name) + "' (none | full | local | both)");
}

namespace {

/// Uniform view over the three state machines.
class Stepper {
 public:
  Stepper(const SaddleProblem& problem, const GossipMatrix& gossip, const AlgorithmConfig& c, const StackedPoint& start)
      : problem_(problem), gossip_(gossip), config_(c) {
    switch (c.kind) {
      case AlgorithmKind::extragradient:
        if (!(c.gamma > 0.0)) fail(ErrorKind::config, "extragradient needs gamma > 0");
        problem.check_point(start, "extragradient");
        eg_.z = project(problem.domain(), start);
        break;
      case AlgorithmKind::sliding:
        sliding_config_ = {c.gamma, c.lambda, c.inner_T, c.average_output};
        sliding_ = sliding_init(problem, start);
        break;
      case AlgorithmKind::rles:
        rles_config_.gamma = c.gamma;
        rles_config_.lambda = c.lambda;
        rles_config_.p = c.p;
        rles_config_.schedule = c.schedule;
        rles_config_.seed = c.seed;
        rles_ = rles_init(problem, gossip, start, rles_config_);
        break;
    }
  }

  void step() {
    switch (config_.kind) {
      case AlgorithmKind::extragradient:
        extragradient_step(eg_, problem_, gossip_, config_.lambda, config_.gamma);
        check_divergence(eg_.z, problem_.domain(), 1.0, "extragradient");
        break;
      case AlgorithmKind::sliding: sliding_outer_step(sliding_, problem_, gossip_, sliding_config_); break;
      case AlgorithmKind::rles: rles_outer_step(rles_, problem_, gossip_, rles_config_); break;
    }
  }

  StackedPoint output() const {
    switch (config_.kind) {
      case AlgorithmKind::extragradient: return eg_.z;
      case AlgorithmKind::sliding: return sliding_.output(sliding_config_);
      case AlgorithmKind::rles: break;
    }
    return rles_.z;
  }

  OracleCounters counters() const {
    switch (config_.kind) {
      case AlgorithmKind::extragradient: return eg_.counters;
      case AlgorithmKind::sliding: return sliding_.counters;
      case AlgorithmKind::rles: break;
    }
    return rles_.counters;
  }

 private:
  const SaddleProblem& problem_;
  const GossipMatrix& gossip_;
  AlgorithmConfig config_;
  ExtragradientState eg_;
  SlidingConfig sliding_config_;
  SlidingState sliding_;
  RlesConfig rles_config_;
  RlesState rles_;
};

}  // namespace

RunOutcome run_algorithm(const SaddleProblem& problem, const GossipMatrix& gossip, const AlgorithmConfig& config,
                         const StackedPoint& start, const std::optional<StackedPoint>& reference,
                         const RecordOptions& record) {
  if (config.max_outer < 0) fail(ErrorKind::config, "max_outer must be >= 0");
  if (record.every < 1) fail(ErrorKind::config, "record.every must be >= 1");
  if (config.target.kind == StopKind::distance && !reference)
    fail(ErrorKind::config, "a distance target needs a reference solution");
  if (config.target.kind != StopKind::iterations && !(config.target.epsilon > 0.0))
    fail(ErrorKind::config, "target epsilon must be > 0");
  if (reference) problem.check_point(*reference, "reference");

  const long cap = config.target.kind == StopKind::iterations ? std::min(config.max_outer, config.target.iterations)
                                                              : config.max_outer;
  const bool track_gap = record.gap != GapMode::none || config.target.kind == StopKind::gap;
  RunOutcome out{RunRecord(record.gap == GapMode::both), {}, {}, 0, false, std::nullopt, std::nullopt};

  Stepper stepper(problem, gossip, config, start);

  auto gap_of = [&](const StackedPoint& z, GapObjective objective) {
    return restricted_gap(problem, gossip, config.lambda, z, record.gap_inner_tol, objective);
  };

  auto measure = [&](long k, bool with_gap) {
    const StackedPoint z = stepper.output();
    MetricRow row;
    row.k = k;
    row.counters = stepper.counters();
    if (reference) row.dist_sq = distance_sq(z, *reference);
    if (with_gap) {
      const GapMode mode = record.gap == GapMode::none ? GapMode::full : record.gap;
      row.gap = gap_of(z, mode == GapMode::local ? GapObjective::local : GapObjective::full);
      if (mode == GapMode::both) row.gap_f = gap_of(z, GapObjective::local);
    }
    row.penalty_value = penalty_value(gossip, config.lambda, z);
    const Consensus c = consensus_residual(z);
    row.consensus_x = c.x;
    row.consensus_y = c.y;
    return row;
  };

  auto reached = [&](const MetricRow& row, long k) {
    switch (config.target.kind) {
      case StopKind::distance: return row.dist_sq && *row.dist_sq <= config.target.epsilon;
      case StopKind::gap: return row.gap.has_value() && *row.gap <= config.target.epsilon;
      case StopKind::iterations: return k >= config.target.iterations;
    }
    return false;
  };

  long k = 0;
  for (;;) {
    const bool scheduled = k % record.every == 0;
    const bool last = k >= cap;
    // distance targets are checked every iteration; gaps only where recorded
    const bool need_row = scheduled || last || config.target.kind == StopKind::distance;
    if (need_row) {
      const bool with_gap = track_gap && (scheduled || last);
      MetricRow row = measure(k, with_gap);
      const bool done = reached(row, k);
      if (scheduled || last || done) {
        out.final_dist_sq = row.dist_sq;
        if (row.gap) out.final_gap = row.gap;
        if (done && track_gap && !row.gap) row = measure(k, true);
        out.record.append(std::move(row));
      }
      if (done) {
        out.reached_target = true;
        break;
      }
    }
    if (last) break;
    stepper.step();
    ++k;
  }
  if (!out.record.empty() && out.record.back().gap) out.final_gap = out.record.back().gap;
  out.output = stepper.output();
  out.counters = stepper.counters();
  out.iterations = k;
  return out;
}

}  // namespace pfsaddle
