#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pfsaddle/gossip.hpp"
#include "pfsaddle/problems.hpp"
#include "pfsaddle/stacked.hpp"

namespace pfsaddle {

/// comm_rounds: gossip products of a stacked point (x and y exchanged together).
/// local_grad_batches: stacked grad f evaluations (every node once).
struct OracleCounters {
  std::int64_t comm_rounds = 0;
  std::int64_t local_grad_batches = 0;

  bool operator==(const OracleCounters&) const = default;
};

/// frobenius_sq(p.x - ref.x) + frobenius_sq(p.y - ref.y).
double distance_sq(const StackedPoint& p, const StackedPoint& ref);

struct Consensus {
  double x = 0.0;
  double y = 0.0;
};

/// (sum_m ||x_m - xbar||^2, sum_m ||y_m - ybar||^2).
Consensus consensus_residual(const StackedPoint& p);

enum class GapObjective { full, local };  // F = f + phi, or f alone

struct GapOptions {
  double inner_tol = 1e-10;
  long max_iterations = 1'000'000;
  GapObjective objective = GapObjective::full;
};

struct GapReport {
  double gap = 0.0;
  double max_part = 0.0;   // max_{Y'} F(X, Y')
  double min_part = 0.0;   // min_{X'} F(X', Y)
  long iterations_max = 0;
  long iterations_min = 0;
};

/// Restricted gap max_{Y' in dom} F(X, Y') - min_{X' in dom} F(X', Y). Both
/// inner problems run projected gradient with step 1/(L + lambda lambda_max)
/// until the gradient-mapping norm drops to inner_tol.
GapReport restricted_gap_report(const SaddleProblem& problem, const GossipMatrix& gossip, double lambda,
                                const StackedPoint& p, const GapOptions& options = {});
double restricted_gap(const SaddleProblem& problem, const GossipMatrix& gossip, double lambda, const StackedPoint& p,
                      double inner_tol = 1e-10, GapObjective objective = GapObjective::full);

// ---------------------------------------------------------------------------

struct MetricRow {
  std::int64_t k = 0;
  OracleCounters counters;
  std::optional<double> dist_sq;
  std::optional<double> gap;
  double penalty_value = 0.0;
  double consensus_x = 0.0;
  double consensus_y = 0.0;
  std::optional<double> gap_f;  // trailing column, only when both gaps are requested
};

inline constexpr std::array<std::string_view, 8> kMetricColumns = {
    "k", "comm_rounds", "local_grad_batches", "dist_sq", "gap", "penalty_value", "consensus_x", "consensus_y"};

class RunRecord {
 public:
  explicit RunRecord(bool with_gap_f = false) : with_gap_f_(with_gap_f) {}

  /// Rows must arrive with strictly increasing k and nondecreasing counters.
  void append(MetricRow row);

  const std::vector<MetricRow>& rows() const { return rows_; }
  bool with_gap_f() const { return with_gap_f_; }
  bool empty() const { return rows_.empty(); }
  const MetricRow& back() const { return rows_.back(); }

  std::string csv_header() const;
  std::string to_csv() const;

 private:
  bool with_gap_f_;
  std::vector<MetricRow> rows_;
};

/// %.17g, or an empty cell.
std::string format_number(std::optional<double> value);
std::string format_csv_row(const MetricRow& row, bool with_gap_f);

}  // namespace pfsaddle
