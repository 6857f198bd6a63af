#include "pfsaddle/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <string>

namespace pfsaddle {

double distance_sq(const StackedPoint& p, const StackedPoint& ref) {
  require_same_shape(p, ref, "distance_sq");
  return frobenius_sq(Matrix(p.x - ref.x)) + frobenius_sq(Matrix(p.y - ref.y));
}

Consensus consensus_residual(const StackedPoint& p) {
  auto spread = [](const Matrix& a) {
    if (a.rows() == 0) return 0.0;
    const Eigen::RowVectorXd mean = a.colwise().sum() / static_cast<double>(a.rows());
    double total = 0.0;
    for (Eigen::Index m = 0; m < a.rows(); ++m) total += (a.row(m) - mean).squaredNorm();
    return total;
  };
  return {spread(p.x), spread(p.y)};
}

namespace {

enum class Side { maximize_y, minimize_x };

/// Projected gradient on one block with the other held fixed. Returns the
/// optimal point and the iteration count.
StackedPoint solve_block(const SaddleProblem& problem, const GossipMatrix& gossip, double lambda,
                         const StackedPoint& p, Side side, const GapOptions& opt, long& iterations) {
  const double eta = 1.0 / (problem.smoothness() + lambda * gossip.lambda_max());
  if (!(eta > 0.0) || !std::isfinite(eta)) fail(ErrorKind::invalid_argument, "restricted_gap: L + lambda lambda_max must be > 0");
  const BallDomain& d = problem.domain();
  StackedPoint q = p;
  StackedPoint grad;
  Matrix w;
  Matrix next;
  for (iterations = 0; iterations < opt.max_iterations; ++iterations) {
    problem.grad_f(q, grad);
    if (side == Side::maximize_y) {
      gossip.apply(q.y, lambda, w);
      next = q.y + eta * (grad.y - w);
      if (!d.unbounded) kernels::project_rows(d.center_y, d.radius_y, next);
      const double residual = (next - q.y).norm() / eta;
      q.y.swap(next);
      if (residual <= opt.inner_tol) return q;
    } else {
      gossip.apply(q.x, lambda, w);
      next = q.x - eta * (grad.x + w);
      if (!d.unbounded) kernels::project_rows(d.center_x, d.radius_x, next);
      const double residual = (next - q.x).norm() / eta;
      q.x.swap(next);
      if (residual <= opt.inner_tol) return q;
    }
    if (!q.all_finite()) fail(ErrorKind::divergence, "restricted_gap: inner iterate became non-finite");
  }
  fail(ErrorKind::non_convergence, "restricted_gap: inner solver hit the cap of " +
                                       std::to_string(opt.max_iterations) + " iterations");
}

}  // namespace

GapReport restricted_gap_report(const SaddleProblem& problem, const GossipMatrix& gossip, double lambda,
                                const StackedPoint& p, const GapOptions& options) {
  problem.check_point(p, "restricted_gap");
  if (!(options.inner_tol > 0.0)) fail(ErrorKind::invalid_argument, "restricted_gap: inner_tol must be > 0");
  const double lam = options.objective == GapObjective::full ? lambda : 0.0;
  GapReport r;
  const StackedPoint best_y = solve_block(problem, gossip, lam, p, Side::maximize_y, options, r.iterations_max);
  const StackedPoint best_x = solve_block(problem, gossip, lam, p, Side::minimize_x, options, r.iterations_min);
  r.max_part = value_full(problem, gossip, lam, best_y);
  r.min_part = value_full(problem, gossip, lam, best_x);
  r.gap = r.max_part - r.min_part;
  return r;
}

double restricted_gap(const SaddleProblem& problem, const GossipMatrix& gossip, double lambda, const StackedPoint& p,
                      double inner_tol, GapObjective objective) {
  GapOptions opt;
  opt.inner_tol = inner_tol;
  opt.objective = objective;
  return restricted_gap_report(problem, gossip, lambda, p, opt).gap;
}

// ---------------------------------------------------------------------------

void RunRecord::append(MetricRow row) {
  if (!rows_.empty()) {
    const MetricRow& last = rows_.back();
    if (row.k <= last.k) fail(ErrorKind::validation, "RunRecord rows must have strictly increasing k");
    if (row.counters.comm_rounds < last.counters.comm_rounds ||
        row.counters.local_grad_batches < last.counters.local_grad_batches)
      fail(ErrorKind::validation, "RunRecord counters must be nondecreasing");
  }
  rows_.push_back(std::move(row));
}

std::string RunRecord::csv_header() const {
  std::string h;
  for (std::size_t i = 0; i < kMetricColumns.size(); ++i) {
    if (i) h += ',';
    h += kMetricColumns[i];
  }
  if (with_gap_f_) h += ",gap_f";
  return h;
}

std::string RunRecord::to_csv() const {
  std::string out = csv_header() + "\n";
  for (const auto& row : rows_) out += format_csv_row(row, with_gap_f_) + "\n";
  return out;
}

std::string format_number(std::optional<double> value) {
  if (!value) return {};
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", *value);
  return buf;
}

std::string format_csv_row(const MetricRow& row, bool with_gap_f) {
  std::string s = std::to_string(row.k);
  s += ',' + std::to_string(row.counters.comm_rounds);
  s += ',' + std::to_string(row.counters.local_grad_batches);
  s += ',' + format_number(row.dist_sq);
  s += ',' + format_number(row.gap);
  s += ',' + format_number(row.penalty_value);
  s += ',' + format_number(row.consensus_x);
  s += ',' + format_number(row.consensus_y);
  if (with_gap_f) s += ',' + format_number(row.gap_f);
  return s;
}

}  // namespace pfsaddle
