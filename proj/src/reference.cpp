#include <cmath>
#include <string>

#include "pfsaddle/algorithms.hpp"
#include "pfsaddle/metrics.hpp"
#include "pfsaddle/problems.hpp"

namespace pfsaddle {

namespace {

constexpr long kReferenceCap = 10'000'000;
constexpr double kLinearCheckTolerance = 1e-8;

}  // namespace

ReferenceReport reference_solution_report(const SaddleProblem& problem, const GossipMatrix& gossip, double lambda,
                                          double tol) {
  if (!(tol > 0.0)) fail(ErrorKind::invalid_argument, "reference tolerance must be positive");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) fail(ErrorKind::invalid_argument, "lambda must be finite and >= 0");
  if (problem.strong_convexity() <= 0.0 && problem.domain().unbounded)
    fail(ErrorKind::invalid_argument, "reference solution needs mu > 0 or a compact domain");

  const double gamma = 1.0 / (2.0 * (problem.smoothness() + lambda * gossip.lambda_max()));
  const StackedPoint start = StackedPoint::zeros(problem.num_nodes(), problem.dim_x(), problem.dim_y());
  ExtragradientStop stop;
  stop.max_iterations = kReferenceCap;
  stop.residual_tol = tol;
  ExtragradientResult run = extragradient_run(problem, gossip, lambda, gamma, start, stop);
  if (!run.converged)
    fail(ErrorKind::non_convergence, "reference solver hit the iteration cap (" + std::to_string(kReferenceCap) +
                                         ") with residual^2 = " + std::to_string(run.residual_sq));

  ReferenceReport report;
  report.solution = std::move(run.z);
  report.iterations = run.iterations;
  report.residual_sq = run.residual_sq;

  if (auto direct = linear_system_solution(problem, gossip, lambda)) {
    if (problem.domain().contains(*direct, 0.0)) {
      const double d = distance_sq(report.solution, *direct);
      report.linear_check_dist_sq = d;
      if (!(d <= kLinearCheckTolerance))
        fail(ErrorKind::non_convergence,
             "reference solution disagrees with the linear-system solve: dist^2 = " + std::to_string(d));
    }
  }
  return report;
}

StackedPoint reference_solution(const SaddleProblem& problem, const GossipMatrix& gossip, double lambda, double tol) {
  return reference_solution_report(problem, gossip, lambda, tol).solution;
}

}  // namespace pfsaddle
