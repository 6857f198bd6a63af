#include <cmath>
#include <limits>
#include <string>

#include "pfsaddle/algorithms.hpp"

namespace pfsaddle {

namespace {

/// Descent-ascent field of F: (grad_X f + lambda W X, -grad_Y f + lambda W Y).
void descent_field(const SaddleProblem& problem, const GossipMatrix& gossip, double lambda, const StackedPoint& z,
                   StackedPoint& grad, Matrix& wx, Matrix& wy, StackedPoint& out) {
  problem.grad_f(z, grad);
  gossip.apply(z.x, lambda, wx);
  gossip.apply(z.y, lambda, wy);
  out.x = grad.x + wx;
  out.y = wy - grad.y;
}

}  // namespace

void check_divergence(const StackedPoint& z, const BallDomain& domain, double scale_sq, const char* what) {
  if (!z.all_finite()) fail(ErrorKind::divergence, std::string(what) + ": iterate became non-finite");
  const double omega = domain.diameter();
  const double bound = std::isfinite(omega) ? 1e12 * omega * omega : 1e12 * std::max(1.0, scale_sq);
  const double norm = z.x.squaredNorm() + z.y.squaredNorm();
  if (norm > bound)
    fail(ErrorKind::divergence, std::string(what) + ": ||z||^2 = " + std::to_string(norm) + " exceeds the guard " +
                                    std::to_string(bound));
}

double extragradient_step(ExtragradientState& state, const SaddleProblem& problem, const GossipMatrix& gossip,
                          double lambda, double gamma) {
  StackedPoint grad, field;
  Matrix wx, wy;
  descent_field(problem, gossip, lambda, state.z, grad, wx, wy, field);
  StackedPoint half(state.z.x - gamma * field.x, state.z.y - gamma * field.y);
  project_in_place(problem.domain(), half);
  const double residual_sq = (state.z.x - half.x).squaredNorm() + (state.z.y - half.y).squaredNorm();

  descent_field(problem, gossip, lambda, half, grad, wx, wy, field);
  state.z.x -= gamma * field.x;
  state.z.y -= gamma * field.y;
  if (!state.z.all_finite()) fail(ErrorKind::divergence, "extragradient: iterate became non-finite");
  project_in_place(problem.domain(), state.z);

  state.counters.comm_rounds += 2;
  state.counters.local_grad_batches += 2;
  ++state.iteration;
  return residual_sq;
}

ExtragradientResult extragradient_run(const SaddleProblem& problem, const GossipMatrix& gossip, double lambda,
                                      double gamma, const StackedPoint& start, const ExtragradientStop& stop) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) fail(ErrorKind::invalid_argument, "extragradient: gamma must be > 0");
  problem.check_point(start, "extragradient");
  ExtragradientState state{project(problem.domain(), start), {}, 0};
  const double start_sq = state.z.x.squaredNorm() + state.z.y.squaredNorm();
  const double tol_sq = stop.residual_tol * stop.residual_tol;

  ExtragradientResult result;
  result.residual_sq = std::numeric_limits<double>::infinity();
  while (state.iteration < stop.max_iterations) {
    const double r = extragradient_step(state, problem, gossip, lambda, gamma);
    check_divergence(state.z, problem.domain(), start_sq, "extragradient");
    result.residual_sq = r;
    if (stop.residual_tol > 0.0 && r <= tol_sq) {
      result.converged = true;
      break;
    }
  }
  if (stop.residual_tol <= 0.0) result.converged = true;
  result.z = std::move(state.z);
  result.counters = state.counters;
  result.iterations = state.iteration;
  return result;
}

}  // namespace pfsaddle
