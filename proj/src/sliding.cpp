#include <string>

#include "pfsaddle/algorithms.hpp"
#include "pfsaddle/kernels.hpp"

namespace pfsaddle {

namespace {

void project_node(const BallDomain& d, Vector& x, Vector& y) {
  if (d.unbounded) return;
  kernels::project_row(d.center_x, d.radius_x, x.data());
  kernels::project_row(d.center_y, d.radius_y, y.data());
}

// (gamma grad_x f + u_x - v_x, -gamma grad_y f + u_y - v_y)
void prox_field(const SaddleProblem& problem, Eigen::Index node, const NodePoint& v, const Vector& ux,
                const Vector& uy, double gamma, Vector& gx, Vector& gy) {
  problem.node_gradient(node, ux, uy, gx, gy);
  gx = gamma * gx + ux - v.x;
  gy = uy - v.y - gamma * gy;
}

}  // namespace

NodePoint solve_prox(const SaddleProblem& problem, Eigen::Index node, const NodePoint& v, const NodePoint& start,
                     double gamma, int inner_T) {
  if (inner_T < 1) fail(ErrorKind::invalid_argument, "inner_T must be >= 1");
  if (!(gamma > 0.0)) fail(ErrorKind::invalid_argument, "solve_prox: gamma must be > 0");
  if (node < 0 || node >= problem.num_nodes()) fail(ErrorKind::invalid_argument, "solve_prox: node out of range");
  if (v.x.size() != problem.dim_x() || v.y.size() != problem.dim_y() || start.x.size() != problem.dim_x() ||
      start.y.size() != problem.dim_y())
    fail(ErrorKind::shape, "solve_prox: vector sizes do not match the problem");

  const BallDomain& d = problem.domain();
  const double eta = 1.0 / (2.0 * (1.0 + gamma * problem.smoothness()));
  Vector ux = start.x;
  Vector uy = start.y;
  Vector hx(ux.size()), hy(uy.size()), gx(ux.size()), gy(uy.size());
  for (int t = 0; t < inner_T; ++t) {
    prox_field(problem, node, v, ux, uy, gamma, gx, gy);
    hx = ux - eta * gx;
    hy = uy - eta * gy;
    project_node(d, hx, hy);
    prox_field(problem, node, v, hx, hy, gamma, gx, gy);
    ux -= eta * gx;
    uy -= eta * gy;
    project_node(d, ux, uy);
  }
  return {std::move(ux), std::move(uy)};
}

StackedPoint SlidingState::output(const SlidingConfig& config) const {
  if (!config.average_output || averaged == 0) return z;
  return (1.0 / static_cast<double>(averaged)) * anchor_sum;
}

SlidingState sliding_init(const SaddleProblem& problem, const StackedPoint& start) {
  problem.check_point(start, "sliding");
  SlidingState s;
  s.z = project(problem.domain(), start);
  s.anchor_sum = StackedPoint::zeros(problem.num_nodes(), problem.dim_x(), problem.dim_y());
  return s;
}

void sliding_outer_step(SlidingState& state, const SaddleProblem& problem, const GossipMatrix& gossip,
                        const SlidingConfig& config) {
  if (!(config.gamma > 0.0)) fail(ErrorKind::invalid_argument, "sliding: gamma must be > 0");
  if (config.inner_T < 1) fail(ErrorKind::invalid_argument, "sliding: inner_T must be >= 1");
  const double gl = config.gamma * config.lambda;
  const Eigen::Index M = problem.num_nodes();
  const Eigen::Index nx = problem.dim_x();
  const Eigen::Index ny = problem.dim_y();

  // one exchange of (X, Y); the products are reused in the correction
  const Matrix wx = gossip.apply(state.z.x);
  const Matrix wy = gossip.apply(state.z.y);
  const Matrix vx = state.z.x - gl * wx;
  const Matrix vy = state.z.y - gl * wy;

  // M independent local prox problems
  StackedPoint u = StackedPoint::zeros(M, nx, ny);
  kernels::for_each_row(M, 4 * config.inner_T * (nx + ny) * (nx + ny), [&](Eigen::Index m) {
    const NodePoint v{vx.row(m).transpose(), vy.row(m).transpose()};
    const NodePoint start{state.z.x.row(m).transpose(), state.z.y.row(m).transpose()};
    const NodePoint um = solve_prox(problem, m, v, start, config.gamma, config.inner_T);
    u.x.row(m) = um.x.transpose();
    u.y.row(m) = um.y.transpose();
  });

  // exchange U, correct and project
  const Matrix wux = gossip.apply(u.x);
  const Matrix wuy = gossip.apply(u.y);
  state.z.x = u.x + gl * (wx - wux);
  state.z.y = u.y + gl * (wy - wuy);
  check_divergence(state.z, problem.domain(), 1.0, "sliding");
  project_in_place(problem.domain(), state.z);

  state.anchor_sum += u;
  ++state.averaged;
  state.counters.comm_rounds += 2;
  state.counters.local_grad_batches += 2 * static_cast<std::int64_t>(config.inner_T);
  ++state.k;
}

}  // namespace pfsaddle
