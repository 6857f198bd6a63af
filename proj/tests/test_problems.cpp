#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "pfsaddle/metrics.hpp"
#include "pfsaddle/problems.hpp"

using namespace pfsaddle;

namespace {

QuadraticNode scalar_node(double p, double a, double q, double lx = 0.0, double ly = 0.0) {
  QuadraticNode n;
  n.P = Eigen::MatrixXd::Constant(1, 1, p);
  n.Q = Eigen::MatrixXd::Constant(1, 1, q);
  n.A = Eigen::MatrixXd::Constant(1, 1, a);
  n.a = Vector::Constant(1, lx);
  n.b = Vector::Constant(1, ly);
  return n;
}

GossipMatrix ring(int m) { return laplacian(Topology{TopologyKind::ring, m}); }

QuadraticGenParams gen(int m, std::uint64_t seed) {
  QuadraticGenParams g;
  g.num_nodes = m;
  g.dim_x = 3;
  g.dim_y = 2;
  g.mu = 0.5;
  g.L = 6.0;
  g.seed = seed;
  return g;
}

std::vector<ProblemPtr> families() {
  RobustGenParams r;
  r.num_nodes = 4;
  r.dim = 3;
  r.seed = 5;
  return {make_quadratic(gen(4, 3)), make_bilinear(gen(4, 4)), make_robust_regression(r)};
}

}  // namespace

TEST_CASE("grad_full trivial cases") {
  QuadraticNode zero = scalar_node(0, 0, 0);
  const QuadraticSaddle z({zero, zero}, BallDomain::centered(1, 1, 5, 5));
  const GossipMatrix g = laplacian(Topology{TopologyKind::path, 2});
  Xoshiro256 rng(31);
  const StackedPoint p = oracle::random_point(rng, 2, 1, 1);
  const StackedPoint out = grad_full(z, g, 0.0, p);
  CHECK(out.x.cwiseAbs().maxCoeff() == 0.0);
  CHECK(out.y.cwiseAbs().maxCoeff() == 0.0);

  // f = x y per node at x = 1, y = 2
  const QuadraticSaddle xy({scalar_node(0, 1, 0), scalar_node(0, 1, 0)}, BallDomain::centered(1, 1, 5, 5), "bilinear");
  const StackedPoint q = StackedPoint::replicated(2, Vector::Constant(1, 1.0), Vector::Constant(1, 2.0));
  const StackedPoint gq = grad_full(xy, g, 0.0, q);
  CHECK(gq.x(0, 0) == 2.0);
  CHECK(gq.x(1, 0) == 2.0);
  CHECK(gq.y(0, 0) == 1.0);
  CHECK(gq.y(1, 0) == 1.0);
}

TEST_CASE("grad_full matches finite differences on every family") {
  Xoshiro256 rng(32);
  const GossipMatrix g = ring(4);
  for (const auto& problem : families()) {
    CAPTURE(problem->family());
    for (int t = 0; t < 100; ++t) {
      const StackedPoint p = oracle::random_feasible(rng, problem->domain(), 4);
      const double lambda = rng.uniform() * 2.0;
      const StackedPoint got = grad_full(*problem, g, lambda, p);
      const StackedPoint fd = oracle::finite_difference_gradient(*problem, g, lambda, p);
      CHECK(oracle::rel_error(got, fd) <= 1e-6);
    }
  }
}

TEST_CASE("estimate_constants examples") {
  QuadraticNode id;
  id.P = Eigen::MatrixXd::Identity(2, 2);
  id.Q = Eigen::MatrixXd::Identity(2, 2);
  id.A = Eigen::MatrixXd::Zero(2, 2);
  id.a = Vector::Zero(2);
  id.b = Vector::Zero(2);
  const SaddleConstants c1 = estimate_constants({id, id});
  CHECK(c1.smoothness == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(c1.strong_convexity == doctest::Approx(1.0).epsilon(1e-14));

  const SaddleConstants c2 = estimate_constants({scalar_node(0, -3.5, 0)});
  CHECK(c2.smoothness == doctest::Approx(3.5).epsilon(1e-14));
  CHECK(c2.strong_convexity == 0.0);
}

TEST_CASE("quadratic L matches the block-norm oracle") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    QuadraticGenParams g = gen(3, seed);
    g.curvature_share = 0.1 * static_cast<double>(seed % 9);
    const auto q = make_quadratic(g);
    double L = 0.0, mu = 1e300;
    for (const auto& n : q->nodes()) {
      L = std::max(L, oracle::block_spectral_norm(n));
      mu = std::min({mu, oracle::dense_eigenvalues(n.P).minCoeff(), oracle::dense_eigenvalues(n.Q).minCoeff()});
    }
    CHECK(oracle::rel_close(q->smoothness(), L, 1e-8));
    CHECK(oracle::rel_close(q->strong_convexity(), mu, 1e-8));
    // the generator hits the requested constants
    CHECK(oracle::rel_close(q->smoothness(), g.L, 1e-10));
    CHECK(oracle::rel_close(q->strong_convexity(), g.mu, 1e-10));
  }
  const auto b = make_bilinear(gen(3, 2));
  CHECK(oracle::rel_close(b->smoothness(), 6.0, 1e-12));
  CHECK(b->strong_convexity() == 0.0);
}

TEST_CASE("smoothness and strong monotonicity spot checks") {
  Xoshiro256 rng(33);
  for (const auto& problem : families()) {
    CAPTURE(problem->family());
    const double L = problem->smoothness(), mu = problem->strong_convexity();
    for (int t = 0; t < 200; ++t) {
      const StackedPoint p = oracle::random_feasible(rng, problem->domain(), 4, 1.0);
      const StackedPoint q = oracle::random_feasible(rng, problem->domain(), 4, 1.0);
      const StackedPoint gp = problem->grad_f(p), gq = problem->grad_f(q);
      for (Eigen::Index m = 0; m < 4; ++m) {
        const double dz = (p.x.row(m) - q.x.row(m)).squaredNorm() + (p.y.row(m) - q.y.row(m)).squaredNorm();
        const double dg = (gp.x.row(m) - gq.x.row(m)).squaredNorm() + (gp.y.row(m) - gq.y.row(m)).squaredNorm();
        CHECK(dg <= L * L * dz * (1 + 1e-10));
        const double mono = (gp.x.row(m) - gq.x.row(m)).dot(p.x.row(m) - q.x.row(m)) -
                            (gp.y.row(m) - gq.y.row(m)).dot(p.y.row(m) - q.y.row(m));
        CHECK(mono >= mu * dz - 1e-10 * (1 + dz));
      }
    }
  }
}

TEST_CASE("full operator monotonicity includes the penalty") {
  Xoshiro256 rng(34);
  const GossipMatrix g = ring(4);
  for (const auto& problem : families()) {
    const double mu = problem->strong_convexity();
    for (int t = 0; t < 100; ++t) {
      const StackedPoint p = oracle::random_feasible(rng, problem->domain(), 4, 1.0);
      const StackedPoint q = oracle::random_feasible(rng, problem->domain(), 4, 1.0);
      const StackedPoint d = grad_full(*problem, g, 1.3, p) - grad_full(*problem, g, 1.3, q);
      const StackedPoint dz = p - q;
      const double mono = oracle::sum_prod(d.x, dz.x) - oracle::sum_prod(d.y, dz.y);
      CHECK(mono >= mu * frobenius_sq(dz) - 1e-10 * (1 + frobenius_sq(dz)));
    }
  }
}

TEST_CASE("grad_full is row-local when lambda = 0") {
  Xoshiro256 rng(35);
  const GossipMatrix g = ring(4);
  for (const auto& problem : families()) {
    const StackedPoint p = oracle::random_feasible(rng, problem->domain(), 4);
    StackedPoint q = p;
    q.x.row(1) *= 0.5;
    q.y.row(1).array() += 0.01;
    const StackedPoint a = grad_full(*problem, g, 0.0, p), b = grad_full(*problem, g, 0.0, q);
    for (int m : {0, 2, 3}) {
      CHECK((a.x.row(m).array() == b.x.row(m).array()).all());
      CHECK((a.y.row(m).array() == b.y.row(m).array()).all());
    }
  }
}

TEST_CASE("robust regression concavity margin is enforced") {
  RobustGenParams r;
  r.radius_x = 1.0;
  r.beta_y = 2.05;
  CHECK_THROWS_AS(make_robust_regression(r), Error);
  r.beta_y = 2.1;
  const auto ok = make_robust_regression(r);
  CHECK(ok->concavity_margin() == doctest::Approx(2.1 - 2.0));
}

TEST_CASE("quadratic constructor validation") {
  QuadraticNode asym;
  asym.P = Eigen::MatrixXd::Identity(2, 2);
  asym.P(0, 1) = 0.1;
  asym.Q = Eigen::MatrixXd::Identity(1, 1);
  asym.A = Eigen::MatrixXd::Zero(2, 1);
  asym.a = Vector::Zero(2);
  asym.b = Vector::Zero(1);
  CHECK_THROWS_AS(QuadraticSaddle({asym}, BallDomain::centered(2, 1, 1, 1)), Error);
  QuadraticNode neg = scalar_node(-1, 0, 1);
  CHECK_THROWS_AS(QuadraticSaddle({neg}, BallDomain::centered(1, 1, 1, 1)), Error);
}

TEST_CASE("reference solution: single node origin saddle") {
  const QuadraticSaddle s({scalar_node(1, 0, 1)}, BallDomain::centered(1, 1, 1, 1));
  // a one-node "graph" cannot be built from a topology; use the 1x1 zero matrix
  const GossipMatrix g = GossipMatrix::from_dense(Matrix::Zero(1, 1), {});
  const StackedPoint z = reference_solution(s, g, 0.0);
  CHECK(std::abs(z.x(0, 0)) <= 1e-12);
  CHECK(std::abs(z.y(0, 0)) <= 1e-12);
}

TEST_CASE("reference solution: two-node path closed form") {
  const double mu = 2.0, lambda = 0.75, c0 = 1.5, c1 = -0.5;
  // (mu/2)(x - c)^2 = (mu/2) x^2 - mu c x + const
  const QuadraticSaddle s({scalar_node(mu, 0, mu, -mu * c0), scalar_node(mu, 0, mu, -mu * c1)},
                          BallDomain::centered(1, 1, 10, 10));
  const GossipMatrix g = laplacian(Topology{TopologyKind::path, 2});
  Eigen::Matrix2d k = mu * Eigen::Matrix2d::Identity() + lambda * g.dense();
  const Eigen::Vector2d x = k.lu().solve(Eigen::Vector2d(mu * c0, mu * c1));
  const StackedPoint z = reference_solution(s, g, lambda);
  CHECK(std::abs(z.x(0, 0) - x[0]) <= 1e-10);
  CHECK(std::abs(z.x(1, 0) - x[1]) <= 1e-10);
  CHECK(std::abs(z.y(0, 0)) <= 1e-10);
}

TEST_CASE("reference solution agrees with the block linear system") {
  for (std::uint64_t seed = 1; seed <= 4; ++seed) {
    const auto q = make_quadratic(gen(4, seed));
    const GossipMatrix g = ring(4);
    const ReferenceReport r = reference_solution_report(*q, g, 0.8, 1e-12);
    CHECK(r.residual_sq <= 1e-24);
    REQUIRE(r.linear_check_dist_sq.has_value());
    CHECK(*r.linear_check_dist_sq <= 1e-16);

    // independent dense solve of grad F = 0
    const auto direct = linear_system_solution(*q, g, 0.8);
    REQUIRE(direct.has_value());
    const StackedPoint res = grad_full(*q, g, 0.8, *direct);
    CHECK(std::sqrt(frobenius_sq(res)) <= 1e-10);
    CHECK(std::sqrt(distance_sq(r.solution, *direct)) <= 1e-8);
  }
}

TEST_CASE("reference at lambda = 0 decouples into per-node saddles") {
  const auto q = make_quadratic(gen(4, 7));
  const GossipMatrix g = ring(4);
  const double tol = 1e-12;
  const StackedPoint z = reference_solution(*q, g, 0.0, tol);
  StackedPoint per = z;
  for (Eigen::Index m = 0; m < 4; ++m) {
    const auto [x, y] = oracle::node_saddle(q->nodes()[static_cast<std::size_t>(m)]);
    per.x.row(m) = x.transpose();
    per.y.row(m) = y.transpose();
  }
  REQUIRE(q->domain().contains(per));
  // residual tol on an extragradient step of size 1/(2L) bounds the distance by tol * 2L / mu
  CHECK(std::sqrt(distance_sq(z, per)) <= tol * 2 * q->smoothness() / q->strong_convexity());
}

TEST_CASE("reference solution on a compact bilinear problem") {
  const auto b = make_bilinear(gen(4, 9));
  const GossipMatrix g = ring(4);
  const ReferenceReport r = reference_solution_report(*b, g, 1.0, 1e-10);
  CHECK(r.residual_sq <= 1e-20);
  CHECK(b->domain().contains(r.solution));
}

TEST_CASE("reference solution preconditions") {
  QuadraticNode n = scalar_node(0, 1, 0);
  const QuadraticSaddle s({n}, BallDomain::whole_space(1, 1));
  const GossipMatrix g = GossipMatrix::from_dense(Matrix::Zero(1, 1), {});
  CHECK_THROWS_AS(reference_solution(s, g, 0.0), Error);
  const auto q = make_quadratic(gen(4, 1));
  CHECK_THROWS_AS(reference_solution(*q, ring(4), 0.0, 0.0), Error);
}
