#include <cmath>
#include <limits>

#include "doctest.h"
#include "oracles.hpp"
#include "pfsaddle/stacked.hpp"

using namespace pfsaddle;

TEST_CASE("frobenius_sq") {
  CHECK(frobenius_sq(Matrix::Zero(3, 5)) == 0.0);
  CHECK(frobenius_sq(Matrix::Zero(0, 2)) == 0.0);

  Matrix a(2, 2);
  a << 3, 4, 0, 0;
  CHECK(frobenius_sq(a) == 25.0);

  Xoshiro256 rng(11);
  for (int t = 0; t < 20; ++t) {
    const Matrix r = oracle::random_matrix(rng, 4, 3);
    CHECK(oracle::rel_close(frobenius_sq(r), oracle::sum_sq(r), 1e-14));
  }

  a(1, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(frobenius_sq(a), Error);
  a(1, 0) = std::numeric_limits<double>::infinity();
  try {
    frobenius_sq(a);
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::invalid_value);
  }
}

TEST_CASE("trace_inner") {
  Xoshiro256 rng(12);
  const Matrix a = oracle::random_matrix(rng, 5, 3);
  const Matrix b = oracle::random_matrix(rng, 5, 3);
  CHECK(oracle::rel_close(trace_inner(a, a), frobenius_sq(a), 1e-14));
  CHECK(oracle::rel_close(trace_inner(a, b), oracle::sum_prod(a, b), 1e-14));

  Matrix e1 = Matrix::Zero(3, 2), e2 = Matrix::Zero(3, 2);
  e1.col(0).setOnes();
  e2.col(1).setOnes();
  CHECK(trace_inner(e1, e2) == 0.0);

  try {
    trace_inner(a, Matrix::Zero(5, 4));
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::shape);
  }
  const StackedPoint p(a, b), q(b, a);
  CHECK(oracle::rel_close(trace_inner(p, q), 2 * oracle::sum_prod(a, b), 1e-14));
}

TEST_CASE("StackedPoint construction") {
  CHECK_THROWS_AS(StackedPoint(Matrix::Zero(2, 1), Matrix::Zero(3, 1)), Error);
  CHECK_THROWS_AS(StackedPoint(Matrix::Zero(0, 1), Matrix::Zero(0, 1)), Error);
  const StackedPoint r = StackedPoint::replicated(3, Vector::Constant(2, 1.5), Vector::Constant(1, -2));
  CHECK(r.num_nodes() == 3);
  CHECK(r.dim_x() == 2);
  CHECK(r.x(2, 1) == 1.5);
  CHECK(r.y(1, 0) == -2.0);
}

TEST_CASE("ball projection examples") {
  const BallDomain d = BallDomain::centered(2, 2, 1.0, 3.0);
  StackedPoint inside = StackedPoint::zeros(2, 2, 2);
  inside.x << 0.5, 0.1, -0.3, 0.2;
  inside.y << 1.0, 2.0, 0.0, -2.5;
  CHECK(project(d, inside) == inside);

  StackedPoint out = StackedPoint::zeros(1, 2, 2);
  out.x << 2, 0;
  const StackedPoint pr = project(d, out);
  CHECK(pr.x(0, 0) == 1.0);
  CHECK(pr.x(0, 1) == 0.0);
}

TEST_CASE("ball projection matches the scalar oracle") {
  Xoshiro256 rng(13);
  BallDomain d = BallDomain::centered(3, 2, 0.7, 1.3);
  d.center_x << 0.5, -1.0, 2.0;
  d.center_y << -0.25, 0.75;
  for (int t = 0; t < 50; ++t) {
    const StackedPoint p = oracle::random_point(rng, 6, 3, 2, 4.0);
    const StackedPoint q = project(d, p);
    const Matrix ox = oracle::ball_projection(p.x, d.center_x, d.radius_x);
    const Matrix oy = oracle::ball_projection(p.y, d.center_y, d.radius_y);
    CHECK((q.x - ox).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((q.y - oy).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(d.contains(q));
  }
}

TEST_CASE("projection properties") {
  Xoshiro256 rng(14);
  const BallDomain d = BallDomain::centered(3, 3, 1.0, 2.0);
  for (int t = 0; t < 1000; ++t) {
    const StackedPoint p = oracle::random_point(rng, 3, 3, 3, 2.0);
    const StackedPoint q = oracle::random_point(rng, 3, 3, 3, 2.0);
    const StackedPoint pp = project(d, p), pq = project(d, q);
    CHECK(frobenius_sq(pp - pq) <= frobenius_sq(p - q) * (1 + 1e-14));
    CHECK(project(d, pp) == pp);
    CHECK(frobenius_sq(p + q) <= 2 * frobenius_sq(p) + 2 * frobenius_sq(q));
  }
}

TEST_CASE("projection onto a degenerate and an unbounded domain") {
  const BallDomain point = BallDomain::centered(2, 1, 0.0, 0.0);
  Xoshiro256 rng(15);
  const StackedPoint p = oracle::random_point(rng, 2, 2, 1);
  const StackedPoint q = project(point, p);
  CHECK(q.x.cwiseAbs().maxCoeff() == 0.0);
  CHECK(q.y.cwiseAbs().maxCoeff() == 0.0);

  const BallDomain all = BallDomain::whole_space(2, 1);
  CHECK(project(all, p) == p);
  CHECK(std::isinf(all.diameter()));
}

TEST_CASE("BallDomain diameter and validation") {
  const BallDomain d = BallDomain::centered(1, 1, 3.0, 4.0);
  CHECK(d.diameter() == doctest::Approx(10.0).epsilon(1e-15));
  BallDomain bad = d;
  bad.radius_x = -1.0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("project rejects non-finite input") {
  const BallDomain d = BallDomain::centered(1, 1, 1.0, 1.0);
  StackedPoint p = StackedPoint::zeros(1, 1, 1);
  p.x(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(project(d, p), Error);
}
