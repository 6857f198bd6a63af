#include <omp.h>

#include <cmath>
#include <cstring>
#include <limits>

#include "doctest.h"
#include "oracles.hpp"
#include "pfsaddle/algorithms.hpp"
#include "pfsaddle/kernels.hpp"

using namespace pfsaddle;

namespace {

struct Threads {
  explicit Threads(int n) : saved(omp_get_max_threads()) { omp_set_num_threads(n); }
  ~Threads() { omp_set_num_threads(saved); }
  int saved;
};

}  // namespace

TEST_CASE("parallel kernels are bitwise equal to the serial ones") {
  Threads guard(4);
  Xoshiro256 rng(81);
  for (int nodes : {7, 900, 4096}) {
    const GossipMatrix w = laplacian(Topology{TopologyKind::grid2d, nodes});
    const Matrix x = oracle::random_matrix(rng, nodes, 16, 2.0);
    Matrix a, b;
    kernels::gossip_product(w.sparse(), x, 0.37, a);
    kernels::serial::gossip_product(w.sparse(), x, 0.37, b);
    CHECK(std::memcmp(a.data(), b.data(), sizeof(double) * a.size()) == 0);
    CHECK((a - 0.37 * (w.dense() * x)).cwiseAbs().maxCoeff() <= 1e-12);

    const Vector c = Vector::LinSpaced(16, -1.0, 1.0);
    Matrix pa = x, pb = x;
    kernels::project_rows(c, 1.5, pa);
    kernels::serial::project_rows(c, 1.5, pb);
    CHECK(std::memcmp(pa.data(), pb.data(), sizeof(double) * pa.size()) == 0);
  }
}

TEST_CASE("sliding step is independent of the thread count") {
  QuadraticGenParams g;
  g.num_nodes = 1024;
  g.dim_x = 8;
  g.dim_y = 8;
  const auto q = make_quadratic(g);
  const GossipMatrix w = laplacian(Topology{TopologyKind::ring, 1024});
  Xoshiro256 rng(82);
  const StackedPoint start = oracle::random_feasible(rng, q->domain(), 1024);
  const SlidingConfig cfg{0.05, 0.5, 8, false};
  SlidingState one = sliding_init(*q, start), many = sliding_init(*q, start);
  {
    Threads guard(1);
    for (int k = 0; k < 3; ++k) sliding_outer_step(one, *q, w, cfg);
  }
  {
    Threads guard(4);
    for (int k = 0; k < 3; ++k) sliding_outer_step(many, *q, w, cfg);
  }
  CHECK(one.z == many.z);
  StackedPoint ga, gb = start;
  {
    Threads guard(4);
    ga = q->grad_f(start);
  }
  kernels::serial::for_each_row(1024, 0, [&](Eigen::Index m) {
    Vector gx(8), gy(8);
    q->node_gradient(m, start.x.row(m).transpose(), start.y.row(m).transpose(), gx, gy);
    gb.x.row(m) = gx.transpose();
    gb.y.row(m) = gy.transpose();
  });
  CHECK(ga == gb);
}

TEST_CASE("csr conversion") {
  Matrix d(3, 3);
  d << 2, -1, -1, -1, 1, 0, -1, 0, 1;
  const kernels::CsrMatrix c = kernels::CsrMatrix::from_dense(d);
  CHECK(c.nonzeros() == 7);
  CHECK(c.offsets == std::vector<Eigen::Index>{0, 3, 5, 7});
}

TEST_CASE("project_row leaves NaN rows to the finiteness checks") {
  const Vector c = Vector::Zero(2);
  double row[2] = {std::numeric_limits<double>::quiet_NaN(), 1.0};
  kernels::project_row(c, 1.0, row);
  CHECK(std::isnan(row[0]));
  double far[2] = {3.0, 4.0};
  kernels::project_row(c, 1.0, far);
  CHECK(kernels::row_distance(far, c) <= 1.0);
  CHECK(far[0] == doctest::Approx(0.6));
}
