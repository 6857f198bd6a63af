// Serial vs OpenMP timings for the per-node kernels.
//
//   pfsaddle_bench [--nodes M] [--dim n] [--reps R]

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <string>

#include "pfsaddle/algorithms.hpp"
#include "pfsaddle/gossip.hpp"
#include "pfsaddle/kernels.hpp"
#include "pfsaddle/problems.hpp"
#include "pfsaddle/rng.hpp"

using namespace pfsaddle;

namespace {

double seconds(const std::function<void()>& fn, int reps) {
  fn();  // warm-up
  const auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < reps; ++r) fn();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count() / reps;
}

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  Xoshiro256 rng(seed);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = 3.0 * rng.normal();
  return m;
}

void report(const char* name, double serial, double parallel) {
  std::printf("%-22s serial %10.3f us   omp %10.3f us   speedup %5.2fx\n", name, 1e6 * serial, 1e6 * parallel,
              serial / parallel);
}

}  // namespace

int main(int argc, char** argv) {
  int nodes = 1024;
  int dim = 32;
  int reps = 50;
  for (int i = 1; i + 1 < argc; i += 2) {
    if (!std::strcmp(argv[i], "--nodes")) nodes = std::atoi(argv[i + 1]);
    else if (!std::strcmp(argv[i], "--dim")) dim = std::atoi(argv[i + 1]);
    else if (!std::strcmp(argv[i], "--reps")) reps = std::atoi(argv[i + 1]);
    else {
      std::fprintf(stderr, "unknown flag %s\n", argv[i]);
      return 1;
    }
  }
  std::printf("M = %d, n = %d, reps = %d, omp threads = %d\n", nodes, dim, reps, omp_get_max_threads());

  const GossipMatrix w = laplacian(Topology{TopologyKind::grid2d, nodes});
  const Matrix x = random_matrix(nodes, dim, 1);
  Matrix out;
  report("gossip_product", seconds([&] { kernels::serial::gossip_product(w.sparse(), x, 0.5, out); }, reps),
         seconds([&] { kernels::gossip_product(w.sparse(), x, 0.5, out); }, reps));

  const Vector center = Vector::Zero(dim);
  Matrix scratch;
  report("project_rows",
         seconds([&] { scratch = x; kernels::serial::project_rows(center, 1.0, scratch); }, reps),
         seconds([&] { scratch = x; kernels::project_rows(center, 1.0, scratch); }, reps));

  QuadraticGenParams gen;
  gen.num_nodes = nodes;
  gen.dim_x = dim;
  gen.dim_y = dim;
  const auto problem = make_quadratic(gen);
  const StackedPoint p(random_matrix(nodes, dim, 2), random_matrix(nodes, dim, 3));
  StackedPoint g = p;
  auto serial_grad = [&] {
    kernels::serial::for_each_row(nodes, 0, [&](Eigen::Index m) {
      Eigen::Map<const Vector> xm(p.x.row(m).data(), dim), ym(p.y.row(m).data(), dim);
      Eigen::Map<Vector> gx(g.x.row(m).data(), dim), gy(g.y.row(m).data(), dim);
      problem->node_gradient(m, xm, ym, gx, gy);
    });
  };
  report("grad_f batch", seconds(serial_grad, reps), seconds([&] { problem->grad_f(p, g); }, reps));

  SlidingConfig sc{0.05, 1.0, 10, false};
  SlidingState st = sliding_init(*problem, p);
  const int outer_reps = std::max(1, reps / 10);
  omp_set_num_threads(1);
  const double one = seconds([&] { sliding_outer_step(st, *problem, w, sc); }, outer_reps);
  omp_set_num_threads(omp_get_num_procs());
  const double many = seconds([&] { sliding_outer_step(st, *problem, w, sc); }, outer_reps);
  report("sliding step (T=10)", one, many);
  return 0;
}
