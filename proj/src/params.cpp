#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pfsaddle/algorithms.hpp"

namespace pfsaddle {

std::string_view to_string(ProblemCase c) { return c == ProblemCase::scsc ? "scsc" : "cc"; }

ProblemCase parse_problem_case(std::string_view name) {
  if (name == "scsc") return ProblemCase::scsc;
  if (name == "cc") return ProblemCase::cc;
  fail(ErrorKind::config, "unknown problem case '" + std::string(name) + "' (scsc | cc)");
}

std::string_view to_string(SlidingVariant v) { return v == SlidingVariant::conservative ? "conservative" : "aggressive"; }

SlidingVariant parse_sliding_variant(std::string_view name) {
  if (name == "conservative") return SlidingVariant::conservative;
  if (name == "aggressive") return SlidingVariant::aggressive;
  fail(ErrorKind::config, "unknown sliding variant '" + std::string(name) + "' (conservative | aggressive)");
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v)) fail(ErrorKind::config, std::string(name) + " must be positive and finite");
}

int inner_iterations(double gamma, double L, double delta) {
  const double t = std::ceil((1.0 + gamma * L) * std::log(1.0 / delta));
  return static_cast<int>(std::max(1.0, t));
}

}  // namespace

SlidingParams params_sliding(ProblemCase problem_case, double L, double mu, double lambda, double lambda_max,
                             double epsilon, double omega, SlidingVariant variant) {
  require_positive(L, "L");
  if (!(lambda >= 0.0) || !(lambda_max >= 0.0) || !std::isfinite(lambda * lambda_max))
    fail(ErrorKind::config, "lambda and lambda_max must be finite and >= 0");
  const double ll = lambda * lambda_max;
  SlidingParams out;

  if (problem_case == ProblemCase::scsc) {
    require_positive(mu, "mu (scsc case)");
    if (variant == SlidingVariant::conservative) {
      out.gamma = std::min(1.0 / (12.0 * mu), ll > 0.0 ? 1.0 / (4.0 * ll) : kInf);
      const double g = out.gamma;
      out.delta = 1.0 / (2.0 * (2.0 + 4.0 * g * ll / mu + 4.0 / (g * mu) + 4.0 * g * g * ll));
    } else {
      out.gamma = std::min(1.0 / (6.0 * mu), ll > 0.0 ? 1.0 / (2.0 * ll) : kInf);
      const double g = out.gamma;
      out.delta = std::min(0.25, 1.0 / (64.0 / (g * mu) + 64.0 * g * L * L / mu));
    }
  } else {
    if (!(ll > 0.0)) fail(ErrorKind::config, "cc step 1/(2 lambda lambda_max) needs lambda lambda_max > 0");
    require_positive(epsilon, "epsilon");
    require_positive(omega, "Omega");
    out.gamma = 1.0 / (2.0 * ll);
    const double g = out.gamma;
    const double accuracy = epsilon * epsilon * g * g / ((1.0 + g * L) * (1.0 + g * L) * omega * omega);
    out.delta = std::min({0.25, 1.0 / (16.0 * (1.0 + g * g * L * L)), accuracy});
  }
  out.inner_T = inner_iterations(out.gamma, L, out.delta);
  return out;
}

long sliding_iteration_bound(double gamma, double mu, double d0, double epsilon) {
  require_positive(gamma, "gamma");
  require_positive(mu, "mu");
  require_positive(epsilon, "epsilon");
  if (d0 <= epsilon) return 0;
  return static_cast<long>(std::ceil(std::log(d0 / epsilon) / (gamma * mu)));
}

RlesParams params_rles(double L, double lambda, double lambda_max) {
  require_positive(L, "L");
  const double ll = lambda * lambda_max;
  if (!(ll > 0.0) || !std::isfinite(ll)) fail(ErrorKind::config, "rles parameters need lambda lambda_max > 0");
  RlesParams out;
  out.p = ll / (ll + L);
  out.gamma = std::sqrt(ll) / (2.0 * std::pow(ll + L, 1.5));
  out.L_eff = std::sqrt(L * L / (1.0 - out.p) + ll * ll / out.p);
  return out;
}

}  // namespace pfsaddle
