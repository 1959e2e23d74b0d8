#pragma once

#include <string>
#include <vector>

#include "spsolve/adapter.hpp"
#include "spsolve/saddle.hpp"
#include "spsolve/trace.hpp"

namespace spsolve {

enum class BaselineMethod { Extragradient, Gda };

struct BaselineConfig {
  BaselineMethod method = BaselineMethod::Extragradient;
  double step = 0.0;  // 0 selects the default 1/(2 Lambda)
  int max_iters = 10000;
  double stop_r2 = 0.0;

  void validate() const {
    if (step < 0.0) throw std::invalid_argument("BaselineConfig: step must be >= 0");
    if (max_iters < 0) throw std::invalid_argument("BaselineConfig: max_iters must be >= 0");
  }
};

/// Conservative global Lipschitz bound of the saddle operator.
inline double saddle_operator_bound(const ProblemParams& p) { return p.L_x + p.L_y + p.L_xy; }

struct BaselineResult {
  Vec x, y;
  std::vector<TraceRecord> trace;
  bool diverged = false;
  bool converged = false;
  int iterations = 0;
};

/// Reference solvers over the saddle operator G(x, y) = (grad f(x) + B^T y,
/// grad g(y) - B x): extragradient (half step at G(z), full step at
/// G(z_half)) and simultaneous gradient descent ascent. Divergence
/// (R^2 above 10x its initial value) is reported in the result, not thrown.
inline BaselineResult run_baseline(const SaddlePointProblem& pb, const BaselineConfig& cfg,
                                   OracleLedger& ledger, const CostModel& cost = {},
                                   const TraceSink& sink = {}) {
  pb.validate();
  cfg.validate();
  condition_numbers(pb.params);
  SolutionSet sol = solve_quadratic_exact(pb);

  const int dx = pb.dx(), dy = pb.dy();
  SmoothFn f = with_counter(pb.f, &ledger.grad_f);
  SmoothFn g = with_counter(pb.g, &ledger.grad_g);
  LinearMap B = with_counter(pb.B, &ledger.matvec_B, &ledger.matvec_Bt);
  auto G = [&](const Vec& x, const Vec& y) {
    return concat_xy(add(f.gradient(x), B.adjoint(y)), sub(g.gradient(y), B.forward(x)));
  };

  double step = cfg.step > 0.0 ? cfg.step : 1.0 / (2.0 * saddle_operator_bound(pb.params));

  Vec x(static_cast<std::size_t>(dx), 0.0), y(static_cast<std::size_t>(dy), 0.0);
  BaselineResult res;
  double r2 = solution_distance2(pb, sol, x, y);
  double r2_initial = r2;
  for (int it = 0; it < cfg.max_iters; ++it) {
    Vec z = concat_xy(x, y);
    Vec znext;
    if (cfg.method == BaselineMethod::Extragradient) {
      Vec zh = sub(z, scale(G(x, y), step));
      Vec xh = x_part(zh, dx), yh = y_part(zh, dx);
      znext = sub(z, scale(G(xh, yh), step));
    } else {
      znext = sub(z, scale(G(x, y), step));
    }
    x = x_part(znext, dx);
    y = y_part(znext, dx);
    res.iterations = it + 1;

    r2 = solution_distance2(pb, sol, x, y);
    TraceRecord rec;
    rec.phase = it;
    rec.r2 = r2;
    stamp_counts(rec, ledger, cost);
    res.trace.push_back(rec);
    if (sink) sink(rec);

    if (r2 > 10.0 * r2_initial || !all_finite(znext)) {
      res.diverged = true;
      break;
    }
    if (cfg.stop_r2 > 0.0 && r2 <= cfg.stop_r2) {
      res.converged = true;
      break;
    }
  }
  res.x = x;
  res.y = y;
  return res;
}

}  // namespace spsolve
