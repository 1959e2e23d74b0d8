#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "spsolve/oracle.hpp"

namespace spsolve {

/// Parameter vector pi = (L_x, L_y, L_xy, mu_x, mu_y, mu_xy, mu_yx) of a
/// bilinearly coupled saddle problem min_x max_y f(x) + <y, Bx> - g(y).
struct ProblemParams {
  double L_x = 0.0;
  double L_y = 0.0;
  double L_xy = 0.0;
  double mu_x = 0.0;
  double mu_y = 0.0;
  double mu_xy = 0.0;
  double mu_yx = 0.0;

  void validate() const {
    if (!(L_x > mu_x && mu_x >= 0.0)) throw AssumptionViolation("params: need L_x > mu_x >= 0");
    if (!(L_y > mu_y && mu_y >= 0.0)) throw AssumptionViolation("params: need L_y > mu_y >= 0");
    if (!(L_xy > mu_xy && mu_xy >= 0.0) || !(L_xy > mu_yx && mu_yx >= 0.0))
      throw AssumptionViolation("params: need L_xy > mu_xy, mu_yx >= 0");
    if (mu_xy > 0.0 && mu_yx > 0.0 && mu_xy != mu_yx)
      throw AssumptionViolation("params: mu_xy and mu_yx must agree when both positive");
  }
};

struct ConditionNumbers {
  double delta_x = 0.0;
  double delta_y = 0.0;
  double kappa_x = 0.0;
  double kappa_y = 0.0;
  double kappa_xy = 0.0;
};

/// delta_x = mu_x + mu_xy^2/L_y, delta_y = mu_y + mu_yx^2/L_x,
/// kappa_x = L_x/delta_x, kappa_y = L_y/delta_y, kappa_xy = L_xy^2/(dx*dy).
/// Throws DegenerateProblem when min{delta_x, delta_y} = 0 (no linear rate).
inline ConditionNumbers condition_numbers(const ProblemParams& p) {
  p.validate();
  ConditionNumbers c;
  c.delta_x = p.mu_x + p.mu_xy * p.mu_xy / p.L_y;
  c.delta_y = p.mu_y + p.mu_yx * p.mu_yx / p.L_x;
  if (!(c.delta_x > 0.0 && c.delta_y > 0.0))
    throw DegenerateProblem("condition_numbers: min{delta_x, delta_y} = 0, linear convergence impossible");
  c.kappa_x = p.L_x / c.delta_x;
  c.kappa_y = p.L_y / c.delta_y;
  c.kappa_xy = p.L_xy * p.L_xy / (c.delta_x * c.delta_y);
  return c;
}

struct MarginReport {
  bool ok = true;
  std::vector<std::string> violations;
};

/// Margin conditions that keep the condition numbers away from degenerate
/// corner cases: L_x > 4 mu_x, L_y > 4 mu_y, L_xy > 18 max{mu_xy, mu_yx,
/// sqrt(mu_x mu_y)}, sqrt(L_x L_y) > 4 max{mu_xy, mu_yx}. Boundary equality
/// counts as a violation.
inline MarginReport check_margins(const ProblemParams& p) {
  MarginReport r;
  auto fail = [&r](const std::string& s) {
    r.ok = false;
    r.violations.push_back(s);
  };
  if (!(p.L_x > 4.0 * p.mu_x)) fail("L_x > 4*mu_x");
  if (!(p.L_y > 4.0 * p.mu_y)) fail("L_y > 4*mu_y");
  double m = std::max({p.mu_xy, p.mu_yx, std::sqrt(p.mu_x * p.mu_y)});
  if (!(p.L_xy > 18.0 * m)) fail("L_xy > 18*max{mu_xy, mu_yx, sqrt(mu_x*mu_y)}");
  if (!(std::sqrt(p.L_x * p.L_y) > 4.0 * std::max(p.mu_xy, p.mu_yx)))
    fail("sqrt(L_x*L_y) > 4*max{mu_xy, mu_yx}");
  return r;
}

struct SaddlePointProblem {
  SmoothFn f;   // on R^{d_x}
  SmoothFn g;   // on R^{d_y}
  LinearMap B;  // R^{d_x} -> R^{d_y}
  ProblemParams params;

  int dx() const { return f.dim; }
  int dy() const { return g.dim; }

  void validate() const {
    params.validate();
    if (B.cols != dx() || B.rows != dy())
      throw DimensionMismatch("SaddlePointProblem: B shape does not match f, g");
  }
};

/// sqrt(|grad f(x) + B^T y|^2 + |grad g(y) - B x|^2)
inline double kkt_residual(const SaddlePointProblem& pb, const Vec& x, const Vec& y) {
  Vec rx = add(pb.f.gradient(x), pb.B.adjoint(y));
  Vec ry = sub(pb.g.gradient(y), pb.B.forward(x));
  return std::sqrt(norm2(rx) + norm2(ry));
}

/// One particular solution plus orthonormal bases of the affine directions
/// along which the solution set extends (empty when mu > 0 on that side).
struct SolutionSet {
  Vec x_star, y_star;
  std::vector<Vec> x_kernel, y_kernel;
};

namespace detail {

/// Recovers (H, c) with grad = H x + c, verifying gradient affinity with
/// three midpoint collinearity probes first.
inline std::pair<Mat, Vec> probe_quadratic(const SmoothFn& h) {
  Rng rng(42);
  for (int probe = 0; probe < 3; ++probe) {
    Vec a = rng.normal_vec(h.dim);
    Vec b = rng.normal_vec(h.dim);
    Vec mid = lincomb(0.5, a, 0.5, b);
    Vec gm = h.gradient(mid);
    Vec avg = lincomb(0.5, h.gradient(a), 0.5, h.gradient(b));
    double sc = std::max({1.0, norm(gm), norm(avg)});
    if (norm(sub(gm, avg)) > 1e-8 * sc)
      throw NonQuadratic("probe_quadratic: gradient is not affine");
  }
  Vec c = h.gradient(Vec(static_cast<std::size_t>(h.dim), 0.0));
  Mat H(h.dim, h.dim);
  for (int j = 0; j < h.dim; ++j) {
    Vec e(static_cast<std::size_t>(h.dim), 0.0);
    e[static_cast<std::size_t>(j)] = 1.0;
    Vec col = sub(h.gradient(e), c);
    for (int i = 0; i < h.dim; ++i) H(i, j) = col[static_cast<std::size_t>(i)];
  }
  return {std::move(H), std::move(c)};
}

}  // namespace detail

/// Exact solution of a quadratic instance via the stacked first-order
/// optimality system
///   [ H_f   B^T ] (x)   (-c_f)
///   [ -B    H_g ] (y) = (-c_g).
/// When mu_x = 0 (resp. mu_y = 0) the system can be singular along ker B
/// (resp. ker B^T); adding the kernel projectors pins those components to
/// zero, which is exactly the minimum-norm representative of the affine
/// solution set. Requires a dense B.
inline SolutionSet solve_quadratic_exact(const SaddlePointProblem& pb) {
  pb.validate();
  condition_numbers(pb.params);  // rejects degenerate parameter sets
  if (!pb.B.dense) throw InvalidInstance("solve_quadratic_exact: dense B required");
  auto [Hf, cf] = detail::probe_quadratic(pb.f);
  auto [Hg, cg] = detail::probe_quadratic(pb.g);
  const Mat& B = *pb.B.dense;
  const int dx = pb.dx(), dy = pb.dy();

  SolutionSet sol;
  if (pb.params.mu_x <= 0.0) sol.x_kernel = kernel_basis(B);
  if (pb.params.mu_y <= 0.0) sol.y_kernel = kernel_basis(B.transposed());

  Mat M(dx + dy, dx + dy);
  for (int i = 0; i < dx; ++i)
    for (int j = 0; j < dx; ++j) M(i, j) = Hf(i, j);
  for (int i = 0; i < dy; ++i)
    for (int j = 0; j < dy; ++j) M(dx + i, dx + j) = Hg(i, j);
  for (int i = 0; i < dy; ++i)
    for (int j = 0; j < dx; ++j) {
      M(j, dx + i) = B(i, j);   // B^T block
      M(dx + i, j) = -B(i, j);  // -B block
    }
  for (const Vec& v : sol.x_kernel)
    for (int i = 0; i < dx; ++i)
      for (int j = 0; j < dx; ++j)
        M(i, j) += v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(j)];
  for (const Vec& v : sol.y_kernel)
    for (int i = 0; i < dy; ++i)
      for (int j = 0; j < dy; ++j)
        M(dx + i, dx + j) += v[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(j)];

  Vec rhs(static_cast<std::size_t>(dx + dy));
  for (int i = 0; i < dx; ++i) rhs[static_cast<std::size_t>(i)] = -cf[static_cast<std::size_t>(i)];
  for (int i = 0; i < dy; ++i) rhs[static_cast<std::size_t>(dx + i)] = -cg[static_cast<std::size_t>(i)];

  Vec z = solve_linear(M, rhs);
  sol.x_star.assign(z.begin(), z.begin() + dx);
  sol.y_star.assign(z.begin() + dx, z.end());
  return sol;
}

/// Weighted squared distance to the solution set:
/// delta_x * dist^2(x; S_x) + delta_y * dist^2(y; S_y).
inline double solution_distance2(const SaddlePointProblem& pb, const SolutionSet& sol,
                                 const Vec& x, const Vec& y) {
  ConditionNumbers c = condition_numbers(pb.params);
  return c.delta_x * dist2_to_affine(x, sol.x_star, sol.x_kernel) +
         c.delta_y * dist2_to_affine(y, sol.y_star, sol.y_kernel);
}

}  // namespace spsolve
