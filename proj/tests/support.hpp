#pragma once

#include <utility>
#include <vector>

#include "spsolve/solver.hpp"
#include "spsolve/vi.hpp"

namespace spsolve::testing {

/// Largest eigenvalue of P^{-1/2} S P^{-1/2}: the P-geometry Lipschitz
/// constant of the gradient z -> S z + c.
inline double weighted_smoothness(const Mat& S, const DiagWeight& P) {
  Mat W = S;
  for (int i = 0; i < W.rows; ++i)
    for (int j = 0; j < W.cols; ++j)
      W(i, j) /= std::sqrt(P.d[static_cast<std::size_t>(i)] * P.d[static_cast<std::size_t>(j)]);
  return std::max(0.0, sym_eigs(W).front());
}

/// Largest singular value of P^{-1/2} A P^{-1/2}: the P-geometry Lipschitz
/// constant of the operator z -> A z.
inline double weighted_op_norm(const Mat& A, const DiagWeight& P) {
  Mat W = A;
  for (int i = 0; i < W.rows; ++i)
    for (int j = 0; j < W.cols; ++j)
      W(i, j) /= std::sqrt(P.d[static_cast<std::size_t>(i)] * P.d[static_cast<std::size_t>(j)]);
  return singular_values(W).front();
}

inline Mat random_psd(int d, Rng& rng, double scale) {
  Mat G(d, d);
  for (auto& v : G.a) v = rng.normal();
  Mat S = gram(G);
  for (auto& v : S.a) v *= scale / d;
  return S;
}

inline Mat random_skew(int d, Rng& rng, double scale) {
  Mat A(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      double v = scale * rng.normal();
      A(i, j) = v;
      A(j, i) = -v;
    }
  return A;
}

struct RandomVI {
  VIProblem vi;
  // Affine descriptions kept for reference computations.
  std::vector<Mat> hessians;
  std::vector<Vec> linears;
  std::vector<Mat> skews;
  std::vector<std::shared_ptr<long long>> grad_counts;
  std::vector<std::shared_ptr<long long>> op_counts;
};

/// Finite-sum VI with quadratic p_i and linear skew Q_i; components are
/// randomly degenerate on one side (p = 0 or Q = 0) but never both.
inline RandomVI make_random_vi(int n, int dim, Rng& rng, bool ball_set, bool counted = false) {
  RandomVI out;
  out.vi.dim = dim;
  out.vi.P.d = rng.uniform_vec(dim, 0.5, 2.0);
  if (ball_set) {
    Vec center = rng.normal_vec(dim);
    out.vi.set = ConstraintSet::ball(center, rng.uniform(0.5, 3.0));
  } else {
    out.vi.set = ConstraintSet::full_space();
  }
  for (int i = 0; i < n; ++i) {
    VIComponent comp;
    int shape = rng.uniform_int(0, 2);  // 0: p only, 1: Q only, 2: both
    Mat H(dim, dim);
    Vec c(static_cast<std::size_t>(dim), 0.0);
    Mat A(dim, dim);
    if (shape != 1) {
      H = random_psd(dim, rng, rng.uniform(0.5, 4.0));
      c = rng.normal_vec(dim);
      comp.L = weighted_smoothness(H, out.vi.P);
      comp.p = quadratic_fn(H, c, comp.L, 0.0);
      comp.p.dim = dim;
    } else {
      comp.p = zero_fn(dim);
      comp.L = 0.0;
    }
    if (shape != 0) {
      A = random_skew(dim, rng, rng.uniform(0.5, 3.0));
      comp.M = weighted_op_norm(A, out.vi.P);
      auto Ap = std::make_shared<const Mat>(A);
      comp.Q.dim = dim;
      comp.Q.M = comp.M;
      comp.Q.apply = [Ap](const Vec& z) { return matvec(*Ap, z); };
    } else {
      comp.Q = zero_op(dim);
      comp.M = 0.0;
    }
    out.hessians.push_back(H);
    out.linears.push_back(c);
    out.skews.push_back(A);
    if (counted) {
      out.grad_counts.push_back(std::make_shared<long long>(0));
      out.op_counts.push_back(std::make_shared<long long>(0));
      comp.p = with_counter(comp.p, out.grad_counts.back().get());
      comp.Q = with_counter(comp.Q, out.op_counts.back().get());
    }
    out.vi.comps.push_back(std::move(comp));
  }
  return out;
}

/// z in the set with the same distribution the certificate tests probe.
inline Vec random_feasible(const ConstraintSet& set, const DiagWeight& P, int dim, Rng& rng) {
  if (set.kind == SetKind::FullSpace) return rng.normal_vec(dim);
  Vec dir = rng.normal_vec(dim);
  double nd = weighted_norm(dir, P);
  double r = set.radius * rng.uniform();
  Vec z = set.center;
  for (int i = 0; i < dim; ++i) z[static_cast<std::size_t>(i)] += r * dir[static_cast<std::size_t>(i)] / nd;
  return z;
}

/// Strong solution of an unconstrained affine VI: (sum H_i + sum A_i) z = -sum c_i.
inline Vec affine_vi_solution(const RandomVI& rvi) {
  int dim = rvi.vi.dim;
  Mat M(dim, dim);
  Vec rhs(static_cast<std::size_t>(dim), 0.0);
  for (std::size_t i = 0; i < rvi.hessians.size(); ++i) {
    for (int r = 0; r < dim; ++r)
      for (int cidx = 0; cidx < dim; ++cidx)
        M(r, cidx) += rvi.hessians[i](r, cidx) + rvi.skews[i](r, cidx);
    for (int r = 0; r < dim; ++r) rhs[static_cast<std::size_t>(r)] -= rvi.linears[i][static_cast<std::size_t>(r)];
  }
  return solve_linear(M, rhs);
}

}  // namespace spsolve::testing
