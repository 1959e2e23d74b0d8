#pragma once

#include <functional>
#include <memory>
#include <utility>

#include "spsolve/linalg.hpp"
#include "spsolve/rng.hpp"

namespace spsolve {

/// First-order oracle call counts for one solver run. A ledger belongs to
/// exactly one run and is only mutated through the counting wrappers below.
struct OracleLedger {
  long long grad_f = 0;
  long long grad_g = 0;
  long long matvec_B = 0;
  long long matvec_Bt = 0;
};

/// Abstract per-call costs of the three oracle types.
struct CostModel {
  double tau_f = 1.0;
  double tau_g = 1.0;
  double tau_B = 1.0;
};

inline double execution_time(const OracleLedger& ledger, const CostModel& m) {
  return m.tau_f * static_cast<double>(ledger.grad_f) +
         m.tau_g * static_cast<double>(ledger.grad_g) +
         m.tau_B * static_cast<double>(ledger.matvec_B + ledger.matvec_Bt);
}

/// Smooth convex function given by value/gradient evaluation plus declared
/// smoothness L and strong convexity mu (mu <= L).
struct SmoothFn {
  int dim = 0;
  double L = 0.0;
  double mu = 0.0;
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
};

inline SmoothFn zero_fn(int dim) {
  SmoothFn h;
  h.dim = dim;
  h.L = 0.0;
  h.mu = 0.0;
  h.value = [](const Vec&) { return 0.0; };
  h.gradient = [dim](const Vec&) { return Vec(static_cast<std::size_t>(dim), 0.0); };
  return h;
}

/// value = 1/2 x^T H x + <c, x>
inline SmoothFn quadratic_fn(Mat H, Vec c, double L, double mu) {
  SmoothFn h;
  h.dim = H.rows;
  h.L = L;
  h.mu = mu;
  auto Hp = std::make_shared<const Mat>(std::move(H));
  auto cp = std::make_shared<const Vec>(std::move(c));
  h.value = [Hp, cp](const Vec& x) { return 0.5 * dot(x, matvec(*Hp, x)) + dot(*cp, x); };
  h.gradient = [Hp, cp](const Vec& x) { return add(matvec(*Hp, x), *cp); };
  return h;
}

/// Monotone operator with declared Lipschitz constant M in the P-geometry.
struct MonotoneOp {
  int dim = 0;
  double M = 0.0;
  std::function<Vec(const Vec&)> apply;
};

inline MonotoneOp zero_op(int dim) {
  MonotoneOp q;
  q.dim = dim;
  q.M = 0.0;
  q.apply = [dim](const Vec&) { return Vec(static_cast<std::size_t>(dim), 0.0); };
  return q;
}

/// Linear map with forward/adjoint evaluation and an optional dense form
/// (generators and file loaders always attach one).
struct LinearMap {
  int rows = 0;
  int cols = 0;
  std::function<Vec(const Vec&)> forward;
  std::function<Vec(const Vec&)> adjoint;
  std::shared_ptr<const Mat> dense;
};

inline LinearMap dense_map(Mat B) {
  LinearMap m;
  m.rows = B.rows;
  m.cols = B.cols;
  auto Bp = std::make_shared<const Mat>(std::move(B));
  m.forward = [Bp](const Vec& v) { return matvec(*Bp, v); };
  m.adjoint = [Bp](const Vec& w) { return matvec_t(*Bp, w); };
  m.dense = Bp;
  return m;
}

/// Gradient-counting wrapper; values pass through untouched.
inline SmoothFn with_counter(const SmoothFn& h, long long* grad_count) {
  SmoothFn out = h;
  out.gradient = [base = h.gradient, grad_count](const Vec& x) {
    ++*grad_count;
    return base(x);
  };
  return out;
}

/// Counting wrapper with a one-slot memo: a repeated query at the bitwise
/// identical point returns the stored value without a fresh evaluation.
/// The memo scope is one inner iteration by construction (any new point
/// evicts the slot), which is what lets the solver reuse Q_k at the same
/// iterate twice per iteration while being charged once.
inline MonotoneOp with_counter(const MonotoneOp& q, long long* count) {
  struct Memo {
    bool set = false;
    Vec point, value;
  };
  auto memo = std::make_shared<Memo>();
  MonotoneOp out = q;
  out.apply = [base = q.apply, count, memo](const Vec& z) {
    if (memo->set && memo->point == z) return memo->value;
    Vec v = base(z);
    if (count) ++*count;
    memo->set = true;
    memo->point = z;
    memo->value = v;
    return v;
  };
  return out;
}

inline MonotoneOp with_memo(const MonotoneOp& q) { return with_counter(q, nullptr); }

inline LinearMap with_counter(const LinearMap& m, long long* fwd_count, long long* adj_count) {
  LinearMap out = m;
  out.forward = [base = m.forward, fwd_count](const Vec& v) {
    ++*fwd_count;
    return base(v);
  };
  out.adjoint = [base = m.adjoint, adj_count](const Vec& w) {
    ++*adj_count;
    return base(w);
  };
  return out;
}

/// D_h(x, x0) = h(x) - h(x0) - <grad h(x0), x - x0>
inline double bregman(const SmoothFn& h, const Vec& x, const Vec& x0) {
  check_same_dim(x, x0, "bregman");
  if (x == x0) return 0.0;
  return h.value(x) - h.value(x0) - dot(h.gradient(x0), sub(x, x0));
}

// ---------------------------------------------------------------------------
// Sampled oracle validation (tests and the `validate` CLI subcommand).
// ---------------------------------------------------------------------------

/// Checks D_h >= mu/2 |x-x'|^2 and |D_h| <= L/2 |x-x'|^2 on random pairs.
inline bool check_smoothness_bounds(const SmoothFn& h, int pairs = 100, double tol = 1e-9,
                                    std::uint64_t seed = 42) {
  Rng rng(seed);
  for (int k = 0; k < pairs; ++k) {
    Vec x = rng.normal_vec(h.dim);
    Vec y = rng.normal_vec(h.dim);
    double d2 = norm2(sub(x, y));
    double D = bregman(h, x, y);
    if (D < 0.5 * h.mu * d2 - tol) return false;
    if (std::abs(D) > 0.5 * h.L * d2 + tol) return false;
  }
  return true;
}

/// <G(x) - G(x'), x - x'> >= -tol on random pairs.
inline bool check_monotonicity(const MonotoneOp& q, int pairs = 100, double tol = 1e-9,
                               std::uint64_t seed = 42) {
  Rng rng(seed);
  for (int k = 0; k < pairs; ++k) {
    Vec x = rng.normal_vec(q.dim);
    Vec y = rng.normal_vec(q.dim);
    if (dot(sub(q.apply(x), q.apply(y)), sub(x, y)) < -tol) return false;
  }
  return true;
}

/// <w, Bv> == <B^T w, v> on random probes.
inline bool check_adjoint_identity(const LinearMap& m, int probes = 20, double tol = 1e-9,
                                   std::uint64_t seed = 42) {
  Rng rng(seed);
  for (int k = 0; k < probes; ++k) {
    Vec v = rng.normal_vec(m.cols);
    Vec w = rng.normal_vec(m.rows);
    double lhs = dot(w, m.forward(v));
    double rhs = dot(m.adjoint(w), v);
    double sc = std::max({1.0, std::abs(lhs), std::abs(rhs)});
    if (std::abs(lhs - rhs) > tol * sc) return false;
  }
  return true;
}

/// Central finite differences against the declared gradient.
inline bool check_gradient_fd(const SmoothFn& h, int probes = 5, double rel_tol = 1e-6,
                              std::uint64_t seed = 42) {
  Rng rng(seed);
  const double step = 1e-5;
  for (int k = 0; k < probes; ++k) {
    Vec x = rng.normal_vec(h.dim);
    Vec g = h.gradient(x);
    for (int j = 0; j < h.dim; ++j) {
      Vec xp = x, xm = x;
      xp[static_cast<std::size_t>(j)] += step;
      xm[static_cast<std::size_t>(j)] -= step;
      double fd = (h.value(xp) - h.value(xm)) / (2.0 * step);
      double sc = std::max(1.0, std::abs(g[static_cast<std::size_t>(j)]));
      if (std::abs(fd - g[static_cast<std::size_t>(j)]) > rel_tol * sc) return false;
    }
  }
  return true;
}

}  // namespace spsolve
