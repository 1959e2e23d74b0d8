#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <utility>
#include <vector>

#include "spsolve/vi.hpp"

namespace spsolve {

/// Momentum coefficients alpha_0 = 1,
/// alpha_{t+1} = 2 / (1 + sqrt(1 + 4/alpha_t^2)), memoized.
/// They satisfy alpha_t in (0,1], 1/alpha_t^2 = 1/alpha_{t-1}^2 + 1/alpha_t
/// and alpha_{T-1} <= 2/(T+1).
class AlphaSequence {
 public:
  double operator()(int t) const {
    if (t < 0) throw std::invalid_argument("alpha: t must be >= 0");
    while (static_cast<int>(vals_.size()) <= t) {
      double a = vals_.back();
      vals_.push_back(2.0 / (1.0 + std::sqrt(1.0 + 4.0 / (a * a))));
    }
    return vals_[static_cast<std::size_t>(t)];
  }

 private:
  mutable std::vector<double> vals_{1.0};
};

/// Inner iteration counts T_1..T_n for one solver pass, valid for components
/// listed in ascending order of m_i = max{sqrt(L_i/eps), M_i/eps, 1}.
/// `order[k]` is the original index of the component run at position k.
struct Schedule {
  std::vector<int> T;
  double eps = 0.0;
  std::vector<int> order;
};

inline double schedule_weight(double L, double M, double eps) {
  return std::max({std::sqrt(L / eps), M / eps, 1.0});
}

/// T_1 = ceil(2 m_(1)), T_{k+1} = ceil(2 m_(k+1) / m_(k)) over the ascending
/// ordering. This puts prod_{j<=i} T_j between 2^i m_(i) and 3^n m_(i), which
/// is exactly what the gap bound needs to hit eps * n * |z_in - z|_P^2.
inline Schedule make_schedule(const std::vector<std::pair<double, double>>& LM, double eps) {
  if (LM.empty() || static_cast<int>(LM.size()) > kMaxComponents)
    throw std::invalid_argument("make_schedule: need 1..8 components");
  if (!(eps > 0.0)) throw std::invalid_argument("make_schedule: eps must be positive");
  const int n = static_cast<int>(LM.size());
  std::vector<double> m(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const auto& [L, M] = LM[static_cast<std::size_t>(i)];
    if (!(L + M > 0.0)) throw std::invalid_argument("make_schedule: component with L + M = 0");
    m[static_cast<std::size_t>(i)] = schedule_weight(L, M, eps);
  }
  Schedule s;
  s.eps = eps;
  s.order.resize(static_cast<std::size_t>(n));
  std::iota(s.order.begin(), s.order.end(), 0);
  std::stable_sort(s.order.begin(), s.order.end(), [&](int a, int b) {
    return m[static_cast<std::size_t>(a)] < m[static_cast<std::size_t>(b)];
  });
  s.T.resize(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    double mk = m[static_cast<std::size_t>(s.order[static_cast<std::size_t>(k)])];
    double ratio = k == 0 ? mk : mk / m[static_cast<std::size_t>(s.order[static_cast<std::size_t>(k - 1)])];
    s.T[static_cast<std::size_t>(k)] = static_cast<int>(std::ceil(2.0 * ratio));
  }
  return s;
}

/// Components permuted into schedule order.
inline VIProblem reorder_components(const VIProblem& vi, const std::vector<int>& order) {
  VIProblem out = vi;
  out.comps.clear();
  for (int idx : order) out.comps.push_back(vi.comps[static_cast<std::size_t>(idx)]);
  return out;
}

/// (H/2) |z - center|_P^2 + <z, linear>
struct FrozenQuadratic {
  double H = 0.0;
  Vec center;
  Vec linear;
};

/// Affine change of variables applied to a base function:
/// value(z) = scale * p(coeff * z + offset),
/// grad(z)  = scale * coeff * grad p(coeff * z + offset).
/// One composition step with momentum alpha around the averaged iterate zbar
/// maps (s, a, b) to (s/alpha, a*alpha, a*(1-alpha)*zbar + b); the curvature
/// multiplier s*a^2 then equals the running product of the alphas.
struct AffineReparam {
  double scale = 1.0;
  double coeff = 1.0;
  Vec offset;  // empty means zero

  Vec map_point(const Vec& z) const {
    if (offset.empty()) return coeff == 1.0 ? z : scale_vec(z);
    Vec w(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) w[i] = coeff * z[i] + offset[i];
    return w;
  }

  void compose(double alpha, const Vec& zbar) {
    if (offset.empty()) offset.assign(zbar.size(), 0.0);
    double shift = coeff * (1.0 - alpha);
    for (std::size_t i = 0; i < offset.size(); ++i) offset[i] += shift * zbar[i];
    scale /= alpha;
    coeff *= alpha;
  }

  double curvature_multiplier() const { return scale * coeff * coeff; }

 private:
  Vec scale_vec(const Vec& z) const {
    Vec w(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) w[i] = coeff * z[i];
    return w;
  }
};

/// Exact minimizer over the set of a sum of frozen quadratics sharing the
/// weight P. The sum is a single P-quadratic, so projecting its unconstrained
/// minimizer is exact.
inline Vec inner_argmin(const std::vector<FrozenQuadratic>& qs, const DiagWeight& P,
                        const ConstraintSet& set) {
  if (qs.empty()) throw std::invalid_argument("inner_argmin: no terms");
  const std::size_t d = qs.front().center.size();
  double sumH = 0.0;
  Vec w(d, 0.0), lin(d, 0.0);
  for (const auto& q : qs) {
    sumH += q.H;
    for (std::size_t i = 0; i < d; ++i) {
      w[i] += q.H * q.center[i];
      lin[i] += q.linear[i];
    }
  }
  if (!(sumH > 0.0)) throw std::logic_error("inner_argmin: nonpositive total curvature");
  Vec z(d);
  for (std::size_t i = 0; i < d; ++i) z[i] = (w[i] - lin[i] / P.d[i]) / sumH;
  return project(set, P, z);
}

/// Per-inner-iteration observer: (level k, t_k, corrected iterate, averaged iterate).
using InnerTrace = std::function<void(int level, int t, const Vec& z, const Vec& zbar)>;

namespace detail {

struct FnState {
  bool frozen = false;
  FrozenQuadratic fq;
  AffineReparam rep;
};

struct SlidingRun {
  const VIProblem& vi;
  const Schedule& sched;
  const InnerTrace& trace;
  AlphaSequence alpha;
  std::vector<double> alpha_last;  // alpha(T_k - 1) per level
  std::vector<Vec> ztab;           // persistent per-level iterates

  SlidingRun(const VIProblem& v, const Schedule& s, const Vec& z_in, const InnerTrace& tr)
      : vi(v), sched(s), trace(tr) {
    const int n = vi.n();
    alpha_last.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) alpha_last[static_cast<std::size_t>(k)] = alpha(sched.T[static_cast<std::size_t>(k)] - 1);
    ztab.assign(static_cast<std::size_t>(n), z_in);
  }

  Vec descend(int k, std::vector<FnState> st, double prodL, double prodM) {
    const int n = vi.n();
    if (k == n) {
      std::vector<FrozenQuadratic> frozen;
      frozen.reserve(st.size());
      for (auto& s : st) frozen.push_back(std::move(s.fq));
      return inner_argmin(frozen, vi.P, vi.set);
    }
    const VIComponent& comp = vi.comps[static_cast<std::size_t>(k)];
    Vec zbar = ztab[static_cast<std::size_t>(k)];
    for (int t = 0; t < sched.T[static_cast<std::size_t>(k)]; ++t) {
      const double a = alpha(t);
      std::vector<FnState> stk = st;
      for (int i = k; i < n; ++i) stk[static_cast<std::size_t>(i)].rep.compose(a, zbar);
      const double pl = prodL * a;
      const double pm = prodM * (a / alpha_last[static_cast<std::size_t>(k)]);
      const double H = comp.L * pl + comp.M * pm;

      const Vec& zk = ztab[static_cast<std::size_t>(k)];
      Vec q_zk = comp.Q.apply(zk);
      const AffineReparam& rep = stk[static_cast<std::size_t>(k)].rep;
      Vec grad = scale(comp.p.gradient(rep.map_point(zk)), rep.scale * rep.coeff);
      stk[static_cast<std::size_t>(k)].frozen = true;
      stk[static_cast<std::size_t>(k)].fq = FrozenQuadratic{H, zk, add(grad, q_zk)};

      Vec z_half = descend(k + 1, std::move(stk), pl, pm);

      zbar = lincomb(a, z_half, 1.0 - a, zbar);
      // Sequenced explicitly: the first call must land on the memo slot the
      // pre-recursion evaluation filled.
      Vec q_zk_again = comp.Q.apply(ztab[static_cast<std::size_t>(k)]);
      Vec q_half = comp.Q.apply(z_half);
      Vec dq = sub(q_zk_again, q_half);
      Vec znext(z_half.size());
      for (std::size_t i = 0; i < znext.size(); ++i)
        znext[i] = z_half[i] + dq[i] / (H * vi.P.d[i]);
      if (!all_finite(znext))
        throw NonFiniteIterate("run_sliding: iterate left the finite range (check constants)");
      ztab[static_cast<std::size_t>(k)] = std::move(znext);
      if (trace) trace(k + 1, t, ztab[static_cast<std::size_t>(k)], zbar);
      // Deeper-level iterates simply persist into the next pass.
    }
    return zbar;
  }
};

}  // namespace detail

/// One pass of the recursive sliding method over a finite-sum monotone VI.
/// Components must already be in schedule order (see reorder_components).
/// The output lies in the feasible set and satisfies, for every feasible z,
///   gap(z_out, z) <= gap_bound(T, z_in, z).
inline Vec run_sliding(const VIProblem& vi, const Schedule& sched, const Vec& z_in,
                       const InnerTrace& trace = {}) {
  vi.validate();
  if (static_cast<int>(sched.T.size()) != vi.n())
    throw DimensionMismatch("run_sliding: schedule does not match component count");
  for (int T : sched.T)
    if (T < 1) throw std::invalid_argument("run_sliding: inner counts must be >= 1");
  if (static_cast<int>(z_in.size()) != vi.dim)
    throw DimensionMismatch("run_sliding: z_in dimension mismatch");
  if (!feasible(vi.set, vi.P, z_in)) throw InfeasiblePoint("run_sliding: z_in infeasible");

  detail::SlidingRun run(vi, sched, z_in, trace);
  std::vector<detail::FnState> states(static_cast<std::size_t>(vi.n()));
  Vec z_out = run.descend(0, std::move(states), 1.0, 1.0);
  if (!all_finite(z_out)) throw NonFiniteIterate("run_sliding: non-finite output");
  return z_out;
}

}  // namespace spsolve
