#pragma once

#include <cmath>
#include <vector>

#include "spsolve/oracle.hpp"

namespace spsolve {

/// One summand of a finite-sum monotone variational inequality: a smooth
/// convex part p_i and a monotone operator part Q_i, with their Lipschitz
/// constants L_i (of grad p_i) and M_i (of Q_i) in the P-geometry.
/// Theorem-level precondition: L_i + M_i > 0 for every component.
struct VIComponent {
  SmoothFn p;
  MonotoneOp Q;
  double L = 0.0;
  double M = 0.0;
};

enum class SetKind { FullSpace, Ball };

/// Feasible set: a full space or a P-ball {z : |z - center|_P <= radius}.
struct ConstraintSet {
  SetKind kind = SetKind::FullSpace;
  Vec center;
  double radius = 0.0;

  static ConstraintSet full_space() { return ConstraintSet{}; }
  static ConstraintSet ball(Vec center, double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("ConstraintSet: ball radius must be positive");
    return ConstraintSet{SetKind::Ball, std::move(center), radius};
  }
};

/// Radial projection onto the set in the P-geometry; identity on full space.
inline Vec project(const ConstraintSet& set, const DiagWeight& P, const Vec& z) {
  if (set.kind == SetKind::FullSpace) return z;
  Vec r = sub(z, set.center);
  double nr = weighted_norm(r, P);
  if (nr <= set.radius) return z;
  return add(set.center, scale(r, set.radius / nr));
}

inline bool feasible(const ConstraintSet& set, const DiagWeight& P, const Vec& z,
                     double rel_slack = 1e-9) {
  if (set.kind == SetKind::FullSpace) return true;
  return weighted_norm(sub(z, set.center), P) <= set.radius * (1.0 + rel_slack);
}

constexpr int kMaxComponents = 8;  // schedule constants blow up like 6^n beyond this

struct VIProblem {
  std::vector<VIComponent> comps;
  DiagWeight P;
  ConstraintSet set;
  int dim = 0;

  int n() const { return static_cast<int>(comps.size()); }

  void validate() const {
    if (comps.empty() || n() > kMaxComponents)
      throw InvalidInstance("VIProblem: need 1..8 components");
    P.validate();
    if (P.dim() != dim) throw DimensionMismatch("VIProblem: weight dimension mismatch");
    for (const auto& c : comps) {
      if (c.p.dim != dim || c.Q.dim != dim)
        throw DimensionMismatch("VIProblem: component dimension mismatch");
      if (!(c.L + c.M > 0.0))
        throw InvalidInstance("VIProblem: every component needs L_i + M_i > 0");
    }
  }
};

inline Vec apply_Q(const VIProblem& vi, const Vec& z) {
  Vec q(static_cast<std::size_t>(vi.dim), 0.0);
  for (const auto& c : vi.comps) q = add(q, c.Q.apply(z));
  return q;
}

inline double eval_p(const VIProblem& vi, const Vec& z) {
  double s = 0.0;
  for (const auto& c : vi.comps) s += c.p.value(z);
  return s;
}

/// Weak-solution gap of z_out probed at a feasible z:
///   p(z_out) - p(z) + <Q(z), z_out - z>.
inline double gap(const VIProblem& vi, const Vec& z_out, const Vec& z) {
  if (!feasible(vi.set, vi.P, z)) throw InfeasiblePoint("gap: probe point outside the feasible set");
  return eval_p(vi, z_out) - eval_p(vi, z) + dot(apply_Q(vi, z), sub(z_out, z));
}

/// Certified upper bound on the gap after one solver pass with inner
/// iteration counts T:
///   sum_i (4^i L_i / prod_{j<=i} T_j^2 + 2^i M_i / prod_{j<=i} T_j)
///     * 1/2 |z_in - z|_P^2.
inline double gap_bound(const VIProblem& vi, const std::vector<int>& T, const Vec& z_in,
                        const Vec& z) {
  if (static_cast<int>(T.size()) != vi.n())
    throw DimensionMismatch("gap_bound: schedule length mismatch");
  double coeff = 0.0;
  double pow4 = 1.0, pow2 = 1.0, prodT = 1.0;
  for (int i = 0; i < vi.n(); ++i) {
    pow4 *= 4.0;
    pow2 *= 2.0;
    prodT *= static_cast<double>(T[static_cast<std::size_t>(i)]);
    coeff += pow4 * vi.comps[static_cast<std::size_t>(i)].L / (prodT * prodT) +
             pow2 * vi.comps[static_cast<std::size_t>(i)].M / prodT;
  }
  return coeff * 0.5 * weighted_norm2(sub(z_in, z), vi.P);
}

}  // namespace spsolve
