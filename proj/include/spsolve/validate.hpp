#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "spsolve/instances.hpp"
#include "spsolve/saddle.hpp"

namespace spsolve {

inline std::string fmt_num6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

struct InstanceCheck {
  bool ok = true;
  std::vector<std::string> lines;

  void report(const std::string& line, bool good) {
    lines.push_back(line);
    ok = ok && good;
  }
};

namespace detail_validate {

inline std::string flag(bool b) { return b ? "true" : "false"; }

/// Whether grad h stays inside the span of `range_basis` complement's
/// orthogonal complement, i.e. orthogonal to every kernel direction.
inline bool gradient_in_range(const SmoothFn& h, const std::vector<Vec>& kernel, double tol) {
  Rng rng(42);
  for (int probe = 0; probe < 3; ++probe) {
    Vec gx = h.gradient(rng.normal_vec(h.dim));
    double sc = std::max(1.0, norm(gx));
    for (const Vec& v : kernel)
      if (std::abs(dot(gx, v)) > tol * sc) return false;
  }
  return true;
}

}  // namespace detail_validate

/// Measured-versus-declared checks on a quadratic instance: parameter
/// margins, Hessian spectra inside [mu, L], coupling singular values inside
/// the declared envelope (with the kernel/range case split), the adjoint
/// identity, and finite-difference gradients.
inline InstanceCheck validate_instance(const SaddlePointProblem& pb, double slack = 1e-8) {
  InstanceCheck chk;
  pb.validate();
  MarginReport margins = check_margins(pb.params);
  {
    std::string line = "[margins] ok=" + detail_validate::flag(margins.ok);
    for (const auto& v : margins.violations) line += " violated=\"" + v + "\"";
    chk.report(line, margins.ok);
  }

  auto spectrum_line = [&](const char* tag, const SmoothFn& h, double mu, double L) {
    auto [H, c] = detail::probe_quadratic(h);
    (void)c;
    Vec lam = sym_eigs(H);
    double scale = std::max(1.0, L);
    bool good = lam.back() >= mu - slack * scale && lam.front() <= L + slack * scale;
    chk.report(std::string("[") + tag + "] spectrum_ok=" + detail_validate::flag(good) +
                   " min=" + fmt_num6(lam.back()) + " max=" + fmt_num6(lam.front()) +
                   " declared_mu=" + fmt_num6(mu) + " declared_L=" + fmt_num6(L),
               good);
  };
  spectrum_line("f", pb.f, pb.params.mu_x, pb.params.L_x);
  spectrum_line("g", pb.g, pb.params.mu_y, pb.params.L_y);

  if (!pb.B.dense) throw InvalidInstance("validate_instance: dense B required");
  const Mat& B = *pb.B.dense;
  Vec sig = singular_values(B);
  double smax = sig.front();
  double scaleB = std::max(1.0, pb.params.L_xy);
  bool upper_ok = smax <= pb.params.L_xy + slack * scaleB;
  chk.report("[B] sigma_max_ok=" + detail_validate::flag(upper_ok) +
                 " sigma_max=" + fmt_num6(smax),
             upper_ok);

  // Lower spectral floors. With a nontrivial kernel on the relevant side the
  // floor applies to the smallest positive singular value, which is only
  // legitimate when the matching gradient stays inside the range space.
  double cut = 1e-10 * smax;
  double smin_pos = smax;
  for (double s : sig)
    if (s > cut) smin_pos = s;
  if (pb.params.mu_xy > 0.0) {
    std::vector<Vec> kerB = kernel_basis(B);
    bool ok;
    if (kerB.empty()) {
      ok = static_cast<int>(sig.size()) >= B.cols && sig.back() >= pb.params.mu_xy * (1.0 - slack);
    } else {
      ok = detail_validate::gradient_in_range(pb.f, kerB, 1e-8) &&
           smin_pos >= pb.params.mu_xy * (1.0 - slack);
    }
    chk.report("[B] mu_xy_floor_ok=" + detail_validate::flag(ok), ok);
  }
  if (pb.params.mu_yx > 0.0) {
    std::vector<Vec> kerBt = kernel_basis(B.transposed());
    bool ok;
    if (kerBt.empty()) {
      ok = static_cast<int>(sig.size()) >= B.rows && sig.back() >= pb.params.mu_yx * (1.0 - slack);
    } else {
      ok = detail_validate::gradient_in_range(pb.g, kerBt, 1e-8) &&
           smin_pos >= pb.params.mu_yx * (1.0 - slack);
    }
    chk.report("[B] mu_yx_floor_ok=" + detail_validate::flag(ok), ok);
  }

  bool adj = check_adjoint_identity(pb.B);
  chk.report("[adjoint] ok=" + detail_validate::flag(adj), adj);
  bool fdf = check_gradient_fd(pb.f, 2) && check_gradient_fd(pb.g, 2);
  chk.report("[gradient-fd] ok=" + detail_validate::flag(fdf), fdf);
  return chk;
}

}  // namespace spsolve
