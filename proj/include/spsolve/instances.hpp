#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "spsolve/saddle.hpp"

namespace spsolve {
namespace instances {

enum class Kind { RandomQuadratic, ChainGradient, CoupledBlock, BilinearTridiag };

struct InstanceSpec {
  Kind kind = Kind::RandomQuadratic;
  int d_x = 2;
  int d_y = 2;  // structured kinds only use d_x as their chain length d
  ProblemParams params;
  double A = 1.0;  // linear-term magnitude
  std::uint64_t seed = 42;
};

// --------------------------------------------------------------------------
// Structured matrices shared by the hard instances.
// --------------------------------------------------------------------------

/// Chain difference matrix (1/2) [1 -1; ...; 1 -1], (d-1) x d.
inline Mat chain_matrix(int d) {
  if (d < 2) throw std::invalid_argument("chain_matrix: d >= 2 required");
  Mat F(d - 1, d);
  for (int i = 0; i + 1 < d; ++i) {
    F(i, i) = 0.5;
    F(i, i + 1) = -0.5;
  }
  return F;
}

/// Interleaved pair-difference rows with factor 1/sqrt(2):
/// F1 pairs (1,2), (3,4), ...; F2 pairs (2,3), (4,5), .... Rows have disjoint
/// supports and unit norm, so F F^T = I and sigma_max = 1.
inline std::pair<Mat, Mat> gen_chain_matrices(int d) {
  if (d < 2) throw std::invalid_argument("gen_chain_matrices: d >= 2 required");
  const double s = 1.0 / std::sqrt(2.0);
  Mat F1(d / 2, d);
  for (int j = 0; 2 * j + 1 < d; ++j) {
    F1(j, 2 * j) = s;
    F1(j, 2 * j + 1) = -s;
  }
  Mat F2((d - 1) / 2, d);
  for (int j = 0; 2 * j + 2 < d; ++j) {
    F2(j, 2 * j + 1) = s;
    F2(j, 2 * j + 2) = -s;
  }
  return {std::move(F1), std::move(F2)};
}

namespace detail {

inline Mat random_orthogonal(int d, Rng& rng) {
  // Modified Gram-Schmidt on a Gaussian matrix.
  Mat Q(d, d);
  for (int c = 0; c < d; ++c) {
    Vec v = rng.normal_vec(d);
    for (int prev = 0; prev < c; ++prev) {
      double proj = 0.0;
      for (int r = 0; r < d; ++r) proj += Q(r, prev) * v[static_cast<std::size_t>(r)];
      for (int r = 0; r < d; ++r) v[static_cast<std::size_t>(r)] -= proj * Q(r, prev);
    }
    double nv = norm(v);
    if (nv < 1e-8) {  // essentially never at desk scale; retry direction
      v.assign(static_cast<std::size_t>(d), 0.0);
      v[static_cast<std::size_t>(c)] = 1.0;
      nv = 1.0;
    }
    for (int r = 0; r < d; ++r) Q(r, c) = v[static_cast<std::size_t>(r)] / nv;
  }
  return Q;
}

/// Q diag(lam) Q^T
inline Mat with_spectrum(const Mat& Q, const Vec& lam) {
  const int d = Q.rows;
  Mat H(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      double s = 0.0;
      for (int k = 0; k < d; ++k) s += Q(i, k) * lam[static_cast<std::size_t>(k)] * Q(j, k);
      H(i, j) = s;
    }
  // Symmetrize away roundoff so later probes see an exactly symmetric form.
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      double m = 0.5 * (H(i, j) + H(j, i));
      H(i, j) = H(j, i) = m;
    }
  return H;
}

/// Eigenvalues spanning [lo, hi] exactly (single value: hi).
inline Vec span_spectrum(int d, double lo, double hi, Rng& rng) {
  Vec lam(static_cast<std::size_t>(d));
  if (d == 1) {
    lam[0] = hi;
    return lam;
  }
  lam[0] = lo;
  lam[static_cast<std::size_t>(d - 1)] = hi;
  for (int i = 1; i + 1 < d; ++i) lam[static_cast<std::size_t>(i)] = rng.uniform(lo, hi);
  return lam;
}

/// U * [diag(sigma) | 0] * V^T with random orthogonal factors.
inline Mat with_singular_values(int rows, int cols, const Vec& sigma, Rng& rng) {
  Mat U = random_orthogonal(rows, rng);
  Mat V = random_orthogonal(cols, rng);
  Mat B(rows, cols);
  const int r = static_cast<int>(sigma.size());
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) {
      double s = 0.0;
      for (int k = 0; k < r; ++k) s += U(i, k) * sigma[static_cast<std::size_t>(k)] * V(j, k);
      B(i, j) = s;
    }
  return B;
}

inline Mat block_diag_add(Mat& H, int block, int d, const Mat& piece) {
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) H(block * d + i, block * d + j) += piece(i, j);
  return H;
}

}  // namespace detail

// --------------------------------------------------------------------------
// Random quadratic instances with prescribed spectra.
// --------------------------------------------------------------------------

/// Quadratic f, g with Hessian eigenvalues spanning [mu_x, L_x] / [mu_y, L_y]
/// in a random orthogonal frame, and B with singular values placed according
/// to which coupling case the parameters select. With mu_x = 0, mu_xy > 0 and
/// d_x > d_y the coupling is rank deficient and f is built constant along
/// ker B (curvature and linear term restricted to range B^T), which realizes
/// the affine solution-set case.
inline SaddlePointProblem gen_random_quadratic(const InstanceSpec& spec) {
  const ProblemParams& p = spec.params;
  p.validate();
  condition_numbers(p);
  MarginReport margins = check_margins(p);
  if (!margins.ok)
    throw InvalidInstance("gen_random_quadratic: margins violated: " + margins.violations.front());
  Rng rng(spec.seed);
  const int dx = spec.d_x, dy = spec.d_y;
  if (dx < 1 || dy < 1) throw InvalidInstance("gen_random_quadratic: dimensions must be positive");

  Mat B;
  bool kernel_case_x = false, kernel_case_y = false;
  const int r = std::min(dx, dy);
  if (p.mu_xy == 0.0 && p.mu_yx == 0.0) {
    Vec sigma(static_cast<std::size_t>(r));
    sigma[0] = p.L_xy;
    for (int i = 1; i < r; ++i) sigma[static_cast<std::size_t>(i)] = rng.uniform(0.2 * p.L_xy, p.L_xy);
    B = detail::with_singular_values(dy, dx, sigma, rng);
  } else if (p.mu_xy > 0.0 && p.mu_yx > 0.0) {
    Vec sigma = detail::span_spectrum(r, p.mu_xy, p.L_xy, rng);
    std::swap(sigma.front(), sigma.back());  // descending-ish; order is irrelevant
    B = detail::with_singular_values(dy, dx, sigma, rng);
    if (dx > dy) {
      if (p.mu_x != 0.0)
        throw InvalidInstance(
            "gen_random_quadratic: mu_xy > 0 with d_x > d_y requires mu_x = 0 (gradient range condition)");
      kernel_case_x = true;
    }
    if (dy > dx) {
      if (p.mu_y != 0.0)
        throw InvalidInstance(
            "gen_random_quadratic: mu_yx > 0 with d_y > d_x requires mu_y = 0 (gradient range condition)");
      kernel_case_y = true;
    }
  } else if (p.mu_yx > 0.0) {  // mu_xy = 0
    if (dy > dx)
      throw InvalidInstance("gen_random_quadratic: mu_yx > 0 needs d_y <= d_x for a full-row-rank B");
    Vec sigma = detail::span_spectrum(dy, p.mu_yx, p.L_xy, rng);
    B = detail::with_singular_values(dy, dx, sigma, rng);
  } else {  // mu_xy > 0, mu_yx = 0
    if (dx > dy)
      throw InvalidInstance("gen_random_quadratic: mu_xy > 0 needs d_x <= d_y for a full-column-rank B");
    Vec sigma = detail::span_spectrum(dx, p.mu_xy, p.L_xy, rng);
    B = detail::with_singular_values(dy, dx, sigma, rng);
  }

  SaddlePointProblem pb;
  pb.params = p;
  pb.B = dense_map(std::move(B));

  if (kernel_case_x) {
    // Spectrum supported on range B^T: eigenvectors = right singular frame.
    auto eg = jacobi_eigh(gram(*pb.B.dense));  // B^T B, eigenvectors span range/kernel split
    Vec lam(static_cast<std::size_t>(dx), 0.0);
    for (int i = 0; i < dy; ++i)
      lam[static_cast<std::size_t>(i)] = (i == 0) ? p.L_x : rng.uniform(0.25 * p.L_x, p.L_x);
    Mat Hf = detail::with_spectrum(eg.vectors, lam);
    Vec cf(static_cast<std::size_t>(dx), 0.0);
    for (int i = 0; i < dy; ++i) {
      double w = spec.A * rng.normal();
      for (int rr = 0; rr < dx; ++rr) cf[static_cast<std::size_t>(rr)] += w * eg.vectors(rr, i);
    }
    pb.f = quadratic_fn(std::move(Hf), std::move(cf), p.L_x, p.mu_x);
  } else {
    Mat Q = detail::random_orthogonal(dx, rng);
    pb.f = quadratic_fn(detail::with_spectrum(Q, detail::span_spectrum(dx, p.mu_x, p.L_x, rng)),
                        scale(rng.normal_vec(dx), spec.A), p.L_x, p.mu_x);
  }
  if (kernel_case_y) {
    auto eg = jacobi_eigh(gram(pb.B.dense->transposed()));  // B B^T frame
    Vec lam(static_cast<std::size_t>(dy), 0.0);
    for (int i = 0; i < dx; ++i)
      lam[static_cast<std::size_t>(i)] = (i == 0) ? p.L_y : rng.uniform(0.25 * p.L_y, p.L_y);
    Mat Hg = detail::with_spectrum(eg.vectors, lam);
    Vec cg(static_cast<std::size_t>(dy), 0.0);
    for (int i = 0; i < dx; ++i) {
      double w = spec.A * rng.normal();
      for (int rr = 0; rr < dy; ++rr) cg[static_cast<std::size_t>(rr)] += w * eg.vectors(rr, i);
    }
    pb.g = quadratic_fn(std::move(Hg), std::move(cg), p.L_y, p.mu_y);
  } else {
    Mat Q = detail::random_orthogonal(dy, rng);
    pb.g = quadratic_fn(detail::with_spectrum(Q, detail::span_spectrum(dy, p.mu_y, p.L_y, rng)),
                        scale(rng.normal_vec(dy), spec.A), p.L_y, p.mu_y);
  }
  pb.validate();
  return pb;
}

// --------------------------------------------------------------------------
// Chain-gradient instance.
// --------------------------------------------------------------------------

/// mu_xy > 0: f = mu_x/2 |x|^2 + (L_x - mu_x)/2 |Fx|^2 - A<e1, x>,
///            g = L_y/2 |y|^2, B = mu_xy I_d.
/// mu_xy = 0 (needs mu_yx > 0): x = (u, v) in R^{d+1},
///            f = mu_x/2 |x|^2 + (L_x - mu_x)/2 |F u|^2 - A<e1, u>,
///            g on R^1, B = mu_yx [0 ... 0 1].
inline SaddlePointProblem gen_chain_gradient(const ProblemParams& p, int d, double A) {
  p.validate();
  condition_numbers(p);
  if (d < 2) throw InvalidInstance("gen_chain_gradient: d >= 2 required");
  Mat F = chain_matrix(d);
  SaddlePointProblem pb;
  pb.params = p;
  if (p.mu_xy > 0.0) {
    Mat Hf = gram(F);
    for (auto& v : Hf.a) v *= (p.L_x - p.mu_x);
    for (int i = 0; i < d; ++i) Hf(i, i) += p.mu_x;
    Vec cf(static_cast<std::size_t>(d), 0.0);
    cf[0] = -A;
    pb.f = quadratic_fn(std::move(Hf), std::move(cf), p.L_x, p.mu_x);
    Mat Hg(d, d);
    for (int i = 0; i < d; ++i) Hg(i, i) = p.L_y;
    pb.g = quadratic_fn(std::move(Hg), Vec(static_cast<std::size_t>(d), 0.0), p.L_y, p.mu_y);
    Mat B(d, d);
    for (int i = 0; i < d; ++i) B(i, i) = p.mu_xy;
    pb.B = dense_map(std::move(B));
  } else {
    if (!(p.mu_yx > 0.0))
      throw InvalidInstance("gen_chain_gradient: the mu_xy = 0 form needs mu_yx > 0");
    if (!(p.mu_x > 0.0))
      throw InvalidInstance("gen_chain_gradient: the mu_xy = 0 form needs mu_x > 0");
    const int dx = d + 1;
    Mat Hf(dx, dx);
    Mat FtF = gram(F);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) Hf(i, j) = (p.L_x - p.mu_x) * FtF(i, j);
    for (int i = 0; i < dx; ++i) Hf(i, i) += p.mu_x;
    Vec cf(static_cast<std::size_t>(dx), 0.0);
    cf[0] = -A;
    pb.f = quadratic_fn(std::move(Hf), std::move(cf), p.L_x, p.mu_x);
    Mat Hg(1, 1);
    Hg(0, 0) = p.L_y;
    pb.g = quadratic_fn(std::move(Hg), Vec(1, 0.0), p.L_y, p.mu_y);
    Mat B(1, dx);
    B(0, dx - 1) = p.mu_yx;
    pb.B = dense_map(std::move(B));
  }
  pb.validate();
  return pb;
}

// --------------------------------------------------------------------------
// Coupled-block instance.
// --------------------------------------------------------------------------

/// Block coupling matrix on 3n blocks: one gamma row tying the first n
/// blocks, two beta fans, and an alpha chain between them. Dropping the
/// gamma row gives the (3n-1) x 3n variant used when mu_xy = 0.
inline Mat coupling_matrix(int n, double alpha, double beta, double gamma, bool with_gamma_row) {
  if (n < 2) throw std::invalid_argument("coupling_matrix: n >= 2 required");
  const int rows = with_gamma_row ? 3 * n : 3 * n - 1;
  Mat E(rows, 3 * n);
  int r = 0;
  if (with_gamma_row) {
    for (int j = 0; j < n; ++j) E(0, j) = gamma;
    r = 1;
  }
  for (int i = 0; i < n; ++i, ++r) {
    E(r, i) = beta;
    E(r, n) = -beta;
  }
  for (int j = 1; j < n; ++j, ++r) {
    E(r, n + j - 1) = alpha;
    E(r, n + j) = -alpha;
  }
  for (int i = 0; i < n; ++i, ++r) {
    E(r, 2 * n - 1) = -beta;
    E(r, 2 * n + i) = beta;
  }
  return E;
}

struct BlockSpectrumReport {
  double sigma2_min = 0.0;  // smallest positive when the gamma row is absent
  double sigma2_max = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  bool lower_ok = false;
  bool upper_ok = false;
  bool ok() const { return lower_ok && upper_ok; }
};

/// Checks the designed spectral envelope of the coupling matrix:
///   min{n g^2/4, b^2/36, a^2/(9 n^2)} <= sigma^2 <= max{2n g^2, 2(n+1) b^2, 4 a^2}
/// (gamma terms dropped when gamma = 0, where the bound is on the smallest
/// positive singular value instead).
inline BlockSpectrumReport validate_block_spectrum(const Mat& E, double alpha, double beta,
                                                   double gamma, int n, double slack = 1e-8) {
  BlockSpectrumReport rep;
  Vec lam = sym_eigs(E.rows <= E.cols ? gram(E.transposed()) : gram(E));
  rep.sigma2_max = std::max(0.0, lam.front());
  rep.sigma2_min = std::max(0.0, lam.back());
  if (gamma > 0.0) {
    rep.lower = std::min({n * gamma * gamma / 4.0, beta * beta / 36.0,
                          alpha * alpha / (9.0 * n * n)});
    rep.upper = std::max({2.0 * n * gamma * gamma, 2.0 * (n + 1) * beta * beta,
                          4.0 * alpha * alpha});
  } else {
    rep.lower = std::min(beta * beta / 36.0, alpha * alpha / (9.0 * n * n));
    rep.upper = std::max(2.0 * (n + 1) * beta * beta, 4.0 * alpha * alpha);
  }
  rep.lower_ok = rep.sigma2_min >= rep.lower * (1.0 - slack);
  rep.upper_ok = rep.sigma2_max <= rep.upper * (1.0 + slack);
  return rep;
}

struct CoupledBlockInstance {
  SaddlePointProblem problem;
  Mat E;  // the block matrix before the Kronecker lift
  int n = 0;
  double alpha = 0.0, beta = 0.0, gamma = 0.0;
  double delta_tilde_x = 0.0;
};

/// Assembles the block instance: n = floor(L_xy / (6 mu_yx)) triples of
/// blocks, chain matrices inside f's first and last block groups, the tilde
/// weight mu_x + 4 mu_xy^2 / L_y on the middle and last groups, and the
/// Kronecker-lifted coupling matrix (gamma row present iff mu_xy > 0).
inline CoupledBlockInstance gen_coupled_block(const ProblemParams& p, int d, double A) {
  p.validate();
  condition_numbers(p);
  MarginReport margins = check_margins(p);
  if (!margins.ok)
    throw InvalidInstance("gen_coupled_block: margins violated: " + margins.violations.front());
  if (!(p.mu_yx > 0.0)) throw InvalidInstance("gen_coupled_block: mu_yx > 0 required");
  if (p.mu_xy == 0.0 && !(p.mu_x > 0.0))
    throw InvalidInstance("gen_coupled_block: mu_xy = 0 requires mu_x > 0");
  if (d < 2) throw InvalidInstance("gen_coupled_block: d >= 2 required");
  const int n = static_cast<int>(std::floor(p.L_xy / (6.0 * p.mu_yx)));
  if (n < 2) throw InvalidInstance("gen_coupled_block: floor(L_xy / (6 mu_yx)) < 2");

  CoupledBlockInstance inst;
  inst.n = n;
  inst.alpha = p.L_xy / 2.0;
  inst.beta = p.L_xy / n;
  inst.gamma = p.mu_xy > 0.0 ? 2.0 * p.mu_xy / std::sqrt(static_cast<double>(n)) : 0.0;
  inst.delta_tilde_x = p.mu_x + 4.0 * p.mu_xy * p.mu_xy / p.L_y;
  const bool with_gamma = p.mu_xy > 0.0;
  inst.E = coupling_matrix(n, inst.alpha, inst.beta, inst.gamma, with_gamma);

  auto [F1, F2] = gen_chain_matrices(d);
  Mat F1tF1 = gram(F1);
  Mat F2tF2 = gram(F2);

  const int nx = 3 * n;
  const int ny = with_gamma ? 3 * n : 3 * n - 1;
  const int dxt = nx * d, dyt = ny * d;
  Mat Hf(dxt, dxt);
  Vec cf(static_cast<std::size_t>(dxt), 0.0);
  const double dtx = inst.delta_tilde_x;
  for (int b = 0; b < nx; ++b) {
    double diag = b < n ? p.mu_x : dtx;
    for (int i = 0; i < d; ++i) Hf(b * d + i, b * d + i) += diag;
    if (b < n) {
      Mat piece = F1tF1;
      for (auto& v : piece.a) v *= (p.L_x - dtx);
      detail::block_diag_add(Hf, b, d, piece);
    } else if (b >= 2 * n) {
      Mat piece = F2tF2;
      for (auto& v : piece.a) v *= (p.L_x - dtx);
      detail::block_diag_add(Hf, b, d, piece);
      cf[static_cast<std::size_t>(b * d)] = -A;
    }
  }

  const double Ly_first = with_gamma ? p.L_y : p.mu_y;
  Mat Hg(dyt, dyt);
  for (int b = 0; b < ny; ++b) {
    double diag = b == 0 ? Ly_first : p.mu_y;
    for (int i = 0; i < d; ++i) Hg(b * d + i, b * d + i) = diag;
  }

  inst.problem.params = p;
  inst.problem.f = quadratic_fn(std::move(Hf), std::move(cf), p.L_x, p.mu_x);
  inst.problem.g = quadratic_fn(std::move(Hg), Vec(static_cast<std::size_t>(dyt), 0.0), p.L_y, p.mu_y);
  inst.problem.B = dense_map(kron_identity(inst.E, d));
  inst.problem.validate();
  return inst;
}

// --------------------------------------------------------------------------
// Bilinear bidiagonal instance.
// --------------------------------------------------------------------------

/// f = mu_x/2 |x|^2 - A<e1, x>, g = mu_y/2 |y|^2, and the d x d coupling
/// (1/2) bidiag(a, -b) with a = L_xy + m, b = L_xy - m, m = max{mu_xy, mu_yx}.
/// Its singular values sit inside [m, L_xy].
inline SaddlePointProblem gen_bilinear_tridiag(const ProblemParams& p, int d, double A) {
  p.validate();
  condition_numbers(p);
  MarginReport margins = check_margins(p);
  if (!margins.ok)
    throw InvalidInstance("gen_bilinear_tridiag: margins violated: " + margins.violations.front());
  if (!(p.mu_x > 0.0 && p.mu_y > 0.0))
    throw InvalidInstance("gen_bilinear_tridiag: mu_x, mu_y > 0 required");
  if (d < 1) throw InvalidInstance("gen_bilinear_tridiag: d >= 1 required");
  const double mbar = std::max(p.mu_xy, p.mu_yx);
  const double a = p.L_xy + mbar;
  const double b = p.L_xy - mbar;
  Mat B(d, d);
  for (int i = 0; i < d; ++i) {
    B(i, i) = 0.5 * a;
    if (i + 1 < d) B(i, i + 1) = -0.5 * b;
  }
  SaddlePointProblem pb;
  pb.params = p;
  Mat Hf(d, d), Hg(d, d);
  for (int i = 0; i < d; ++i) {
    Hf(i, i) = p.mu_x;
    Hg(i, i) = p.mu_y;
  }
  Vec cf(static_cast<std::size_t>(d), 0.0);
  cf[0] = -A;
  pb.f = quadratic_fn(std::move(Hf), std::move(cf), p.L_x, p.mu_x);
  pb.g = quadratic_fn(std::move(Hg), Vec(static_cast<std::size_t>(d), 0.0), p.L_y, p.mu_y);
  pb.B = dense_map(std::move(B));
  pb.validate();
  return pb;
}

/// Dispatcher used by the CLI.
inline SaddlePointProblem generate(const InstanceSpec& spec) {
  switch (spec.kind) {
    case Kind::RandomQuadratic:
      return gen_random_quadratic(spec);
    case Kind::ChainGradient:
      return gen_chain_gradient(spec.params, spec.d_x, spec.A);
    case Kind::CoupledBlock:
      return gen_coupled_block(spec.params, spec.d_x, spec.A).problem;
    case Kind::BilinearTridiag:
      return gen_bilinear_tridiag(spec.params, spec.d_x, spec.A);
  }
  throw std::logic_error("generate: unknown kind");
}

}  // namespace instances
}  // namespace spsolve
