#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <utility>
#include <vector>

#include "spsolve/errors.hpp"

namespace spsolve {

using Vec = std::vector<double>;

inline bool all_finite(const Vec& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

/// Dense row-major matrix. Desk-scale only: everything in this library is a
/// small structured matrix, so no sparse or blocked storage.
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}

  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }

  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  Mat transposed() const {
    Mat t(cols, rows);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  double max_abs() const {
    double m = 0.0;
    for (double x : a) m = std::max(m, std::abs(x));
    return m;
  }
};

/// Positive diagonal weight defining the working geometry.
struct DiagWeight {
  Vec d;

  static DiagWeight ones(int n) { return DiagWeight{Vec(static_cast<std::size_t>(n), 1.0)}; }
  int dim() const { return static_cast<int>(d.size()); }

  void validate() const {
    for (double x : d)
      if (!(x > 0.0)) throw std::invalid_argument("DiagWeight: entries must be strictly positive");
  }
};

inline void check_same_dim(const Vec& u, const Vec& v, const char* what) {
  if (u.size() != v.size()) throw DimensionMismatch(std::string(what) + ": dimension mismatch");
}

inline double dot(const Vec& u, const Vec& v) {
  check_same_dim(u, v, "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
  return s;
}

inline double weighted_dot(const Vec& u, const Vec& v, const DiagWeight& P) {
  check_same_dim(u, v, "weighted_dot");
  if (P.dim() != static_cast<int>(u.size()))
    throw DimensionMismatch("weighted_dot: weight dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += P.d[i] * u[i] * v[i];
  return s;
}

inline double norm2(const Vec& u) { return dot(u, u); }
inline double norm(const Vec& u) { return std::sqrt(norm2(u)); }
inline double weighted_norm2(const Vec& u, const DiagWeight& P) { return weighted_dot(u, u, P); }
inline double weighted_norm(const Vec& u, const DiagWeight& P) {
  return std::sqrt(weighted_norm2(u, P));
}

inline Vec add(const Vec& u, const Vec& v) {
  check_same_dim(u, v, "add");
  Vec w(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) w[i] = u[i] + v[i];
  return w;
}

inline Vec sub(const Vec& u, const Vec& v) {
  check_same_dim(u, v, "sub");
  Vec w(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) w[i] = u[i] - v[i];
  return w;
}

inline Vec scale(const Vec& u, double s) {
  Vec w(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) w[i] = s * u[i];
  return w;
}

/// w = a*u + b*v
inline Vec lincomb(double a, const Vec& u, double b, const Vec& v) {
  check_same_dim(u, v, "lincomb");
  Vec w(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) w[i] = a * u[i] + b * v[i];
  return w;
}

inline Vec matvec(const Mat& A, const Vec& x) {
  if (static_cast<int>(x.size()) != A.cols) throw DimensionMismatch("matvec: dimension mismatch");
  Vec y(static_cast<std::size_t>(A.rows), 0.0);
  for (int i = 0; i < A.rows; ++i) {
    double s = 0.0;
    const double* row = A.a.data() + static_cast<std::size_t>(i) * A.cols;
    for (int j = 0; j < A.cols; ++j) s += row[j] * x[j];
    y[i] = s;
  }
  return y;
}

inline Vec matvec_t(const Mat& A, const Vec& y) {
  if (static_cast<int>(y.size()) != A.rows) throw DimensionMismatch("matvec_t: dimension mismatch");
  Vec x(static_cast<std::size_t>(A.cols), 0.0);
  for (int i = 0; i < A.rows; ++i) {
    const double* row = A.a.data() + static_cast<std::size_t>(i) * A.cols;
    for (int j = 0; j < A.cols; ++j) x[j] += row[j] * y[i];
  }
  return x;
}

inline Mat matmul(const Mat& A, const Mat& B) {
  if (A.cols != B.rows) throw DimensionMismatch("matmul: dimension mismatch");
  Mat C(A.rows, B.cols);
  for (int i = 0; i < A.rows; ++i)
    for (int k = 0; k < A.cols; ++k) {
      double aik = A(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < B.cols; ++j) C(i, j) += aik * B(k, j);
    }
  return C;
}

/// A^T A (symmetric by construction).
inline Mat gram(const Mat& A) {
  Mat G(A.cols, A.cols);
  for (int i = 0; i < A.rows; ++i)
    for (int j = 0; j < A.cols; ++j) {
      double aij = A(i, j);
      if (aij == 0.0) continue;
      for (int k = 0; k < A.cols; ++k) G(j, k) += aij * A(i, k);
    }
  return G;
}

namespace detail {

struct LuFactors {
  Mat lu;
  std::vector<int> piv;
};

inline LuFactors lu_factor(Mat A) {
  const int n = A.rows;
  if (A.rows != A.cols) throw DimensionMismatch("solve_linear: matrix must be square");
  const double pivot_floor = 1e-12 * A.max_abs();
  std::vector<int> piv(static_cast<std::size_t>(n));
  std::iota(piv.begin(), piv.end(), 0);
  for (int k = 0; k < n; ++k) {
    int p = k;
    for (int i = k + 1; i < n; ++i)
      if (std::abs(A(i, k)) > std::abs(A(p, k))) p = i;
    if (std::abs(A(p, k)) <= pivot_floor)
      throw SingularMatrix("solve_linear: matrix is numerically singular");
    if (p != k) {
      for (int j = 0; j < n; ++j) std::swap(A(k, j), A(p, j));
      std::swap(piv[k], piv[p]);
    }
    for (int i = k + 1; i < n; ++i) {
      A(i, k) /= A(k, k);
      double lik = A(i, k);
      if (lik == 0.0) continue;
      for (int j = k + 1; j < n; ++j) A(i, j) -= lik * A(k, j);
    }
  }
  return {std::move(A), std::move(piv)};
}

inline Vec lu_solve(const LuFactors& F, const Vec& b) {
  const int n = F.lu.rows;
  Vec x(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) x[i] = b[static_cast<std::size_t>(F.piv[i])];
  for (int i = 1; i < n; ++i)
    for (int j = 0; j < i; ++j) x[i] -= F.lu(i, j) * x[j];
  for (int i = n - 1; i >= 0; --i) {
    for (int j = i + 1; j < n; ++j) x[i] -= F.lu(i, j) * x[j];
    x[i] /= F.lu(i, i);
  }
  return x;
}

}  // namespace detail

/// Partial-pivoting solve with one step of iterative refinement.
inline Vec solve_linear(const Mat& A, const Vec& b) {
  if (static_cast<int>(b.size()) != A.rows) throw DimensionMismatch("solve_linear: rhs size");
  auto F = detail::lu_factor(A);
  Vec x = detail::lu_solve(F, b);
  Vec r = sub(b, matvec(A, x));
  Vec dx = detail::lu_solve(F, r);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] += dx[i];
  return x;
}

struct EigenDecomposition {
  Vec values;   // descending
  Mat vectors;  // column k pairs with values[k]
};

/// Cyclic Jacobi for symmetric matrices. Converges when the off-diagonal
/// Frobenius norm drops below 1e-12 relative to the matrix norm; 100 sweeps
/// max (never reached at desk scale).
inline EigenDecomposition jacobi_eigh(const Mat& S) {
  const int n = S.rows;
  if (S.rows != S.cols) throw DimensionMismatch("jacobi_eigh: matrix must be square");
  const double scale_tol = 1e-10 * std::max(1.0, S.max_abs());
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(S(i, j) - S(j, i)) > scale_tol)
        throw AsymmetricMatrix("jacobi_eigh: matrix is not symmetric");

  Mat A = S;
  // Symmetrize exactly so rotations stay consistent.
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double m = 0.5 * (A(i, j) + A(j, i));
      A(i, j) = A(j, i) = m;
    }
  Mat V = Mat::identity(n);

  double fro = 0.0;
  for (double x : A.a) fro += x * x;
  fro = std::sqrt(fro);
  const double stop = 1e-12 * std::max(fro, 1e-300);

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += 2.0 * A(i, j) * A(i, j);
    if (std::sqrt(off) <= stop) break;
    for (int p = 0; p < n - 1; ++p)
      for (int q = p + 1; q < n; ++q) {
        double apq = A(p, q);
        if (apq == 0.0) continue;
        double theta = (A(q, q) - A(p, p)) / (2.0 * apq);
        double t = (theta >= 0.0 ? 1.0 : -1.0) /
                   (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        double c = 1.0 / std::sqrt(t * t + 1.0);
        double s = t * c;
        for (int k = 0; k < n; ++k) {
          double akp = A(k, p), akq = A(k, q);
          A(k, p) = c * akp - s * akq;
          A(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          double apk = A(p, k), aqk = A(q, k);
          A(p, k) = c * apk - s * aqk;
          A(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          double vkp = V(k, p), vkq = V(k, q);
          V(k, p) = c * vkp - s * vkq;
          V(k, q) = s * vkp + c * vkq;
        }
      }
  }

  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int i, int j) { return A(i, i) > A(j, j); });
  EigenDecomposition out;
  out.values.resize(static_cast<std::size_t>(n));
  out.vectors = Mat(n, n);
  for (int k = 0; k < n; ++k) {
    out.values[static_cast<std::size_t>(k)] = A(idx[static_cast<std::size_t>(k)], idx[static_cast<std::size_t>(k)]);
    for (int r = 0; r < n; ++r) out.vectors(r, k) = V(r, idx[static_cast<std::size_t>(k)]);
  }
  return out;
}

/// Eigenvalues of a symmetric matrix, descending.
inline Vec sym_eigs(const Mat& S) { return jacobi_eigh(S).values; }

/// Singular values, descending, via the Gram matrix of the smaller side.
inline Vec singular_values(const Mat& A) {
  Mat G = A.rows <= A.cols ? gram(A.transposed()) : gram(A);
  Vec lam = sym_eigs(G);
  for (double& x : lam) x = std::sqrt(std::max(0.0, x));
  return lam;
}

/// Orthonormal basis of the null space of A. Rank cut at 1e-10 relative to
/// the largest singular value; the zero matrix yields the full standard basis.
/// Candidates come from the Gram spectrum, whose small eigenvalues carry a
/// machine-epsilon floor, so the rank rule is applied to the directly
/// measured residual |Av| (accurate for near-kernel vectors) rather than to
/// the eigenvalue estimate.
inline std::vector<Vec> kernel_basis(const Mat& A) {
  const int d = A.cols;
  std::vector<Vec> basis;
  if (d == 0) return basis;
  if (A.max_abs() == 0.0 || A.rows == 0) {
    for (int j = 0; j < d; ++j) {
      Vec e(static_cast<std::size_t>(d), 0.0);
      e[static_cast<std::size_t>(j)] = 1.0;
      basis.push_back(std::move(e));
    }
    return basis;
  }
  auto eg = jacobi_eigh(gram(A));
  double sigma_max = std::sqrt(std::max(0.0, eg.values.front()));
  double candidate_cut = 1e-5 * sigma_max;
  double keep_cut = 1e-10 * sigma_max;
  for (int k = 0; k < d; ++k) {
    double sigma_est = std::sqrt(std::max(0.0, eg.values[static_cast<std::size_t>(k)]));
    if (sigma_est > candidate_cut) continue;
    Vec v(static_cast<std::size_t>(d));
    for (int r = 0; r < d; ++r) v[static_cast<std::size_t>(r)] = eg.vectors(r, k);
    if (norm(matvec(A, v)) <= keep_cut) basis.push_back(std::move(v));
  }
  return basis;
}

/// Squared Euclidean distance from x to the affine set anchor + span(basis);
/// basis columns must be orthonormal.
inline double dist2_to_affine(const Vec& x, const Vec& anchor, const std::vector<Vec>& basis) {
  Vec r = sub(x, anchor);
  for (const Vec& v : basis) {
    double c = dot(r, v);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= c * v[i];
  }
  return norm2(r);
}

/// Projection of x onto the same affine set.
inline Vec project_affine(const Vec& x, const Vec& anchor, const std::vector<Vec>& basis) {
  Vec r = sub(x, anchor);
  Vec p = anchor;
  for (const Vec& v : basis) {
    double c = dot(r, v);
    for (std::size_t i = 0; i < p.size(); ++i) p[i] += c * v[i];
  }
  return p;
}

/// Kronecker product with an identity block, dense.
inline Mat kron_identity(const Mat& E, int d) {
  Mat B(E.rows * d, E.cols * d);
  for (int i = 0; i < E.rows; ++i)
    for (int j = 0; j < E.cols; ++j) {
      double e = E(i, j);
      if (e == 0.0) continue;
      for (int k = 0; k < d; ++k) B(i * d + k, j * d + k) = e;
    }
  return B;
}

}  // namespace spsolve
