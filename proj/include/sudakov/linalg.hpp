#pragma once

#include <optional>
#include <utility>

#include "sudakov/numeric.hpp"

namespace sudakov {

/// Row-major dense matrix.
template <typename T>
using Mat = std::vector<Vec<T>>;

/// In-place reduced row echelon form. Returns the rank; pivot columns are
/// written to `pivots` when given. Float mode pivots on the largest entry.
template <typename T>
int rref(Mat<T>& m, int cols, std::vector<int>* pivots = nullptr) {
  int rows = static_cast<int>(m.size());
  int r = 0;
  if (pivots) pivots->clear();
  for (int c = 0; c < cols && r < rows; ++c) {
    int best = -1;
    if constexpr (Num<T>::exact) {
      for (int i = r; i < rows; ++i)
        if (!is_zero(m[i][c])) {
          best = i;
          break;
        }
    } else {
      double bv = 0;
      for (int i = r; i < rows; ++i) {
        double v = std::fabs(to_double(m[i][c]));
        if (v > Num<T>::tol && v > bv) {
          bv = v;
          best = i;
        }
      }
    }
    if (best < 0) continue;
    std::swap(m[r], m[best]);
    T p = m[r][c];
    for (int k = 0; k < cols; ++k) m[r][k] /= p;
    for (int i = 0; i < rows; ++i) {
      if (i == r || is_zero(m[i][c])) continue;
      T f = m[i][c];
      for (int k = 0; k < cols; ++k) m[i][k] -= f * m[r][k];
      m[i][c] = 0;
    }
    if (pivots) pivots->push_back(c);
    ++r;
  }
  m.resize(r);
  return r;
}

template <typename T>
int rank_of(Mat<T> m, int cols) {
  return rref(m, cols);
}

/// Basis of {v : m v = 0}.
template <typename T>
Mat<T> nullspace(Mat<T> m, int cols) {
  std::vector<int> piv;
  rref(m, cols, &piv);
  std::vector<char> is_piv(cols, 0);
  for (int p : piv) is_piv[p] = 1;
  Mat<T> out;
  for (int f = 0; f < cols; ++f) {
    if (is_piv[f]) continue;
    Vec<T> v(cols, T(0));
    v[f] = 1;
    for (std::size_t r = 0; r < piv.size(); ++r) v[piv[r]] = -m[r][f];
    out.push_back(std::move(v));
  }
  return out;
}

/// Any solution of A x = b, or nullopt when inconsistent.
template <typename T>
std::optional<Vec<T>> solve_linear(const Mat<T>& A, const Vec<T>& b, int cols) {
  Mat<T> aug = A;
  for (std::size_t i = 0; i < aug.size(); ++i) aug[i].push_back(b[i]);
  std::vector<int> piv;
  rref(aug, cols + 1, &piv);
  Vec<T> x(cols, T(0));
  for (std::size_t r = 0; r < piv.size(); ++r) {
    if (piv[r] == cols) return std::nullopt;
    x[piv[r]] = aug[r][cols];
  }
  return x;
}

/// Dimension of the affine hull of a point set (-1 when empty).
template <typename T>
int affine_rank(const Vec<Vec<T>>& pts) {
  if (pts.empty()) return -1;
  int d = static_cast<int>(pts[0].size());
  Mat<T> m;
  for (std::size_t i = 1; i < pts.size(); ++i) m.push_back(sub(pts[i], pts[0]));
  return rank_of(m, d);
}

/// Row basis of a subspace in reduced echelon form; unique for a given subspace.
template <typename T>
Mat<T> canonical_basis(Mat<T> rows, int cols) {
  rref(rows, cols);
  return rows;
}

/// Orthogonal projection of v onto span(basis).
template <typename T>
Vec<T> project_onto(const Mat<T>& basis, const Vec<T>& v) {
  int k = static_cast<int>(basis.size());
  int d = static_cast<int>(v.size());
  if (k == 0) return Vec<T>(d, T(0));
  Mat<T> gram(k, Vec<T>(k));
  Vec<T> rhs(k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) gram[i][j] = dot(basis[i], basis[j]);
    rhs[i] = dot(basis[i], v);
  }
  auto c = solve_linear(gram, rhs, k);
  Vec<T> out(d, T(0));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < d; ++j) out[j] += (*c)[i] * basis[i][j];
  return out;
}

/// Coefficients y with basis^T y = v (v assumed to lie in the span).
template <typename T>
Vec<T> coordinates_in(const Mat<T>& basis, const Vec<T>& v) {
  int k = static_cast<int>(basis.size());
  Mat<T> gram(k, Vec<T>(k));
  Vec<T> rhs(k);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < k; ++j) gram[i][j] = dot(basis[i], basis[j]);
    rhs[i] = dot(basis[i], v);
  }
  auto c = solve_linear(gram, rhs, k);
  return c ? *c : Vec<T>(k, T(0));
}

}  // namespace sudakov
