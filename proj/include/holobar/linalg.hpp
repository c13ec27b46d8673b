#pragma once

#include <optional>
#include <vector>

#include "holobar/rational.hpp"

namespace holobar {

/* Dense exact-rational matrices.  Sizes in this artifact stay small (graded
 * pieces of finite-dimensional algebras), so dense row reduction with
 * first-nonzero ("deterministic") pivoting is the right tool. */
struct QMat {
  int rows = 0, cols = 0;
  std::vector<rat> a;  // row-major

  QMat() = default;
  QMat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, rat(0)) {}

  rat& at(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
  const rat& at(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }

  static QMat identity(int n) {
    QMat m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
  }
};

inline QMat qmat_mul(const QMat& x, const QMat& y) {
  QMat z(x.rows, y.cols);
  for (int i = 0; i < x.rows; ++i)
    for (int k = 0; k < x.cols; ++k) {
      if (is_zero(x.at(i, k))) continue;
      for (int j = 0; j < y.cols; ++j)
        if (!is_zero(y.at(k, j))) z.at(i, j) += x.at(i, k) * y.at(k, j);
    }
  return z;
}

/* In-place reduced row echelon form; returns pivot column per row rank order. */
inline std::vector<int> rref(QMat& m) {
  std::vector<int> pivots;
  int r = 0;
  for (int c = 0; c < m.cols && r < m.rows; ++c) {
    int p = -1;
    for (int i = r; i < m.rows; ++i)
      if (!is_zero(m.at(i, c))) {
        p = i;
        break;
      }
    if (p < 0) continue;
    if (p != r)
      for (int j = 0; j < m.cols; ++j) std::swap(m.at(p, j), m.at(r, j));
    rat inv = rat(1) / m.at(r, c);
    for (int j = c; j < m.cols; ++j) m.at(r, j) *= inv;
    for (int i = 0; i < m.rows; ++i) {
      if (i == r || is_zero(m.at(i, c))) continue;
      rat f = m.at(i, c);
      for (int j = c; j < m.cols; ++j) m.at(i, j) -= f * m.at(r, j);
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

inline int rank(QMat m) { return static_cast<int>(rref(m).size()); }

/* Solve M x = b.  Returns the canonical particular solution (free variables
 * set to zero under the fixed column order), or nullopt when inconsistent. */
inline std::optional<std::vector<rat>> solve(const QMat& m, const std::vector<rat>& b) {
  QMat aug(m.rows, m.cols + 1);
  for (int i = 0; i < m.rows; ++i) {
    for (int j = 0; j < m.cols; ++j) aug.at(i, j) = m.at(i, j);
    aug.at(i, m.cols) = b[i];
  }
  std::vector<int> piv = rref(aug);
  for (std::size_t r = 0; r < piv.size(); ++r)
    if (piv[r] == m.cols) return std::nullopt;
  std::vector<rat> x(m.cols, rat(0));
  for (std::size_t r = 0; r < piv.size(); ++r) x[piv[r]] = aug.at(static_cast<int>(r), m.cols);
  return x;
}

/* Basis of ker M as columns. */
inline std::vector<std::vector<rat>> nullspace(QMat m) {
  std::vector<int> piv = rref(m);
  std::vector<char> is_piv(m.cols, 0);
  for (int c : piv) is_piv[c] = 1;
  std::vector<std::vector<rat>> basis;
  for (int c = 0; c < m.cols; ++c) {
    if (is_piv[c]) continue;
    std::vector<rat> v(m.cols, rat(0));
    v[c] = 1;
    for (std::size_t r = 0; r < piv.size(); ++r) v[piv[r]] = -m.at(static_cast<int>(r), c);
    basis.push_back(std::move(v));
  }
  return basis;
}

inline std::vector<rat> apply(const QMat& m, const std::vector<rat>& x) {
  std::vector<rat> y(m.rows, rat(0));
  for (int i = 0; i < m.rows; ++i)
    for (int j = 0; j < m.cols; ++j)
      if (!is_zero(m.at(i, j))) y[i] += m.at(i, j) * x[j];
  return y;
}

}  // namespace holobar
