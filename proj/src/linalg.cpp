#include "seplab/linalg.hpp"

#include <utility>

namespace seplab {

template <class T>
std::vector<T> solve(Matrix<T> m, std::vector<T> b, const Real& singular_tol) {
  const int n = m.rows;
  if (m.cols != n || static_cast<int>(b.size()) != n) throw NumericError("solve: shape mismatch");
  Real scale(0);
  for (const auto& v : m.a) scale = max(scale, magnitude(v));
  if (scale.is_zero()) throw NumericError("SingularSystem: zero matrix");
  for (int k = 0; k < n; ++k) {
    int piv = k;
    Real best = magnitude(m(k, k));
    for (int i = k + 1; i < n; ++i) {
      Real v = magnitude(m(i, k));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best <= singular_tol * scale) throw NumericError("SingularSystem: pivot below tolerance");
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(m(k, j), m(piv, j));
      std::swap(b[k], b[piv]);
    }
    T inv = T(1) / m(k, k);
    for (int i = k + 1; i < n; ++i) {
      if (m(i, k).is_zero()) continue;
      T f = m(i, k) * inv;
      for (int j = k; j < n; ++j) m(i, j) -= f * m(k, j);
      b[i] -= f * b[k];
    }
  }
  std::vector<T> x(n);
  for (int i = n - 1; i >= 0; --i) {
    T acc = b[i];
    for (int j = i + 1; j < n; ++j) acc -= m(i, j) * x[j];
    x[i] = acc / m(i, i);
  }
  return x;
}

template <class T>
std::vector<T> solve_echelon(Matrix<T> m, std::vector<T> b, const Real& pivot_tol,
                             Real* inconsistency) {
  const int R = m.rows, C = m.cols;
  Real scale(0);
  for (const auto& v : m.a) scale = max(scale, magnitude(v));
  std::vector<int> pivot_col;
  int row = 0;
  for (int col = 0; col < C && row < R; ++col) {
    int piv = -1;
    Real best(0);
    for (int i = row; i < R; ++i) {
      Real v = magnitude(m(i, col));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (piv < 0 || best <= pivot_tol * scale) continue;
    if (piv != row) {
      for (int j = 0; j < C; ++j) std::swap(m(row, j), m(piv, j));
      std::swap(b[row], b[piv]);
    }
    T inv = T(1) / m(row, col);
    for (int i = 0; i < R; ++i) {
      if (i == row || m(i, col).is_zero()) continue;
      T f = m(i, col) * inv;
      for (int j = col; j < C; ++j) m(i, j) -= f * m(row, j);
      b[i] -= f * b[row];
    }
    pivot_col.push_back(col);
    ++row;
  }
  Real worst(0);
  for (int i = row; i < R; ++i) worst = max(worst, magnitude(b[i]));
  if (inconsistency) *inconsistency = worst;
  std::vector<T> x(C);
  for (int i = 0; i < row; ++i) x[pivot_col[i]] = b[i] / m(i, pivot_col[i]);
  return x;
}

std::vector<Real> least_squares(RMatrix m, std::vector<Real> b, Real* residual_norm) {
  const int R = m.rows, C = m.cols;
  if (R < C) throw NumericError("least_squares: underdetermined");
  for (int k = 0; k < C; ++k) {
    Real norm2(0);
    for (int i = k; i < R; ++i) norm2.fma_acc(m(i, k), m(i, k));
    Real alpha = sqrt(norm2);
    if (alpha.is_zero()) throw NumericError("IllConditionedFit: rank deficient design matrix");
    if (m(k, k).sign() > 0) alpha = -alpha;
    std::vector<Real> v(R);
    for (int i = k; i < R; ++i) v[i] = m(i, k);
    v[k] -= alpha;
    Real vnorm2(0);
    for (int i = k; i < R; ++i) vnorm2.fma_acc(v[i], v[i]);
    if (vnorm2.is_zero()) continue;
    for (int j = k; j < C; ++j) {
      Real dot(0);
      for (int i = k; i < R; ++i) dot.fma_acc(v[i], m(i, j));
      Real f = dot * 2 / vnorm2;
      for (int i = k; i < R; ++i) m(i, j) -= f * v[i];
    }
    Real dot(0);
    for (int i = k; i < R; ++i) dot.fma_acc(v[i], b[i]);
    Real f = dot * 2 / vnorm2;
    for (int i = k; i < R; ++i) b[i] -= f * v[i];
  }
  std::vector<Real> x(C);
  for (int i = C - 1; i >= 0; --i) {
    Real acc = b[i];
    for (int j = i + 1; j < C; ++j) acc -= m(i, j) * x[j];
    x[i] = acc / m(i, i);
  }
  if (residual_norm) {
    Real r(0);
    for (int i = C; i < R; ++i) r.fma_acc(b[i], b[i]);
    *residual_norm = sqrt(r);
  }
  return x;
}

template <class T>
T determinant(Matrix<T> m) {
  const int n = m.rows;
  T det(1);
  for (int k = 0; k < n; ++k) {
    int piv = k;
    Real best = magnitude(m(k, k));
    for (int i = k + 1; i < n; ++i) {
      Real v = magnitude(m(i, k));
      if (v > best) {
        best = v;
        piv = i;
      }
    }
    if (best.is_zero()) return T();
    if (piv != k) {
      for (int j = 0; j < n; ++j) std::swap(m(k, j), m(piv, j));
      det = -det;
    }
    det = det * m(k, k);
    T inv = T(1) / m(k, k);
    for (int i = k + 1; i < n; ++i) {
      T f = m(i, k) * inv;
      for (int j = k; j < n; ++j) m(i, j) -= f * m(k, j);
    }
  }
  return det;
}

template std::vector<Real> solve(RMatrix, std::vector<Real>, const Real&);
template std::vector<Complex> solve(CMatrix, std::vector<Complex>, const Real&);
template std::vector<Real> solve_echelon(RMatrix, std::vector<Real>, const Real&, Real*);
template std::vector<Complex> solve_echelon(CMatrix, std::vector<Complex>, const Real&, Real*);
template Real determinant(RMatrix);
template Complex determinant(CMatrix);

}  // namespace seplab
