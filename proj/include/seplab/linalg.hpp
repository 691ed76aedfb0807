// Small dense linear algebra at working precision.
#pragma once

#include <vector>

#include "seplab/real.hpp"

namespace seplab {

template <class T>
struct Matrix {
  int rows = 0, cols = 0;
  std::vector<T> a;
  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c) {}
  T& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
  const T& operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }
};

using RMatrix = Matrix<Real>;
using CMatrix = Matrix<Complex>;

// Square solve with partial pivoting; throws NumericError("SingularSystem")
// when a pivot falls below `singular_tol` times the largest entry.
template <class T>
std::vector<T> solve(Matrix<T> m, std::vector<T> b, const Real& singular_tol);

// Rectangular system solved by row reduction with partial pivoting.  Free
// unknowns are set to zero.  `inconsistency` receives the largest residual of
// the rows that reduced to zero (0 for a consistent system).
template <class T>
std::vector<T> solve_echelon(Matrix<T> m, std::vector<T> b, const Real& pivot_tol,
                             Real* inconsistency);

// Least squares via Householder QR (full column rank required).
std::vector<Real> least_squares(RMatrix m, std::vector<Real> b, Real* residual_norm);

// Determinant by elimination.
template <class T>
T determinant(Matrix<T> m);

}  // namespace seplab
