// Dense truncated power series.
//
// MSeries<T> holds a polynomial in 1..4 variables truncated at a total degree
// `order`.  Maps with a parameter are stored as three-variable series in
// (x, y, mu) where mu carries weight one, so "order" is the weighted degree.
// Series1<T> is a truncated Laurent series in one variable with an explicit
// leading power; series in 1/t use the variable u = 1/t.
#pragma once

#include <array>
#include <memory>
#include <mutex>
#include <ostream>
#include <string>
#include <vector>

#include "seplab/real.hpp"

namespace seplab {

class SeriesError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

constexpr int kMaxVars = 4;
using Exponents = std::array<int, kMaxVars>;

// Graded monomial numbering for a fixed (nvars, order).  Shared and immutable.
class MonomialTable {
 public:
  static std::shared_ptr<const MonomialTable> get(int nvars, int order);

  int nvars() const { return nvars_; }
  int order() const { return order_; }
  int size() const { return static_cast<int>(exps_.size()); }
  const Exponents& exps(int idx) const { return exps_[idx]; }
  int degree(int idx) const { return degree_[idx]; }
  // First index of degree d (degree_begin(order+1) == size()).
  int degree_begin(int d) const { return begin_[d]; }
  // -1 when the total degree exceeds order or an exponent is negative.
  int index(const Exponents& e) const;

  // Product plan: for output monomial r, pairs (p, q) with exps(p)+exps(q) = exps(r).
  const std::vector<int>& pair_begin() const;
  const std::vector<std::pair<int, int>>& pairs() const;
  // idx of monomial with exponent of variable v decreased by one (-1 if zero).
  int lower(int idx, int v) const { return lower_[idx * nvars_ + v]; }
  // idx of monomial with exponent of variable v increased by one (-1 if beyond order).
  int raise(int idx, int v) const { return raise_[idx * nvars_ + v]; }

  MonomialTable(int nvars, int order);

 private:
  int nvars_, order_;
  std::vector<Exponents> exps_;
  std::vector<int> degree_;
  std::vector<int> begin_;
  std::vector<int> lookup_;
  std::vector<int> lower_, raise_;
  mutable std::vector<int> pair_begin_;
  mutable std::vector<std::pair<int, int>> pairs_;
  mutable std::once_flag pairs_once_;
  void build_pairs() const;
};

template <class T>
class MSeries {
 public:
  MSeries() = default;
  MSeries(int nvars, int order);
  static MSeries constant(int nvars, int order, const T& c);
  static MSeries variable(int nvars, int order, int v);
  static MSeries monomial(int nvars, int order, const Exponents& e, const T& c);

  int nvars() const { return table_->nvars(); }
  int order() const { return table_->order(); }
  int size() const { return static_cast<int>(c_.size()); }
  const MonomialTable& table() const { return *table_; }
  bool valid() const { return table_ != nullptr; }

  T& operator[](int idx) { return c_[idx]; }
  const T& operator[](int idx) const { return c_[idx]; }
  // Coefficient access by exponents; zero beyond the order.
  T coeff(const Exponents& e) const;
  void set(const Exponents& e, const T& v);
  std::vector<T>& data() { return c_; }
  const std::vector<T>& data() const { return c_; }

  MSeries& operator+=(const MSeries& o);
  MSeries& operator-=(const MSeries& o);
  MSeries& operator*=(const T& s);
  MSeries operator-() const;

  // Truncated or zero-padded copy at a different order.
  MSeries with_order(int order) const;
  // Terms of total degree exactly d.
  MSeries homogeneous(int d) const;
  // Terms of total degree outside [lo, hi] removed.
  MSeries degree_range(int lo, int hi) const;
  int valuation() const;  // lowest degree with a nonzero coefficient, order+1 if zero
  Real max_abs() const;
  Real max_abs_degree(int d) const;
  bool is_zero() const;

  MSeries derivative(int v) const;
  T evaluate(const std::vector<T>& point) const;

 private:
  std::shared_ptr<const MonomialTable> table_;
  std::vector<T> c_;
  void check_compatible(const MSeries& o) const;
};

template <class T>
MSeries<T> operator+(MSeries<T> a, const MSeries<T>& b) {
  a += b;
  return a;
}
template <class T>
MSeries<T> operator-(MSeries<T> a, const MSeries<T>& b) {
  a -= b;
  return a;
}
template <class T>
MSeries<T> operator*(MSeries<T> a, const T& s) {
  a *= s;
  return a;
}

// Cauchy product truncated at the common order.  The parallel version splits
// the output monomials across OpenMP threads; every coefficient is reduced in
// a fixed order, so both versions return bit-identical results.
template <class T>
MSeries<T> mul(const MSeries<T>& a, const MSeries<T>& b);
template <class T>
MSeries<T> mul_serial(const MSeries<T>& a, const MSeries<T>& b);
template <class T>
MSeries<T> operator*(const MSeries<T>& a, const MSeries<T>& b) {
  return mul(a, b);
}

// {f, g} = f_x g_y - f_y g_x in variables 0 and 1.
template <class T>
MSeries<T> poisson(const MSeries<T>& f, const MSeries<T>& g);

// exp(L_chi) f = f o phi^1_chi with L_chi f = {f, chi}.  The series stops when
// a term vanishes identically or drops below `tol`; `max_terms` caps the
// number of terms (needed when chi is quadratic and nothing truncates).
template <class T>
MSeries<T> lie_exp(const MSeries<T>& f, const MSeries<T>& chi, const Real& tol,
                   int max_terms = 100000);

// outer(inner_0, ..., inner_{n-1}) truncated at outer's order.  The inner
// series must have zero constant term unless outer is a polynomial whose
// degree is below the truncation order (then the result is exact up to it).
template <class T>
MSeries<T> compose(const MSeries<T>& outer, const std::vector<MSeries<T>>& inner);

// Substitution of a linear map for variables 0 and 1: (x, y) -> M (x, y).
template <class T>
MSeries<T> linear_substitute(const MSeries<T>& f, const std::array<std::array<T, 2>, 2>& m);

// Truncated map x o phi^1_H, y o phi^1_H of the time-one Hamiltonian flow of
// X_H = (H_y, -H_x).  With require_tangent_identity the linear part of X_H must
// vanish; otherwise the Lie series is summed until it converges.
template <class T>
std::array<MSeries<T>, 2> hamiltonian_time1_flow(const MSeries<T>& H, int order,
                                                  bool require_tangent_identity = false);

// Jacobian determinant of a planar map (components in variables 0, 1).
template <class T>
MSeries<T> jacobian_determinant(const std::array<MSeries<T>, 2>& map);

// Plain-text table "i j ... re im" per nonzero coefficient.
template <class T>
std::string to_table(const MSeries<T>& s, long digits);

using RSeries = MSeries<Real>;
using CSeries = MSeries<Complex>;
using TruncatedSeries2 = MSeries<Complex>;
using PolyVectorField = std::array<MSeries<Complex>, 2>;

// ------------------------------------------------------------------ Series1

// Truncated Laurent series sum_{k=lead}^{lead+order} c_k v^k.
template <class T>
class Series1 {
 public:
  Series1() = default;
  Series1(int lead, int order) : lead_(lead), c_(static_cast<size_t>(order + 1)) {}
  static Series1 constant(const T& c, int lead_cap_order);
  // Series with coefficients at powers lead .. max_power.
  static Series1 range(int lead, int max_power);

  int lead() const { return lead_; }
  int order() const { return static_cast<int>(c_.size()) - 1; }
  int max_power() const { return lead_ + order(); }
  bool empty() const { return c_.empty(); }

  // Coefficient of v^k (zero outside the stored window).
  T at(int k) const;
  T& ref(int k);  // k must lie in the window
  std::vector<T>& data() { return c_; }
  const std::vector<T>& data() const { return c_; }

  // Same window bounds rules as truncated arithmetic: result window ends at the
  // smaller of the operands' truncation points.
  Series1& operator+=(const Series1& o);
  Series1& operator-=(const Series1& o);
  Series1& operator*=(const T& s);
  Series1 operator-() const;

  Series1 truncated(int max_power) const;
  Series1 with_window(int lead, int max_power) const;  // pad or cut
  int valuation() const;  // lowest power with nonzero coefficient (max_power+1 if zero)
  Real max_abs() const;
  // d/dv
  Series1 derivative() const;
  // d/dt where v = 1/t: -v^2 d/dv
  Series1 derivative_reciprocal() const;
  T evaluate(const T& v) const;

 private:
  int lead_ = 0;
  std::vector<T> c_;
};

template <class T>
Series1<T> operator+(Series1<T> a, const Series1<T>& b) {
  a += b;
  return a;
}
template <class T>
Series1<T> operator-(Series1<T> a, const Series1<T>& b) {
  a -= b;
  return a;
}
template <class T>
Series1<T> operator*(Series1<T> a, const T& s) {
  a *= s;
  return a;
}
template <class T>
Series1<T> operator*(const Series1<T>& a, const Series1<T>& b);
// 1/a; the leading stored coefficient must be nonzero.
template <class T>
Series1<T> inverse(const Series1<T>& a);

// Text table "degree re im" per coefficient.
std::string to_table(const Series1<Complex>& s, long digits);
std::string to_table(const Series1<Real>& s, long digits);

using TruncatedSeries1 = Series1<Complex>;

extern template class MSeries<Real>;
extern template class MSeries<Complex>;
extern template class Series1<Real>;
extern template class Series1<Complex>;

}  // namespace seplab
