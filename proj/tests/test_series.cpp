#include <doctest.h>

#include <omp.h>

#include "seplab/linalg.hpp"
#include "seplab/precision.hpp"
#include "seplab/series.hpp"

using namespace seplab;

namespace {
RSeries poly_xy(int order, std::initializer_list<std::tuple<int, int, int>> terms) {
  RSeries s(2, order);
  for (auto [i, j, c] : terms) s.set({i, j, 0, 0}, Real(c));
  return s;
}
}  // namespace

TEST_CASE("monomial table numbering") {
  auto t = MonomialTable::get(3, 4);
  CHECK(t->size() == 35);  // C(4 + 3, 3)
  CHECK(t->degree_begin(5) == t->size());
  for (int i = 0; i < t->size(); ++i) CHECK(t->index(t->exps(i)) == i);
  CHECK(t->index({5, 0, 0, 0}) == -1);
}

TEST_CASE("truncated products: parallel and serial kernels agree") {
  ContextScope s(PrecisionContext::make(50));
  RSeries a(3, 10), b(3, 10);
  for (int i = 0; i < a.size(); ++i) {
    a[i] = Real::ratio(i + 1, 7);
    b[i] = Real::ratio(3 - i, 11);
  }
  omp_set_num_threads(2);
  RSeries p = mul(a, b), q = mul_serial(a, b);
  for (int i = 0; i < p.size(); ++i) CHECK(p[i] == q[i]);
  // (1 + x)(1 - x) = 1 - x^2
  RSeries x = RSeries::variable(3, 10, 0), one = RSeries::constant(3, 10, Real(1));
  RSeries r = (one + x) * (one - x);
  CHECK(r.coeff({0, 0, 0, 0}) == Real(1));
  CHECK(r.coeff({2, 0, 0, 0}) == Real(-1));
  CHECK(r.coeff({1, 0, 0, 0}).is_zero());
}

TEST_CASE("Poisson bracket") {
  ContextScope s(PrecisionContext::make(40));
  RSeries x = RSeries::variable(2, 6, 0), y = RSeries::variable(2, 6, 1);
  CHECK(poisson(x, y).coeff({0, 0, 0, 0}) == Real(1));
  RSeries f = poly_xy(6, {{2, 1, 1}, {0, 3, 2}});
  RSeries g = poly_xy(6, {{1, 1, 1}, {3, 0, 5}});
  RSeries fg = poisson(f, g), gf = poisson(g, f);
  for (int i = 0; i < fg.size(); ++i) CHECK(fg[i] == -gf[i]);
}

TEST_CASE("time-one flow of a Hamiltonian is symplectic") {
  ContextScope s(PrecisionContext::make(60));
  // H = y^2/2 + x^3/3: flow is exact in low degrees and area preserving.
  RSeries H(2, 8);
  H.set({0, 2, 0, 0}, Real::ratio(1, 2));
  H.set({3, 0, 0, 0}, Real::ratio(1, 3));
  auto flow = hamiltonian_time1_flow(H, 7);
  RSeries J = jacobian_determinant(flow).with_order(6);
  CHECK(abs(J.coeff({0, 0, 0, 0}) - Real(1)) < pow10(-50));
  for (int i = 1; i < J.size(); ++i) CHECK(abs(J[i]) < pow10(-45));
  // Linear part of the flow: x' = x + y, y' = y.
  CHECK(flow[0].coeff({1, 0, 0, 0}) == Real(1));
  CHECK(flow[0].coeff({0, 1, 0, 0}) == Real(1));
  CHECK(flow[1].coeff({0, 1, 0, 0}) == Real(1));
}

TEST_CASE("one-variable Laurent series") {
  ContextScope s(PrecisionContext::make(40));
  // 1/(1 - v) = sum v^k
  Series1<Real> a(0, 12);
  a.ref(0) = Real(1);
  a.ref(1) = Real(-1);
  auto inv = inverse(a);
  for (int k = 0; k <= 12; ++k) CHECK(abs(inv.at(k) - Real(1)) < pow10(-35));
  auto d = inv.derivative();
  CHECK(abs(d.at(3) - Real(4)) < pow10(-35));
}

TEST_CASE("dense solves") {
  ContextScope s(PrecisionContext::make(50));
  RMatrix m(3, 3);
  const int v[9] = {4, 1, 2, 1, 5, 3, 2, 3, 6};
  for (int i = 0; i < 9; ++i) m.a[i] = Real(v[i]);
  std::vector<Real> b{Real(1), Real(2), Real(3)};
  auto x = solve(m, b, pow10(-40));
  for (int i = 0; i < 3; ++i) {
    Real r = -b[i];
    for (int j = 0; j < 3; ++j) r += m(i, j) * x[j];
    CHECK(abs(r) < pow10(-45));
  }
  CHECK(abs(determinant(m) - Real(70)) < pow10(-45));
  RMatrix sing(2, 2);
  sing.a = {Real(1), Real(2), Real(2), Real(4)};
  CHECK_THROWS_AS(solve(sing, {Real(1), Real(1)}, pow10(-40)), NumericError);
  // least squares fit of a line through exact points
  RMatrix A(4, 2);
  std::vector<Real> y;
  for (int i = 0; i < 4; ++i) {
    A(i, 0) = Real(1);
    A(i, 1) = Real(i);
    y.push_back(Real(3) + Real(2) * Real(i));
  }
  Real res;
  auto c = least_squares(A, y, &res);
  CHECK(abs(c[0] - Real(3)) < pow10(-45));
  CHECK(abs(c[1] - Real(2)) < pow10(-45));
}
