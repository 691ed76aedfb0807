#include "seplab/formal_separatrix.hpp"

#include <gmp.h>

#include <cstring>
#include <sstream>

#include "seplab/linalg.hpp"

namespace seplab {

// ------------------------------------------------------------ EpsPoly algebra

namespace {

void sp_axpy(SigmaPoly& y, const SigmaPoly& x, const Real& a) {
  if (y.size() < x.size()) y.resize(x.size(), Real(0));
  for (size_t i = 0; i < x.size(); ++i)
    if (!x[i].is_zero()) y[i].fma_acc(x[i], a);
}

SigmaPoly sp_mul(const SigmaPoly& a, const SigmaPoly& b) {
  if (a.empty() || b.empty()) return {};
  SigmaPoly r(a.size() + b.size() - 1, Real(0));
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].is_zero()) continue;
    for (size_t j = 0; j < b.size(); ++j)
      if (!b[j].is_zero()) r[i + j].fma_acc(a[i], b[j]);
  }
  return r;
}

Real sp_max(const SigmaPoly& a) {
  Real m(0);
  for (const auto& v : a) m = max(m, abs(v));
  return m;
}

EpsPoly ep_add(const EpsPoly& a, const EpsPoly& b, const Real& sb = Real(1)) {
  EpsPoly r(std::min(a.max_eps(), b.max_eps()));
  for (int n = 0; n <= r.max_eps(); ++n) {
    r.c[n] = a.c[n];
    sp_axpy(r.c[n], b.c[n], sb);
  }
  return r;
}

EpsPoly ep_mul(const EpsPoly& a, const EpsPoly& b) {
  EpsPoly r(std::min(a.max_eps(), b.max_eps()));
  const int K = r.max_eps();
  for (int i = 0; i <= K; ++i) {
    if (a.c[i].empty()) continue;
    for (int j = 0; i + j <= K; ++j) {
      if (b.c[j].empty()) continue;
      SigmaPoly p = sp_mul(a.c[i], b.c[j]);
      sp_axpy(r.c[i + j], p, Real(1));
    }
  }
  return r;
}

// d/dtau of eps^k Z(sigma) = eps^{k+1} (1 - sigma^2)/2 Z'(sigma).
EpsPoly ep_dtau(const EpsPoly& a) {
  EpsPoly r(a.max_eps());
  for (int k = 0; k + 1 <= a.max_eps(); ++k) {
    const SigmaPoly& z = a.c[k];
    if (z.size() < 2) continue;
    SigmaPoly d(z.size() + 1, Real(0));
    for (size_t j = 1; j < z.size(); ++j) {
      if (z[j].is_zero()) continue;
      Real h = z[j] * static_cast<long>(j) / 2;
      d[j - 1] += h;
      d[j + 1] -= h;
    }
    r.c[k + 1] = d;
  }
  return r;
}

// Polynomial p(x, y, mu) on eps-series arguments, truncated at K.
EpsPoly ep_eval(const RSeries& p, const EpsPoly& X, const EpsPoly& Y, const EpsPoly& Mu, int K) {
  const MonomialTable& t = p.table();
  int top = 0;
  for (int i = 0; i < p.size(); ++i)
    if (!p[i].is_zero()) top = std::max(top, t.degree(i));
  top = std::min(top, K);
  auto powers = [&](const EpsPoly& a) {
    std::vector<EpsPoly> pw;
    EpsPoly one(K);
    one.c[0] = {Real(1)};
    pw.push_back(one);
    for (int k = 1; k <= top; ++k) pw.push_back(ep_mul(pw.back(), a));
    return pw;
  };
  auto px = powers(X), py = powers(Y), pm = powers(Mu);
  EpsPoly out(K);
  for (int i = 0; i < p.size(); ++i) {
    if (p[i].is_zero() || t.degree(i) > K) continue;
    const Exponents& e = t.exps(i);
    EpsPoly term = ep_mul(ep_mul(px[e[0]], py[e[1]]), pm[e[2]]);
    for (int n = 0; n <= K; ++n) sp_axpy(out.c[n], term.c[n], p[i]);
  }
  return out;
}

struct Trajectory {
  EpsPoly X, Y, Mu;
};

Trajectory truncated_series(const FormalSeparatrix& fs, int n, int K) {
  Trajectory tr{EpsPoly(K), EpsPoly(K), EpsPoly(K)};
  for (int k = 1; k <= std::min(n, K); ++k) {
    tr.X.c[k] = fs.P[k];
    tr.Y.c[k] = fs.Q[k];
    tr.Mu.c[k] = {fs.mu[k]};
  }
  return tr;
}

// E1 = X' - Ht_y, E2 = Y' + Ht_x.
std::array<EpsPoly, 2> hamilton_defect(const FormalSeparatrix& fs, const Trajectory& tr, int K) {
  RSeries Hx = fs.Ht.derivative(0), Hy = fs.Ht.derivative(1);
  EpsPoly hy = ep_eval(Hy, tr.X, tr.Y, tr.Mu, K);
  EpsPoly hx = ep_eval(Hx, tr.X, tr.Y, tr.Mu, K);
  return {ep_add(ep_dtau(tr.X), hy, Real(-1)), ep_add(ep_dtau(tr.Y), hx)};
}

Real coeff_at(const SigmaPoly& s, size_t k) { return k < s.size() ? s[k] : Real(0); }

}  // namespace

// ------------------------------------------------------------ construction

FormalSeparatrix formal_separatrix_init(const NormalFormData& nf, int branch) {
  if (nf.order < 3) throw FormalSeriesError("normal form order too low");
  FormalSeparatrix fs;
  fs.branch = branch >= 0 ? 1 : -1;
  fs.Ht = nf.H * Real(3);
  fs.a_t = nf.a01 * 3;
  fs.b_t = nf.b00 * 3;
  Real s3 = sqrt(Real(3));
  Real sg(fs.branch);
  fs.mu = {Real(0), sg / (s3 * fs.a_t * 2)};
  fs.P = {SigmaPoly{}, SigmaPoly{sg / (s3 * fs.b_t * 2)}};
  fs.Q = {SigmaPoly{}, SigmaPoly{Real(0), -Real(1) / (fs.b_t * 2)}};
  fs.order = 1;
  return fs;
}

void solve_order(FormalSeparatrix& fs) {
  const int n = fs.order + 1;
  // Ht through degree n + 2 is needed for the eps^{n+1} equations.
  if (fs.Ht.order() < n + 2)
    throw FormalSeriesError("InsufficientOrder: normal form too short for order " + std::to_string(n));
  const int K = n + 1;
  Trajectory tr = truncated_series(fs, n - 1, K);
  auto E = hamilton_defect(fs, tr, K);
  const SigmaPoly& r1 = E[0].c[K];
  const SigmaPoly& r2 = E[1].c[K];
  const Real tol = pow10(-bits_to_digits(working_precision()) + 12);
  Real scale = max(Real(1), max(sp_max(r1), sp_max(r2)));
  for (size_t k = 0; k < r1.size(); k += 2)
    if (abs(r1[k]) > tol * scale) throw FormalSeriesError("parity corruption in the first component at order " + std::to_string(n));
  for (size_t k = 1; k < r2.size(); k += 2)
    if (abs(r2[k]) > tol * scale) throw FormalSeriesError("parity corruption in the second component at order " + std::to_string(n));

  const int Dn = n + 1;
  std::vector<int> p_pows, q_pows;
  for (int k = 0; k <= Dn; k += 2) p_pows.push_back(k);
  for (int k = 1; k <= Dn; k += 2) q_pows.push_back(k);
  std::vector<int> rows1, rows2;  // sigma powers of equation 1 (odd) and 2 (even)
  for (int k = 1; k <= Dn + 1; k += 2) rows1.push_back(k);
  for (int k = 0; k <= Dn + 1; k += 2) rows2.push_back(k);
  const int nu = static_cast<int>(p_pows.size() + q_pows.size()) + 1;
  const int nr = static_cast<int>(rows1.size() + rows2.size());
  RMatrix A(nr, nu);
  std::vector<Real> rhs(nr);
  auto row_of = [&](int eq, int pw) -> int {
    const auto& rows = eq == 1 ? rows1 : rows2;
    for (size_t i = 0; i < rows.size(); ++i)
      if (rows[i] == pw) return static_cast<int>(i + (eq == 1 ? 0 : rows1.size()));
    return -1;
  };
  auto put = [&](int eq, int pw, int col, const Real& v) {
    int r = row_of(eq, pw);
    if (r < 0) {
      if (!v.is_zero()) throw FormalSeriesError("solve_order: coefficient outside the row range");
      return;
    }
    A(r, col) += v;
  };
  const Real P1 = fs.P[1][0];
  const Real cP = fs.b_t * P1 * 4;  // coefficient of P_n in equation 2
  const Real cM2 = fs.a_t * P1 * 2;  // coefficient of mu_n in equation 2
  const Real cM1 = fs.a_t / fs.b_t;  // coefficient of sigma mu_n in equation 1
  int col = 0;
  for (int pw : p_pows) {
    // (1-s^2)/2 d/ds s^pw - s^{pw+1}
    int i = pw / 2;
    if (pw > 0) put(1, pw - 1, col, Real(i));
    put(1, pw + 1, col, Real(-(i + 1)));
    put(2, pw, col, cP);
    ++col;
  }
  for (int pw : q_pows) {
    // (1-s^2)/2 d/ds s^pw + s^{pw+1}
    put(2, pw - 1, col, Real::ratio(pw, 2));
    put(2, pw + 1, col, Real(1) - Real::ratio(pw, 2));
    ++col;
  }
  put(1, 1, col, cM1);
  put(2, 0, col, cM2);
  for (size_t i = 0; i < rows1.size(); ++i) rhs[i] = -coeff_at(r1, rows1[i]);
  for (size_t i = 0; i < rows2.size(); ++i) rhs[rows1.size() + i] = -coeff_at(r2, rows2[i]);
  for (size_t k = 0; k < r1.size(); ++k)
    if (k % 2 == 1 && static_cast<int>(k) > Dn + 1 && abs(r1[k]) > tol * scale)
      throw FormalSeriesError("solve_order: right-hand side exceeds the degree bound");
  std::vector<Real> sol;
  try {
    sol = solve(A, rhs, pow10(-bits_to_digits(working_precision()) / 2));
  } catch (const NumericError& e) {
    throw FormalSeriesError(std::string("SingularSystem at order ") + std::to_string(n) + ": " + e.what());
  }
  SigmaPoly P(Dn + 1, Real(0)), Q(Dn + 1, Real(0));
  col = 0;
  for (int pw : p_pows) P[pw] = sol[col++];
  for (int pw : q_pows) Q[pw] = sol[col++];
  Real mun = sol[col];
  // Degree post-check against deg P_n = 2 floor(n/2), deg Q_n = 2 floor((n+1)/2) - 1.
  const int degP = 2 * (n / 2), degQ = 2 * ((n + 1) / 2) - 1;
  Real big = max(Real(1), max(sp_max(P), sp_max(Q)));
  for (int k = degP + 1; k <= Dn; ++k)
    if (abs(P[k]) > tol * big)
      fs.degree_violations.push_back("P_" + std::to_string(n) + " has a sigma^" + std::to_string(k) + " term");
  for (int k = degQ + 1; k <= Dn; ++k)
    if (abs(Q[k]) > tol * big)
      fs.degree_violations.push_back("Q_" + std::to_string(n) + " has a sigma^" + std::to_string(k) + " term");
  P.resize(degP + 1);
  Q.resize(degQ + 1);
  fs.P.push_back(P);
  fs.Q.push_back(Q);
  fs.mu.push_back(mun);
  fs.order = n;
}

FormalSeparatrix solve_formal_separatrix(const NormalFormData& nf, int n_max, int branch) {
  if (n_max > nf.order - 1)
    throw FormalSeriesError("InsufficientOrder: n_max must not exceed the normal-form order minus one");
  FormalSeparatrix fs = formal_separatrix_init(nf, branch);
  while (fs.order < n_max) solve_order(fs);
  return fs;
}

std::vector<Real> hamilton_residual(const FormalSeparatrix& fs, int n, int max_eps) {
  Trajectory tr = truncated_series(fs, n, max_eps);
  auto E = hamilton_defect(fs, tr, max_eps);
  std::vector<Real> out(max_eps + 1, Real(0));
  for (int k = 0; k <= max_eps; ++k) out[k] = max(sp_max(E[0].c[k]), sp_max(E[1].c[k]));
  return out;
}

std::array<RSeries, 2> normal_third_iterate(const NormalFormData& nf, int order) {
  return time_one_map(nf.H * Real(3), order);
}

std::vector<Real> map_residual(const std::array<RSeries, 2>& F, const FormalSeparatrix& fs, int n,
                               int max_eps) {
  const int K = max_eps;
  Trajectory tr = truncated_series(fs, n, K);
  // T = tanh(eps/2) = sum 2^{2k}(2^{2k}-1) B_{2k} (eps/2)^{2k-1} / (2k)!
  auto B = bernoulli_numbers(K + 2);
  EpsPoly T(K);
  Real fact(1);
  for (int k = 1; 2 * k - 1 <= K; ++k) {
    fact = Real(1);
    for (int j = 2; j <= 2 * k; ++j) fact *= Real(j);
    Real b = Real::from_rational(B[2 * k].first, B[2 * k].second);
    Real p4 = pow(Real(2), static_cast<long>(2 * k));
    Real coef = p4 * (p4 - Real(1)) * b / fact / pow(Real(2), static_cast<long>(2 * k - 1));
    T.c[2 * k - 1] = {coef};
  }
  // sigma' = (sigma + T) / (1 + sigma T)
  EpsPoly sig(K);
  sig.c[0] = {Real(0), Real(1)};
  EpsPoly sT = ep_mul(sig, T);
  EpsPoly inv(K);
  inv.c[0] = {Real(1)};
  EpsPoly term = inv;
  for (int j = 1; j <= K; ++j) {
    term = ep_mul(term, sT);
    for (int m = 0; m <= K; ++m) sp_axpy(inv.c[m], term.c[m], Real(j % 2 ? -1 : 1));
  }
  EpsPoly sp = ep_mul(ep_add(sig, T), inv);
  // W(tau + 1)
  std::vector<EpsPoly> spow;
  EpsPoly one(K);
  one.c[0] = {Real(1)};
  spow.push_back(one);
  for (int j = 1; j <= K + 1; ++j) spow.push_back(ep_mul(spow.back(), sp));
  auto shifted = [&](const std::vector<SigmaPoly>& Z) {
    EpsPoly out(K);
    for (int k = 1; k <= std::min(n, K); ++k) {
      for (size_t j = 0; j < Z[k].size(); ++j) {
        if (Z[k][j].is_zero()) continue;
        for (int m = 0; m + k <= K; ++m) sp_axpy(out.c[m + k], spow[j].c[m], Z[k][j]);
      }
    }
    return out;
  };
  EpsPoly Xs = shifted(fs.P), Ys = shifted(fs.Q);
  EpsPoly Fx = ep_eval(F[0], tr.X, tr.Y, tr.Mu, K);
  EpsPoly Fy = ep_eval(F[1], tr.X, tr.Y, tr.Mu, K);
  EpsPoly Rx = ep_add(Xs, Fx, Real(-1)), Ry = ep_add(Ys, Fy, Real(-1));
  std::vector<Real> out(K + 1, Real(0));
  for (int k = 0; k <= K; ++k) out[k] = max(sp_max(Rx.c[k]), sp_max(Ry.c[k]));
  return out;
}

Real formal_separatrix_map_residual(const NormalFormData& nf, const FormalSeparatrix& fs, int n) {
  auto F = normal_third_iterate(nf, n + 1);
  auto r = map_residual(F, fs, n, n + 1);
  Real m(0);
  for (const auto& v : r) m = max(m, v);
  return m;
}

int residual_valuation(const std::vector<Real>& per_power, const Real& tol) {
  for (size_t k = 0; k < per_power.size(); ++k)
    if (per_power[k] > tol) return static_cast<int>(k);
  return static_cast<int>(per_power.size());
}

CVec2 evaluate_formal(const FormalSeparatrix& fs, int n, const Real& eps, const Complex& tau) {
  Complex e2 = exp(tau * eps);  // e^{eps tau}
  Complex sigma = (e2 - Complex(1)) / (e2 + Complex(1));
  CVec2 out{Complex(0), Complex(0)};
  Real ep(1);
  for (int k = 1; k <= std::min(n, fs.order); ++k) {
    ep *= eps;
    for (int c = 0; c < 2; ++c) {
      const SigmaPoly& Z = c == 0 ? fs.P[k] : fs.Q[k];
      Complex acc(0);
      for (int j = static_cast<int>(Z.size()) - 1; j >= 0; --j) acc = acc * sigma + Complex(Z[j]);
      out[c] += acc * ep;
    }
  }
  return out;
}

Real mu_series(const FormalSeparatrix& fs, int n, const Real& eps) {
  Real acc(0), ep(1);
  for (int k = 1; k <= std::min(n, fs.order); ++k) {
    ep *= eps;
    acc += fs.mu[k] * ep;
  }
  return acc;
}

// ------------------------------------------------------------------ DSeries

DSeries::DSeries(int cmax, int smin, int smax)
    : cmax_(cmax), smin_(smin), smax_(smax),
      a_(static_cast<size_t>(cmax + 1) * std::max(0, smax - smin + 1)) {}

Real DSeries::at(int c, int s) const {
  if (c < 0 || c > cmax_ || s < smin_ || s > smax_) return Real(0);
  return a_[static_cast<size_t>(c) * (smax_ - smin_ + 1) + (s - smin_)];
}

Real& DSeries::ref(int c, int s) {
  if (c < 0 || c > cmax_ || s < smin_ || s > smax_) throw SeriesError("DSeries index out of range");
  return a_[static_cast<size_t>(c) * (smax_ - smin_ + 1) + (s - smin_)];
}

DSeries DSeries::with_range(int smin, int smax) const {
  DSeries r(cmax_, smin, smax);
  for (int c = 0; c <= cmax_; ++c)
    for (int s = smin; s <= smax; ++s) r.ref(c, s) = at(c, s);
  return r;
}

DSeries& DSeries::operator+=(const DSeries& o) {
  DSeries r(std::min(cmax_, o.cmax_), std::min(smin_, o.smin_), std::min(smax_, o.smax_));
  for (int c = 0; c <= r.cmax_; ++c)
    for (int s = r.smin_; s <= r.smax_; ++s) r.ref(c, s) = at(c, s) + o.at(c, s);
  *this = std::move(r);
  return *this;
}

DSeries& DSeries::operator-=(const DSeries& o) {
  DSeries r(std::min(cmax_, o.cmax_), std::min(smin_, o.smin_), std::min(smax_, o.smax_));
  for (int c = 0; c <= r.cmax_; ++c)
    for (int s = r.smin_; s <= r.smax_; ++s) r.ref(c, s) = at(c, s) - o.at(c, s);
  *this = std::move(r);
  return *this;
}

DSeries& DSeries::operator*=(const Real& k) {
  for (auto& v : a_)
    if (!v.is_zero()) v *= k;
  return *this;
}

DSeries operator+(DSeries a, const DSeries& b) {
  a += b;
  return a;
}
DSeries operator-(DSeries a, const DSeries& b) {
  a -= b;
  return a;
}

DSeries operator*(const DSeries& a, const DSeries& b) {
  const int cm = std::min(a.cmax(), b.cmax());
  const int lo = a.smin() + b.smin();
  const int hi = std::min(a.smax() + b.smin(), b.smax() + a.smin());
  DSeries r(cm, lo, hi);
  for (int c1 = 0; c1 <= cm; ++c1)
    for (int s1 = a.smin(); s1 <= a.smax(); ++s1) {
      Real x = a.at(c1, s1);
      if (x.is_zero()) continue;
      for (int c2 = 0; c1 + c2 <= cm; ++c2)
        for (int s2 = b.smin(); s1 + s2 <= hi; ++s2) {
          Real y = b.at(c2, s2);
          if (y.is_zero()) continue;
          r.ref(c1 + c2, s1 + s2).fma_acc(x, y);
        }
    }
  return r;
}

DSeries DSeries::dt() const {
  DSeries r(cmax_, smin_ + 1, smax_ + 1);
  for (int c = 0; c <= cmax_; ++c)
    for (int s = smin_; s <= smax_; ++s) {
      Real v = at(c, s);
      if (!v.is_zero()) r.ref(c, s + 1) = v * static_cast<long>(c - s);
    }
  return r;
}

DSeries DSeries::integrate_t(const Real& tol) const {
  DSeries r(cmax_, smin_ - 1, smax_ - 1);
  for (int c = 0; c <= cmax_; ++c)
    for (int s = smin_; s <= smax_; ++s) {
      Real v = at(c, s);
      if (v.is_zero()) continue;
      int k = c - s + 1;  // t^{c-s} -> t^{c-s+1}/(c-s+1)
      if (k == 0) {
        if (abs(v) > tol)
          throw FormalSeriesError("LogTermDetected: t^-1 term in column " + std::to_string(c));
        continue;
      }
      r.ref(c, s - 1) = v / static_cast<long>(k);
    }
  return r;
}

DSeries DSeries::inverse() const {
  // a = v^{s0} sum_k v^k a_k(w);  b = v^{-s0} sum_k v^k b_k(w).
  const int s0 = smin_;
  const int L = smax_ - smin_;
  auto wmul = [&](const std::vector<Real>& x, const std::vector<Real>& y) {
    std::vector<Real> r(cmax_ + 1, Real(0));
    for (int i = 0; i <= cmax_; ++i) {
      if (x[i].is_zero()) continue;
      for (int j = 0; i + j <= cmax_; ++j)
        if (!y[j].is_zero()) r[i + j].fma_acc(x[i], y[j]);
    }
    return r;
  };
  std::vector<std::vector<Real>> ak(L + 1, std::vector<Real>(cmax_ + 1));
  for (int k = 0; k <= L; ++k)
    for (int c = 0; c <= cmax_; ++c) ak[k][c] = at(c, s0 + k);
  if (ak[0][0].is_zero()) throw FormalSeriesError("DSeries inverse: leading coefficient vanishes");
  std::vector<Real> b0(cmax_ + 1, Real(0));
  b0[0] = Real(1) / ak[0][0];
  for (int c = 1; c <= cmax_; ++c) {
    Real acc(0);
    for (int j = 1; j <= c; ++j) acc.fma_acc(ak[0][j], b0[c - j]);
    b0[c] = -acc * b0[0];
  }
  std::vector<std::vector<Real>> bk(L + 1);
  bk[0] = b0;
  for (int k = 1; k <= L; ++k) {
    std::vector<Real> acc(cmax_ + 1, Real(0));
    for (int j = 1; j <= k; ++j) {
      auto p = wmul(ak[j], bk[k - j]);
      for (int c = 0; c <= cmax_; ++c) acc[c] += p[c];
    }
    auto q = wmul(acc, b0);
    for (auto& v : q) v = -v;
    bk[k] = q;
  }
  DSeries r(cmax_, -s0, -s0 + L);
  for (int k = 0; k <= L; ++k)
    for (int c = 0; c <= cmax_; ++c) r.ref(c, -s0 + k) = bk[k][c];
  return r;
}

Series1<Real> DSeries::column(int c) const {
  Series1<Real> r = Series1<Real>::range(smin_ - c, smax_ - c);
  for (int s = smin_; s <= smax_; ++s) r.ref(s - c) = at(c, s);
  return r;
}

Complex DSeries::evaluate(const Real& eps, const Complex& t) const {
  Complex w = t * eps;
  Complex v = Complex(1) / t;
  Complex acc(0);
  Complex wc(1);
  for (int c = 0; c <= cmax_; ++c) {
    Complex inner(0);
    for (int s = smax_; s >= smin_; --s) inner = inner * v + Complex(at(c, s));
    inner *= smin_ >= 0 ? pow(v, smin_) : pow(t, -smin_);
    acc += inner * wc;
    wc *= w;
  }
  return acc;
}

Real DSeries::max_abs() const {
  Real m(0);
  for (const auto& v : a_) m = max(m, abs(v));
  return m;
}

DSeries evaluate_poly(const RSeries& p, const DSeries& x, const DSeries& y, const DSeries& mu) {
  const MonomialTable& t = p.table();
  int top = 0;
  for (int i = 0; i < p.size(); ++i)
    if (!p[i].is_zero()) top = std::max(top, t.degree(i));
  const int cm = std::min({x.cmax(), y.cmax(), mu.cmax()});
  const int hi = std::min({x.smax(), y.smax(), mu.smax()});
  auto powers = [&](const DSeries& a) {
    std::vector<DSeries> pw;
    DSeries one(cm, 0, hi);
    one.ref(0, 0) = Real(1);
    pw.push_back(one);
    for (int k = 1; k <= top; ++k) pw.push_back((pw.back() * a).with_range(0, hi));
    return pw;
  };
  auto px = powers(x), py = powers(y), pm = powers(mu);
  DSeries out(cm, 0, hi);
  for (int i = 0; i < p.size(); ++i) {
    if (p[i].is_zero()) continue;
    const Exponents& e = t.exps(i);
    if (t.degree(i) > hi) continue;
    DSeries term = (px[e[0]] * py[e[1]]).with_range(0, hi);
    term = (term * pm[e[2]]).with_range(0, hi);
    term *= p[i];
    out += term;
  }
  return out;
}

int SingularExpansion::column_smax(int c) const { return std::min(order, c + depth); }

// ------------------------------------------------------------- resummation

std::vector<std::pair<std::string, std::string>> bernoulli_numbers(int n) {
  std::vector<mpq_t> B(n + 1);
  for (auto& b : B) mpq_init(b);
  mpq_set_ui(B[0], 1, 1);
  mpz_t binom;
  mpz_init(binom);
  mpq_t acc, term;
  mpq_init(acc);
  mpq_init(term);
  for (int m = 1; m <= n; ++m) {
    mpq_set_ui(acc, 0, 1);
    for (int k = 0; k < m; ++k) {
      mpz_bin_uiui(binom, m + 1, k);
      mpq_set_z(term, binom);
      mpq_mul(term, term, B[k]);
      mpq_add(acc, acc, term);
    }
    mpq_set_si(term, -1, m + 1);
    mpq_mul(B[m], acc, term);
  }
  std::vector<std::pair<std::string, std::string>> out;
  for (auto& b : B) {
    char* num = mpz_get_str(nullptr, 10, mpq_numref(b));
    char* den = mpz_get_str(nullptr, 10, mpq_denref(b));
    out.emplace_back(num, den);
    void (*freefunc)(void*, size_t);
    mp_get_memory_functions(nullptr, nullptr, &freefunc);
    freefunc(num, std::strlen(num) + 1);
    freefunc(den, std::strlen(den) + 1);
    mpq_clear(b);
  }
  mpq_clear(acc);
  mpq_clear(term);
  mpz_clear(binom);
  return out;
}

SingularExpansion resum_by_columns(const FormalSeparatrix& fs, const NormalFormData& nf, int cmax,
                                   int depth) {
  const int nmax = fs.order;
  if (depth < 1) throw FormalSeriesError("InsufficientOrder: depth must be positive");
  SingularExpansion se;
  se.order = nmax;
  se.cmax = cmax;
  se.depth = depth;
  // coth(w/2) = (1/w) sum_k c_k w^{2k},  c_k = 2 B_{2k} / (2k)!
  const int lmax = (cmax + nmax) / 2 + 1;
  auto B = bernoulli_numbers(2 * lmax + 2);
  std::vector<Real> ck(lmax + 1);
  Real fact(1);
  for (int k = 0; k <= lmax; ++k) {
    if (k > 0) fact *= Real(static_cast<long>((2 * k - 1) * (2 * k)));
    ck[k] = Real::from_rational(B[2 * k].first, B[2 * k].second) * 2 / fact;
  }
  // d[j][l]: (sum_k c_k w^{2k})^j coefficient of w^{2l}
  std::vector<std::vector<Real>> d(nmax + 1, std::vector<Real>(lmax + 1, Real(0)));
  d[0][0] = Real(1);
  for (int j = 1; j <= nmax; ++j)
    for (int l = 0; l <= lmax; ++l) {
      Real acc(0);
      for (int k = 0; k <= l; ++k) acc.fma_acc(d[j - 1][l - k], ck[k]);
      d[j][l] = acc;
    }
  auto build = [&](const std::vector<SigmaPoly>& Z) {
    DSeries out(cmax, 1, nmax);
    for (int n = 1; n <= nmax; ++n)
      for (size_t j = 0; j < Z[n].size(); ++j) {
        if (Z[n][j].is_zero()) continue;
        for (int l = 0; l <= lmax; ++l) {
          int c = n - static_cast<int>(j) + 2 * l;
          if (c < 0 || c > cmax) continue;
          out.ref(c, n).fma_acc(Z[n][j], d[j][l]);
        }
      }
    return out;
  };
  se.W_normal = {build(fs.P), build(fs.Q)};
  se.mu = DSeries(cmax, 0, nmax);
  for (int n = 1; n <= std::min(nmax, cmax); ++n) se.mu.ref(n, n) = fs.mu[n];
  DSeries x0 = se.W_normal[0].with_range(0, nmax), y0 = se.W_normal[1].with_range(0, nmax);
  RSeries psi_x = nf.to_original[0].with_order(std::min(nf.order, nmax));
  RSeries psi_y = nf.to_original[1].with_order(std::min(nf.order, nmax));
  se.W_map = {evaluate_poly(psi_x, x0, y0, se.mu), evaluate_poly(psi_y, x0, y0, se.mu)};
  return se;
}

void formal_variational(SingularExpansion& se, const FormalSeparatrix& fs) {
  const Real tol = pow10(-bits_to_digits(working_precision()) + 20);
  DSeries X = se.W_normal[0], Y = se.W_normal[1];
  DSeries Xd = X.dt(), Yd = Y.dt();
  RSeries Hxx = fs.Ht.derivative(0).derivative(0);
  DSeries hxx = evaluate_poly(Hxx, X.with_range(0, X.smax()), Y.with_range(0, Y.smax()), se.mu);
  DSeries invY = Yd.inverse();
  DSeries Cd = hxx * invY * invY;
  Cd *= Real(-1);
  DSeries C = Cd.integrate_t(tol);
  DSeries xi2 = C * Yd;
  DSeries xi1 = invY + C * Xd;
  se.Xi = {xi1, xi2};
  se.has_xi = true;
}

std::string formal_series_csv(const FormalSeparatrix& fs) {
  std::ostringstream os;
  long digits = bits_to_digits(working_precision());
  os << "n,mu_n,component,sigma_power,coefficient\n";
  for (int n = 1; n <= fs.order; ++n) {
    for (size_t k = 0; k < fs.P[n].size(); ++k)
      if (k % 2 == 0) os << n << ',' << fs.mu[n].str(digits) << ",P," << k << ',' << fs.P[n][k].str(digits) << '\n';
    for (size_t k = 0; k < fs.Q[n].size(); ++k)
      if (k % 2 == 1) os << n << ',' << fs.mu[n].str(digits) << ",Q," << k << ',' << fs.Q[n][k].str(digits) << '\n';
  }
  return os.str();
}

}  // namespace seplab
