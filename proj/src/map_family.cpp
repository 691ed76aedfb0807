#include "seplab/map_family.hpp"

#include <algorithm>
#include <random>
#include <sstream>

namespace seplab {

namespace {

RSeries terms_to_series(const std::vector<MapTerm>& terms, int order) {
  RSeries s(3, order);
  for (const auto& t : terms) {
    Real c = Real::from_rational(t.num, t.den);
    Exponents e{t.i, t.j, t.k, 0};
    int idx = s.table().index(e);
    if (idx < 0) throw MapError("term beyond the family's degree bound");
    s[idx] += c;
  }
  return s;
}

int terms_degree(const std::array<std::vector<MapTerm>, 2>& terms) {
  int d = 1;
  for (const auto& comp : terms)
    for (const auto& t : comp) d = std::max(d, t.i + t.j + t.k);
  return d;
}

std::array<RSeries, 2> build_components(const std::array<std::vector<MapTerm>, 2>& terms) {
  int d = terms_degree(terms);
  return {terms_to_series(terms[0], d), terms_to_series(terms[1], d)};
}

}  // namespace

int PolyMapFamily::degree() const {
  int d = 0;
  for (const auto& c : comps)
    for (int i = 0; i < c.size(); ++i)
      if (!c[i].is_zero()) d = std::max(d, c.table().degree(i));
  return d;
}

PolyMapFamily PolyMapFamily::at_working_precision() const {
  bool have_exact = !exact_terms[0].empty() || !exact_terms[1].empty();
  if (!have_exact) {
    if (builder) return builder();
    return *this;
  }
  return family_from_terms(name, description, exact_terms, exact_inverse_terms);
}

PolyMapFamily family_from_terms(std::string name, std::string description,
                                const std::array<std::vector<MapTerm>, 2>& terms,
                                const std::optional<std::array<std::vector<MapTerm>, 2>>& inv) {
  PolyMapFamily f;
  f.name = std::move(name);
  f.description = std::move(description);
  f.exact_terms = terms;
  f.comps = build_components(terms);
  if (inv) {
    f.exact_inverse_terms = inv;
    f.inverse = build_components(*inv);
  }
  return f;
}

PolyMapFamily builtin_henon13() {
  // f(x,y) = (y, -x - (1+mu) y - y^2)
  std::array<std::vector<MapTerm>, 2> t;
  t[0] = {{0, 1, 0, "1", "1"}};
  t[1] = {{1, 0, 0, "-1", "1"}, {0, 1, 0, "-1", "1"}, {0, 1, 1, "-1", "1"}, {0, 2, 0, "-1", "1"}};
  // f^{-1}(X,Y) = (-Y - (1+mu) X - X^2, X)
  std::array<std::vector<MapTerm>, 2> inv;
  inv[0] = {{0, 1, 0, "-1", "1"}, {1, 0, 0, "-1", "1"}, {1, 0, 1, "-1", "1"}, {2, 0, 0, "-1", "1"}};
  inv[1] = {{1, 0, 0, "1", "1"}};
  return family_from_terms("henon13",
                           "area-preserving Henon map recentred at its 1:3 resonant fixed point: "
                           "(x,y) -> (y, -x - (1+mu) y - y^2)",
                           t, inv);
}

PolyMapFamily builtin_henon13_cubic() {
  std::array<std::vector<MapTerm>, 2> t;
  t[0] = {{0, 1, 0, "1", "1"}};
  t[1] = {{1, 0, 0, "-1", "1"}, {0, 1, 0, "-1", "1"}, {0, 1, 1, "-1", "1"},
          {0, 2, 0, "-1", "1"}, {0, 3, 0, "1", "5"}};
  std::array<std::vector<MapTerm>, 2> inv;
  inv[0] = {{0, 1, 0, "-1", "1"}, {1, 0, 0, "-1", "1"}, {1, 0, 1, "-1", "1"},
            {2, 0, 0, "-1", "1"}, {3, 0, 0, "1", "5"}};
  inv[1] = {{1, 0, 0, "1", "1"}};
  return family_from_terms("henon13-cubic",
                           "cubic Henon-type map (x,y) -> (y, -x - (1+mu) y - y^2 + y^3/5)", t, inv);
}

std::vector<std::string> builtin_family_names() { return {"henon13", "henon13-cubic"}; }

PolyMapFamily builtin_family(const std::string& name) {
  if (name == "henon13") return builtin_henon13();
  if (name == "henon13-cubic") return builtin_henon13_cubic();
  std::string list;
  for (const auto& n : builtin_family_names()) list += (list.empty() ? "" : ", ") + n;
  throw MapError("unknown builtin family '" + name + "' (available: " + list + ")");
}

// ------------------------------------------------------------------ PlanarMap

PlanarMap::PlanarMap(const std::array<RSeries, 2>& comps, const Real& mu) {
  for (int c = 0; c < 2; ++c) {
    const RSeries& s = comps[c];
    const MonomialTable& tab = s.table();
    // Collapse the mu dependence of every (i, j) monomial.
    std::vector<std::pair<std::pair<int, int>, Real>> acc;
    for (int idx = 0; idx < s.size(); ++idx) {
      if (s[idx].is_zero()) continue;
      const Exponents& e = tab.exps(idx);
      Real v = s[idx] * pow(mu, static_cast<long>(e[2]));
      auto key = std::make_pair(e[0], e[1]);
      auto it = std::find_if(acc.begin(), acc.end(), [&](const auto& p) { return p.first == key; });
      if (it == acc.end())
        acc.emplace_back(key, v);
      else
        it->second += v;
    }
    for (auto& [key, v] : acc) {
      if (v.is_zero()) continue;
      terms_[c].push_back({key.first, key.second, v});
      degree_ = std::max(degree_, key.first + key.second);
    }
  }
}

CVec2 PlanarMap::eval(const CVec2& p, CMat2* jac) const {
  const int d = std::max(degree_, 1);
  std::vector<Complex> px(d + 1), py(d + 1);
  px[0] = Complex(1);
  py[0] = Complex(1);
  for (int k = 1; k <= d; ++k) {
    px[k] = px[k - 1] * p[0];
    py[k] = py[k - 1] * p[1];
  }
  CVec2 out{Complex(0), Complex(0)};
  if (jac) *jac = CMat2{{{Complex(0), Complex(0)}, {Complex(0), Complex(0)}}};
  for (int c = 0; c < 2; ++c) {
    for (const auto& t : terms_[c]) {
      out[c].fma_acc(px[t.i] * py[t.j], Complex(t.c));
      if (!jac) continue;
      if (t.i > 0) (*jac)[c][0].fma_acc(px[t.i - 1] * py[t.j], Complex(t.c * static_cast<long>(t.i)));
      if (t.j > 0) (*jac)[c][1].fma_acc(px[t.i] * py[t.j - 1], Complex(t.c * static_cast<long>(t.j)));
    }
  }
  return out;
}

CVec2 PlanarMap::operator()(const CVec2& p) const { return eval(p, nullptr); }

CMat2 PlanarMap::jacobian(const CVec2& p) const {
  CMat2 j;
  eval(p, &j);
  return j;
}

CMat2 matmul(const CMat2& a, const CMat2& b) {
  CMat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return r;
}

CVec2 matvec(const CMat2& a, const CVec2& v) {
  return {a[0][0] * v[0] + a[0][1] * v[1], a[1][0] * v[0] + a[1][1] * v[1]};
}

Complex det(const CMat2& a) { return a[0][0] * a[1][1] - a[0][1] * a[1][0]; }

CMat2 identity2() { return CMat2{{{Complex(1), Complex(0)}, {Complex(0), Complex(1)}}}; }

// --------------------------------------------------------------- MapEvaluator

MapEvaluator::MapEvaluator(const PolyMapFamily& fam, const Real& mu)
    : mu_(mu), f_(fam.comps, mu), inv_tol_(pow10(-bits_to_digits(working_precision()) + 6)) {
  if (fam.inverse) {
    finv_ = PlanarMap(*fam.inverse, mu);
    has_inverse_ = true;
  }
}

CVec2 MapEvaluator::finv(const CVec2& p) const { return finv(p, nullptr); }

CVec2 MapEvaluator::finv(const CVec2& p, CMat2* jac) const {
  if (has_inverse_) return finv_.eval(p, jac);
  // Newton on f(q) = p, starting from the inverse of the linear part.
  CMat2 j0 = f_.jacobian(CVec2{Complex(0), Complex(0)});
  Complex d0 = det(j0);
  CVec2 q{(j0[1][1] * p[0] - j0[0][1] * p[1]) / d0, (j0[0][0] * p[1] - j0[1][0] * p[0]) / d0};
  Real scale = max(Real(1), max(abs(p[0]), abs(p[1])));
  for (int it = 0; it < 200; ++it) {
    CMat2 j;
    CVec2 r = f_.eval(q, &j);
    r[0] -= p[0];
    r[1] -= p[1];
    Complex dj = det(j);
    CVec2 dq{(j[1][1] * r[0] - j[0][1] * r[1]) / dj, (j[0][0] * r[1] - j[1][0] * r[0]) / dj};
    q[0] -= dq[0];
    q[1] -= dq[1];
    if (!q[0].is_finite() || !q[1].is_finite()) break;
    if (max(abs(dq[0]), abs(dq[1])) <= inv_tol_ * scale) {
      if (jac) {
        CMat2 jf = f_.jacobian(q);
        Complex dd = det(jf);
        *jac = CMat2{{{jf[1][1] / dd, -jf[0][1] / dd}, {-jf[1][0] / dd, jf[0][0] / dd}}};
      }
      return q;
    }
  }
  throw MapError("NewtonDivergence: implicit inverse did not converge");
}

CVec2 MapEvaluator::F(const CVec2& p, CMat2* jac) const {
  CVec2 q = p;
  if (jac) *jac = identity2();
  for (int k = 0; k < 3; ++k) {
    CMat2 jk;
    q = f_.eval(q, jac ? &jk : nullptr);
    if (jac) *jac = matmul(jk, *jac);
  }
  return q;
}

CVec2 MapEvaluator::Finv(const CVec2& p, CMat2* jac) const {
  CVec2 q = p;
  if (jac) *jac = identity2();
  for (int k = 0; k < 3; ++k) {
    CMat2 jk;
    q = finv(q, jac ? &jk : nullptr);
    if (jac) *jac = matmul(jk, *jac);
  }
  return q;
}

// ------------------------------------------------------------- series helpers

PolyMapFamily third_iterate(const PolyMapFamily& f, int order) {
  std::array<RSeries, 2> base = {f.comps[0].with_order(order), f.comps[1].with_order(order)};
  RSeries mu = RSeries::variable(3, order, 2);
  std::array<RSeries, 2> cur = base;
  for (int step = 0; step < 2; ++step) {
    std::vector<RSeries> inner = {cur[0], cur[1], mu};
    cur = {compose(base[0], inner), compose(base[1], inner)};
  }
  PolyMapFamily g;
  g.name = f.name + "^3";
  g.description = "third iterate of " + f.name + " truncated at order " + std::to_string(order);
  g.comps = cur;
  if (f.inverse) {
    std::array<RSeries, 2> ib = {f.inverse->at(0).with_order(order), f.inverse->at(1).with_order(order)};
    std::array<RSeries, 2> ic = ib;
    for (int step = 0; step < 2; ++step) {
      std::vector<RSeries> inner = {ic[0], ic[1], mu};
      ic = {compose(ib[0], inner), compose(ib[1], inner)};
    }
    g.inverse = ic;
  }
  return g;
}

std::array<std::array<Real, 2>, 2> SymplecticChange::L() const {
  Real a = Real::ratio(num[0], den), b = Real::ratio(num[1], den), c = Real::ratio(num[2], den);
  Real d = (Real(1) + b * c) / a;
  return {{{a, b}, {c, d}}};
}

Real SymplecticChange::shear() const { return Real::ratio(num[3], den); }

std::array<RSeries, 2> SymplecticChange::forward(int order) const {
  auto l = L();
  RSeries x = RSeries::variable(3, order, 0), y = RSeries::variable(3, order, 1);
  RSeries lx = x * l[0][0] + y * l[0][1];
  RSeries ly = x * l[1][0] + y * l[1][1];
  // S(u, v) = (u, v + s u^2)
  RSeries sy = ly + mul(lx, lx) * shear();
  return {lx, sy};
}

std::array<RSeries, 2> SymplecticChange::backward(int order) const {
  auto l = L();
  RSeries x = RSeries::variable(3, order, 0), y = RSeries::variable(3, order, 1);
  // S^{-1}(x, y) = (x, y - s x^2), then L^{-1} = [[d, -b], [-c, a]].
  RSeries u = x;
  RSeries v = y - mul(x, x) * shear();
  return {u * l[1][1] - v * l[0][1], v * l[0][0] - u * l[1][0]};
}

SymplecticChange random_symplectic_change(unsigned seed, double size) {
  std::mt19937 rng(seed);
  const long den = 64;
  long span = std::max(1L, static_cast<long>(size * den));
  std::uniform_int_distribution<long> dist(-span, span);
  SymplecticChange s;
  s.den = den;
  long a = den + dist(rng);
  if (a == 0) a = den;
  s.num = {a, dist(rng), dist(rng), dist(rng)};
  if (s.num[3] == 0) s.num[3] = span;
  return s;
}

namespace {

std::array<RSeries, 2> conjugate_components(const std::array<RSeries, 2>& f,
                                            const SymplecticChange& psi, int order) {
  auto fwd = psi.forward(order);
  auto bwd = psi.backward(order);
  RSeries mu = RSeries::variable(3, order, 2);
  std::array<RSeries, 2> fo = {f[0].with_order(order), f[1].with_order(order)};
  std::vector<RSeries> inner = {fwd[0], fwd[1], mu};
  std::array<RSeries, 2> fpsi = {compose(fo[0], inner), compose(fo[1], inner)};
  std::vector<RSeries> inner2 = {fpsi[0], fpsi[1], mu};
  return {compose(bwd[0], inner2), compose(bwd[1], inner2)};
}

}  // namespace

PolyMapFamily conjugate_family(const PolyMapFamily& f0, const SymplecticChange& psi) {
  PolyMapFamily f = f0.at_working_precision();
  // Psi and Psi^{-1} have degree 2, so the conjugate has degree <= 4 deg f.
  const int order = 4 * std::max(1, f.degree());
  PolyMapFamily g;
  g.name = f.name + "-conj";
  g.description = "Psi^-1 o (" + f.name + ") o Psi with a rational symplectic change";
  g.comps = conjugate_components(f.comps, psi, order);
  if (f.inverse) g.inverse = conjugate_components(*f.inverse, psi, order);
  // Trim to the actual degree.
  int d = g.degree();
  g.comps = {g.comps[0].with_order(d), g.comps[1].with_order(d)};
  if (g.inverse) {
    int di = 1;
    for (const auto& c : *g.inverse)
      for (int i = 0; i < c.size(); ++i)
        if (!c[i].is_zero()) di = std::max(di, c.table().degree(i));
    g.inverse = std::array<RSeries, 2>{g.inverse->at(0).with_order(di), g.inverse->at(1).with_order(di)};
  }
  g.builder = [f0, psi]() { return conjugate_family(f0, psi); };
  return g;
}

// --------------------------------------------------------------- orbit solver

ResonantOrbitData find_period3_orbit(const PolyMapFamily& f, const Real& mu, const RVec2& seed,
                                     const PrecisionContext& ctx) {
  MapEvaluator ev(f, mu);
  CVec2 v{Complex(seed[0]), Complex(seed[1])};
  const Real tol = ctx.residual_tol();
  Real start_scale = max(Real(1), max(abs(seed[0]), abs(seed[1])));
  bool converged = false;
  for (int it = 0; it < 200; ++it) {
    CMat2 j;
    CVec2 r = ev.F(v, &j);
    r[0] -= v[0];
    r[1] -= v[1];
    j[0][0] -= Complex(1);
    j[1][1] -= Complex(1);
    Complex dj = det(j);
    if (dj.is_zero()) throw MapError("NewtonDivergence: singular Newton matrix");
    CVec2 dv{(j[1][1] * r[0] - j[0][1] * r[1]) / dj, (j[0][0] * r[1] - j[1][0] * r[0]) / dj};
    v[0] -= dv[0];
    v[1] -= dv[1];
    if (!v[0].is_finite() || !v[1].is_finite() || abs(v[0].re) > start_scale * 1000)
      throw MapError("NewtonDivergence: iterate left the basin");
    Real step = max(abs(dv[0]), abs(dv[1]));
    if (step < tol * Real::ratio(1, 1000)) {
      converged = true;
      break;
    }
  }
  if (!converged) throw MapError("NewtonDivergence: no convergence in 200 steps");
  ResonantOrbitData out;
  out.mu = mu;
  out.points[0] = {v[0].re, v[1].re};
  for (int k = 1; k < 3; ++k) {
    CVec2 w = ev.f(CVec2{Complex(out.points[k - 1][0]), Complex(out.points[k - 1][1])});
    out.points[k] = {w[0].re, w[1].re};
  }
  Real dist = abs(out.points[0][0]) + abs(out.points[0][1]);
  if (dist < ctx.zero_tol()) throw MapError("NewtonDivergence: converged to the fixed point");
  CMat2 j;
  ev.F(v, &j);
  Real tr = (j[0][0] + j[1][1]).re;
  if (abs(tr) <= Real(2)) throw MapError("NotHyperbolic: multipliers on the unit circle");
  if (tr < Real(-2)) throw MapError("NotHyperbolic: negative multipliers (reflection saddle)");
  out.lambda = (tr + sqrt(tr * tr - Real(4))) / 2;
  out.epsilon = log(out.lambda);
  return out;
}

ResonantOrbitData mu_of_epsilon(const PolyMapFamily& f, const Real& epsilon, const Real& mu_guess,
                                const OrbitPredictor& predictor, const PrecisionContext& ctx) {
  auto solve_at = [&](const Real& mu) { return find_period3_orbit(f, mu, predictor(mu), ctx); };
  Real m0 = mu_guess;
  ResonantOrbitData o0 = solve_at(m0);
  Real g0 = o0.epsilon - epsilon;
  Real m1 = m0 * (Real(1) - g0 / epsilon);
  if (m1 == m0) return o0;
  ResonantOrbitData o1 = solve_at(m1);
  Real g1 = o1.epsilon - epsilon;
  const Real tol = ctx.residual_tol();
  for (int it = 0; it < 200; ++it) {
    if (abs(g1) < tol) return o1;
    Real denom = g1 - g0;
    if (denom.is_zero()) break;
    Real m2 = m1 - g1 * (m1 - m0) / denom;
    m0 = m1;
    g0 = g1;
    m1 = m2;
    o1 = solve_at(m1);
    g1 = o1.epsilon - epsilon;
  }
  if (abs(g1) < tol * 10) return o1;
  throw MapError("NewtonDivergence: mu_of_epsilon did not converge");
}

}  // namespace seplab
