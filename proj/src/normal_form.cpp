#include "seplab/normal_form.hpp"

#include <sstream>

#include "seplab/linalg.hpp"

namespace seplab {

namespace {

using Mat2 = std::array<std::array<Real, 2>, 2>;

RSeries lie(const RSeries& f, const RSeries& chi) { return lie_exp(f, chi, Real(0)); }

Mat2 matmul2(const Mat2& a, const Mat2& b) {
  Mat2 r;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
  return r;
}

Mat2 inverse2(const Mat2& a) {
  Real d = a[0][0] * a[1][1] - a[0][1] * a[1][0];
  return {{{a[1][1] / d, -a[0][1] / d}, {-a[1][0] / d, a[0][0] / d}}};
}

// out = M (c0, c1) for series components.
std::array<RSeries, 2> apply_matrix(const Mat2& m, const std::array<RSeries, 2>& c) {
  return {c[0] * m[0][0] + c[1] * m[0][1], c[0] * m[1][0] + c[1] * m[1][1]};
}

// Lie-operator image of the coordinate functions under A1 o ... o Ak where
// A_i = phi_{gens[i]}:  x o (A1 o ... o Ak) = exp(L_k) ... exp(L_1) x.
std::array<RSeries, 2> compose_flows(std::array<RSeries, 2> start, const std::vector<RSeries>& gens) {
  for (const auto& g : gens) {
    if (g.is_zero()) continue;
    start = {lie(start[0], g), lie(start[1], g)};
  }
  return start;
}

bool resonant(int a, int b) { return ((a - b) % 3 + 3) % 3 == 0; }

// Whether the coefficient of z^a zbar^b mu^m (a >= b, resonant) must vanish
// in the normal form; `imag` selects the imaginary part.
bool excluded(int a, int b, bool imag) {
  if (a == b) return imag || (a % 3 == 2);
  if (a - b == 3) return imag || (b % 3 == 2);
  return true;
}

// Log step: extends G (degrees <= k_start known) so that phi_G matches h
// through map degree `order`.
RSeries extend_log(const std::array<RSeries, 2>& h, RSeries G, int k_start, int order) {
  const int M = order + 1;
  const int nv = 3;
  for (int k = k_start; k <= order; ++k) {
    RSeries Gk = G.with_order(k);
    RSeries xk = RSeries::variable(nv, k, 0), yk = RSeries::variable(nv, k, 1);
    RSeries Kx = lie(xk, Gk), Ky = lie(yk, Gk);
    RSeries rx = h[0].with_order(k).homogeneous(k) - Kx.homogeneous(k);
    RSeries ry = h[1].with_order(k).homogeneous(k) - Ky.homogeneous(k);
    if (k == 1) {
      if (rx.max_abs() > pow10(-bits_to_digits(working_precision()) / 2) ||
          ry.max_abs() > pow10(-bits_to_digits(working_precision()) / 2))
        throw NormalFormError("log_map: map is not tangent to the identity");
      continue;
    }
    // G_{k+1} from (dG/dy, -dG/dx) = (rx, ry):  (i + j) c = [y rx - x ry].
    RSeries rxw = rx.with_order(M), ryw = ry.with_order(M);
    const MonomialTable& t = rxw.table();
    RSeries add(nv, M);
    for (int idx = t.degree_begin(k); idx < t.degree_begin(k + 1); ++idx) {
      if (!rxw[idx].is_zero()) {
        int up = t.raise(idx, 1);
        add[up] += rxw[idx];
      }
      if (!ryw[idx].is_zero()) {
        int up = t.raise(idx, 0);
        add[up] -= ryw[idx];
      }
    }
    for (int idx = t.degree_begin(k + 1); idx < t.degree_begin(k + 2); ++idx) {
      if (add[idx].is_zero()) continue;
      const Exponents& e = t.exps(idx);
      int w = e[0] + e[1];
      if (w == 0) continue;
      add[idx] /= static_cast<long>(w);
    }
    G += add.with_order(G.order());
  }
  return G;
}

template <class S>
S eval_real_series(const RSeries& s, const S& x, const S& y, const Real& mu) {
  const MonomialTable& t = s.table();
  const int ord = s.order();
  std::vector<S> px(ord + 1), py(ord + 1);
  std::vector<Real> pm(ord + 1);
  px[0] = S(1);
  py[0] = S(1);
  pm[0] = Real(1);
  for (int k = 1; k <= ord; ++k) {
    px[k] = px[k - 1] * x;
    py[k] = py[k - 1] * y;
    pm[k] = pm[k - 1] * mu;
  }
  S acc(0);
  for (int i = 0; i < s.size(); ++i) {
    if (s[i].is_zero()) continue;
    const Exponents& e = t.exps(i);
    acc += px[e[0]] * py[e[1]] * (s[i] * pm[e[2]]);
  }
  return acc;
}

}  // namespace

std::array<std::array<Real, 2>, 2> rotation_matrix(int sign) {
  Real c = Real::ratio(-1, 2);
  Real s = sqrt(Real(3)) / 2;
  if (sign < 0) s = -s;
  return {{{c, -s}, {s, c}}};
}

CSeries to_complex_basis(const RSeries& s) {
  CSeries c(s.nvars(), s.order());
  for (int i = 0; i < s.size(); ++i)
    if (!s[i].is_zero()) c[i] = Complex(s[i]);
  Real h = Real::ratio(1, 2);
  // x = (z + zbar)/2, y = (z - zbar)/(2i)
  std::array<std::array<Complex, 2>, 2> m = {{{Complex(h), Complex(h)}, {Complex(Real(0), -h), Complex(Real(0), h)}}};
  return linear_substitute(c, m);
}

RSeries from_complex_basis(const CSeries& s) {
  std::array<std::array<Complex, 2>, 2> m = {
      {{Complex(1), Complex(Real(0), Real(1))}, {Complex(1), Complex(Real(0), Real(-1))}}};
  CSeries r = linear_substitute(s, m);
  RSeries out(s.nvars(), s.order());
  for (int i = 0; i < r.size(); ++i) out[i] = r[i].re;
  return out;
}

std::array<RSeries, 2> time_one_map(const RSeries& H, int order) {
  // Degree-d terms of the flow need H through degree d + 1.
  RSeries h = H.with_order(order + 1);
  return {lie(RSeries::variable(3, order + 1, 0), h).with_order(order),
          lie(RSeries::variable(3, order + 1, 1), h).with_order(order)};
}

RSeries log_map(const std::array<RSeries, 2>& h, int order) {
  return extend_log(h, RSeries(3, order + 1), 1, order);
}

NormalFormData normalize(const PolyMapFamily& fam, int N, const PrecisionContext& ctx) {
  if (N < 3) throw NormalFormError("normalize: order must be at least 3");
  const int M = N + 1;
  const Real tol = ctx.zero_tol();
  NormalFormData nf;
  nf.order = N;

  // Linear part at mu = 0 and a symplectic basis in which it is a rotation.
  auto lin = [&](int c, int v) {
    Exponents e{};
    e[v] = 1;
    return fam.comps[c].coeff(e);
  };
  Mat2 L0 = {{{lin(0, 0), lin(0, 1)}, {lin(1, 0), lin(1, 1)}}};
  Real tr = L0[0][0] + L0[1][1];
  if (abs(tr + Real(1)) > ctx.residual_tol())
    throw NormalFormError("normalize: linear part at mu=0 is not at 1:3 resonance (trace " + tr.str(10) + ")");
  const Real alpha = const_pi() * 2 / 3;
  Mat2 T;
  int rot_sign = 0;
  for (int sgn : {1, -1}) {
    Complex lam = polar(Real(1), alpha * static_cast<long>(sgn));
    CVec2 v;
    if (!L0[0][1].is_zero())
      v = {Complex(L0[0][1]), lam - Complex(L0[0][0])};
    else
      v = {lam - Complex(L0[1][1]), Complex(L0[1][0])};
    Complex v0 = v[0];
    v[0] = v[0] / v0;
    v[1] = v[1] / v0;
    Real d = v[1].im;  // det [Re v, Im v] with v0 = 1
    if (d.sign() <= 0) continue;
    Real sc = sqrt(d);
    T = {{{Real(1) / sc, Real(0)}, {v[1].re / sc, v[1].im / sc}}};
    rot_sign = -sgn;  // L0 T = T R_{-beta} for eigenvalue e^{i beta}
    break;
  }
  if (rot_sign == 0) throw NormalFormError("normalize: could not build a symplectic rotation basis");
  nf.rotation_sign = rot_sign;
  Mat2 R = rotation_matrix(rot_sign);
  Mat2 Rinv = rotation_matrix(-rot_sign);

  // h = R^{-1} o T^{-1} o f o T
  auto conj_linear = [&](const Mat2& TL) {
    std::array<RSeries, 2> c = {linear_substitute(fam.comps[0].with_order(M), TL),
                                linear_substitute(fam.comps[1].with_order(M), TL)};
    return apply_matrix(matmul2(Rinv, inverse2(TL)), c);
  };
  std::array<RSeries, 2> h = conj_linear(T);
  RSeries G = extend_log(h, RSeries(3, M), 1, N);

  // Rotation making the z^3 coefficient real and positive.
  {
    CSeries gc = to_complex_basis(G.homogeneous(3));
    Complex c3 = gc.coeff(Exponents{3, 0, 0, 0});
    if (abs(c3) < tol) throw NormalFormError("DegenerateResonance: cubic resonant coefficient vanishes");
    Real phi = -arg(c3) / 3;
    Mat2 rot = {{{cos(phi), -sin(phi)}, {sin(phi), cos(phi)}}};
    G = linear_substitute(G, rot);
    T = matmul2(T, rot);
  }

  std::vector<RSeries> chis;
  Real worst(0);
  RSeries G3;
  for (int D = 3; D <= M; ++D) {
    // Primary step: remove non-resonant monomials of degree D.
    CSeries gc = to_complex_basis(G.homogeneous(D));
    CSeries chic(3, M);
    bool any = false;
    const MonomialTable& ct = gc.table();
    for (int idx = ct.degree_begin(D); idx < ct.degree_begin(D + 1); ++idx) {
      const Exponents& e = ct.exps(idx);
      if (resonant(e[0], e[1]) || gc[idx].is_zero()) continue;
      Complex rot = polar(Real(1), alpha * static_cast<long>(rot_sign * (e[0] - e[1])));
      chic[idx] = -gc[idx] / (Complex(1) - rot);
      any = true;
    }
    if (any) {
      RSeries chi = from_complex_basis(chic);
      RSeries chiR = linear_substitute(chi, R);
      // h' = phi_{-chi o R} o phi_G o phi_chi
      std::array<RSeries, 2> xy = {RSeries::variable(3, M, 0), RSeries::variable(3, M, 1)};
      std::array<RSeries, 2> hn = compose_flows(xy, {-chiR, G, chi});
      RSeries Gn = G.degree_range(0, D - 1) + G.homogeneous(D) + chi - chiR;
      G = extend_log(hn, Gn, D, N);
      chis.push_back(chi);
    }
    if (D == 3) {
      G3 = G.homogeneous(3);
      CSeries g3c = to_complex_basis(G3);
      Real a01 = g3c.coeff(Exponents{1, 1, 1, 0}).re;
      if (abs(a01) < tol) throw NormalFormError("NonGenericUnfolding: a_{0,1} vanishes");
      continue;
    }
    // Secondary step: resonant chi of degree D-1 with
    // P_excluded(G_D + {G_3, chi}) = 0.
    std::vector<RSeries> basis;
    {
      const MonomialTable& t = chic.table();
      for (int idx = t.degree_begin(D - 1); idx < t.degree_begin(D); ++idx) {
        const Exponents& e = t.exps(idx);
        int a = e[0], b = e[1];
        if (a < b || !resonant(a, b) || (a == 0 && b == 0)) continue;
        CSeries u(3, M);
        if (a == b) {
          u[idx] = Complex(1);
          basis.push_back(from_complex_basis(u));
          continue;
        }
        int cj = t.index(Exponents{b, a, e[2], 0});
        u[idx] = Complex(1);
        u[cj] = Complex(1);
        basis.push_back(from_complex_basis(u));
        CSeries v(3, M);
        v[idx] = Complex(Real(0), Real(1));
        v[cj] = Complex(Real(0), Real(-1));
        basis.push_back(from_complex_basis(v));
      }
    }
    // Excluded functionals on degree-D complex coefficients.
    struct Row {
      int idx;
      bool imag;
    };
    std::vector<Row> rows;
    const MonomialTable& t = gc.table();
    for (int idx = t.degree_begin(D); idx < t.degree_begin(D + 1); ++idx) {
      const Exponents& e = t.exps(idx);
      int a = e[0], b = e[1];
      if (a < b || !resonant(a, b) || (a == 0 && b == 0)) continue;
      if (excluded(a, b, false)) rows.push_back({idx, false});
      if (a != b && excluded(a, b, true)) rows.push_back({idx, true});
    }
    if (rows.empty() || basis.empty()) continue;
    CSeries gD = to_complex_basis(G.homogeneous(D));
    RMatrix A(static_cast<int>(rows.size()), static_cast<int>(basis.size()));
    std::vector<Real> rhs(rows.size());
    for (size_t j = 0; j < basis.size(); ++j) {
      CSeries img = to_complex_basis(poisson(G3, basis[j]).homogeneous(D));
      for (size_t r = 0; r < rows.size(); ++r)
        A(static_cast<int>(r), static_cast<int>(j)) = rows[r].imag ? img[rows[r].idx].im : img[rows[r].idx].re;
    }
    for (size_t r = 0; r < rows.size(); ++r) rhs[r] = -(rows[r].imag ? gD[rows[r].idx].im : gD[rows[r].idx].re);
    Real incons;
    std::vector<Real> sol = solve_echelon(A, rhs, tol, &incons);
    worst = max(worst, incons);
    if (incons > pow10(-ctx.digits / 2))
      throw NormalFormError("normalize: secondary homological system is inconsistent at degree " +
                            std::to_string(D));
    RSeries chi(3, M);
    bool nz = false;
    for (size_t j = 0; j < basis.size(); ++j) {
      if (sol[j].is_zero()) continue;
      chi += basis[j] * sol[j];
      nz = true;
    }
    if (!nz) continue;
    G = lie(G, chi);
    chis.push_back(chi);
  }
  nf.max_inconsistency = worst;
  nf.H = G;

  // Coefficient tables.
  CSeries hc = to_complex_basis(G);
  const MonomialTable& t = hc.table();
  for (int idx = 0; idx < hc.size(); ++idx) {
    const Exponents& e = t.exps(idx);
    int a = e[0], b = e[1], m = e[2];
    if (a == b && a >= 1) {
      if ((a - 1) % 3 != 1) nf.a[{a - 1, m}] = hc[idx].re;
    } else if (a - b == 3) {
      if (b % 3 != 2) nf.b[{b, m}] = hc[idx].re;
    }
  }
  nf.b00 = nf.b[{0, 0}] * 6;
  nf.b[{0, 0}] = nf.b00;
  nf.a01 = nf.a[{0, 1}];

  // Transforms: Psi = T o phi_chi1 o ... o phi_chik, Phi = Psi^{-1}.
  {
    std::array<RSeries, 2> lin_fwd = {
        RSeries::variable(3, N, 0) * T[0][0] + RSeries::variable(3, N, 1) * T[0][1],
        RSeries::variable(3, N, 0) * T[1][0] + RSeries::variable(3, N, 1) * T[1][1]};
    std::vector<RSeries> gens;
    for (const auto& c : chis) gens.push_back(c.with_order(N));
    nf.to_original = compose_flows(lin_fwd, gens);
    std::vector<RSeries> neg;
    for (auto it = gens.rbegin(); it != gens.rend(); ++it) neg.push_back(-*it);
    std::array<RSeries, 2> xy = {RSeries::variable(3, N, 0), RSeries::variable(3, N, 1)};
    std::array<RSeries, 2> inv = compose_flows(xy, neg);
    Mat2 Ti = inverse2(T);
    nf.to_normal = {linear_substitute(inv[0], Ti), linear_substitute(inv[1], Ti)};
  }

  // Normalized family R o phi_H through order N.
  {
    auto flow = time_one_map(G, N);
    PolyMapFamily nfam;
    nfam.name = fam.name + "-normal-form";
    nfam.description = "normal form R o phi_H of " + fam.name + " through order " + std::to_string(N);
    nfam.comps = apply_matrix(R, flow);
    nf.normalized_family = nfam;
  }
  return nf;
}

RSeries normal_form_hamiltonian(const NormalFormData& nf) {
  const int M = nf.order + 1;
  CSeries hc(3, M);
  const MonomialTable& t = hc.table();
  for (const auto& [km, v] : nf.a) {
    int idx = t.index(Exponents{km.first + 1, km.first + 1, km.second, 0});
    if (idx >= 0) hc[idx] = Complex(v);
  }
  for (const auto& [km, v0] : nf.b) {
    Real v = (km.first == 0 && km.second == 0) ? v0 / 6 : v0;
    int i1 = t.index(Exponents{km.first + 3, km.first, km.second, 0});
    int i2 = t.index(Exponents{km.first, km.first + 3, km.second, 0});
    if (i1 >= 0) hc[i1] = Complex(v);
    if (i2 >= 0) hc[i2] = Complex(v);
  }
  return from_complex_basis(hc);
}

std::array<RVec2, 3> predicted_saddles_normal(const NormalFormData& nf, const Real& mu) {
  Real am = nf.a01 * mu;
  Real r = abs(am) * 2 / nf.b00;
  Real base = am.sign() > 0 ? const_pi() / 3 : Real(0);
  std::array<RVec2, 3> out;
  for (int k = 0; k < 3; ++k) {
    Real ang = base + const_pi() * (2 * k) / 3;
    out[k] = {r * cos(ang), r * sin(ang)};
  }
  return out;
}

std::array<RVec2, 3> predicted_saddles(const NormalFormData& nf, const Real& mu) {
  auto pn = predicted_saddles_normal(nf, mu);
  std::array<RVec2, 3> out;
  for (int k = 0; k < 3; ++k) out[k] = apply_transform(nf.to_original, pn[k], mu);
  return out;
}

Real predicted_epsilon(const NormalFormData& nf, const Real& mu) {
  return sqrt(Real(3)) * 6 * abs(nf.a01 * mu);
}

Real predicted_mu(const NormalFormData& nf, const Real& epsilon, int branch) {
  Real m = epsilon / (sqrt(Real(3)) * 6 * abs(nf.a01));
  return branch < 0 ? -m : m;
}

RVec2 apply_transform(const std::array<RSeries, 2>& t, const RVec2& p, const Real& mu) {
  return {eval_real_series(t[0], p[0], p[1], mu), eval_real_series(t[1], p[0], p[1], mu)};
}

CVec2 apply_transform(const std::array<RSeries, 2>& t, const CVec2& p, const Real& mu) {
  return {eval_real_series(t[0], p[0], p[1], mu), eval_real_series(t[1], p[0], p[1], mu)};
}

std::string coefficient_csv(const NormalFormData& nf) {
  std::ostringstream os;
  os << "kind,k,m,value\n";
  long digits = bits_to_digits(working_precision());
  for (const auto& [km, v] : nf.a) os << "a," << km.first << ',' << km.second << ',' << v.str(digits) << '\n';
  for (const auto& [km, v] : nf.b) os << "b," << km.first << ',' << km.second << ',' << v.str(digits) << '\n';
  return os.str();
}

}  // namespace seplab
