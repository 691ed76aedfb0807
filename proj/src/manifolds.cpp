#include "seplab/manifolds.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "seplab/linalg.hpp"

namespace seplab {

PlanePoly plane_poly_at(const std::array<RSeries, 2>& comps, const Real& mu) {
  PlanePoly p;
  for (int c = 0; c < 2; ++c) {
    const RSeries& s = comps[c];
    const MonomialTable& t = s.table();
    for (int idx = 0; idx < s.size(); ++idx) {
      if (s[idx].is_zero()) continue;
      const Exponents& e = t.exps(idx);
      Real v = s[idx] * pow(mu, static_cast<long>(e[2]));
      auto it = std::find_if(p.comps[c].begin(), p.comps[c].end(),
                             [&](const PlaneTerm& q) { return q.i == e[0] && q.j == e[1]; });
      if (it == p.comps[c].end())
        p.comps[c].push_back({e[0], e[1], v});
      else
        it->c += v;
      p.degree = std::max(p.degree, e[0] + e[1]);
    }
  }
  return p;
}

namespace {

// Coefficient-by-coefficient evaluation of a planar polynomial on a pair of
// power series.  Coefficient n may be recomputed after inputs at index n
// change, as long as all lower coefficients are final.
class SeriesStage {
 public:
  SeriesStage(const PlanePoly& f, int order) : f_(f), order_(order) {
    const int d = std::max(f.degree, 1);
    xp_.assign(d + 1, std::vector<Real>(order + 1, Real(0)));
    yp_.assign(d + 1, std::vector<Real>(order + 1, Real(0)));
    xp_[0][0] = Real(1);
    yp_[0][0] = Real(1);
    out_[0].assign(order + 1, Real(0));
    out_[1].assign(order + 1, Real(0));
  }
  // Inputs X = xp_[1], Y = yp_[1].
  void set_input(int n, const Real& x, const Real& y) {
    xp_[1][n] = x;
    yp_[1][n] = y;
  }
  void compute(int n) {
    const int d = static_cast<int>(xp_.size()) - 1;
    for (int i = 2; i <= d; ++i) {
      xp_[i][n] = conv(xp_[i - 1], xp_[1], n);
      yp_[i][n] = conv(yp_[i - 1], yp_[1], n);
    }
    for (int c = 0; c < 2; ++c) {
      Real acc(0);
      for (const auto& t : f_.comps[c]) acc.fma_acc(t.c, conv(xp_[t.i], yp_[t.j], n));
      out_[c][n] = acc;
    }
  }
  const Real& out(int c, int n) const { return out_[c][n]; }

 private:
  static Real conv(const std::vector<Real>& a, const std::vector<Real>& b, int n) {
    Real acc(0);
    for (int m = 0; m <= n; ++m) {
      if (a[m].is_zero() || b[n - m].is_zero()) continue;
      acc.fma_acc(a[m], b[n - m]);
    }
    return acc;
  }
  const PlanePoly& f_;
  int order_;
  std::vector<std::vector<Real>> xp_, yp_;
  std::array<std::vector<Real>, 2> out_;
};

// F = f o f o f on series, one coefficient at a time.
class ThirdIterateSeries {
 public:
  ThirdIterateSeries(const PlanePoly& f, int order) {
    for (int k = 0; k < 3; ++k) st_.emplace_back(f, order);
  }
  RVec2 compute(int n, const RVec2& input) {
    st_[0].set_input(n, input[0], input[1]);
    for (int k = 0; k < 3; ++k) {
      st_[k].compute(n);
      if (k < 2) st_[k + 1].set_input(n, st_[k].out(0, n), st_[k].out(1, n));
    }
    return {st_[2].out(0, n), st_[2].out(1, n)};
  }

 private:
  std::vector<SeriesStage> st_;
};

RVec2 solve2(const Real& a, const Real& b, const Real& c, const Real& d, const RVec2& r) {
  Real det = a * d - b * c;
  if (det.is_zero()) throw ManifoldError("singular 2x2 system");
  return {(d * r[0] - b * r[1]) / det, (a * r[1] - c * r[0]) / det};
}

Real norm2(const RVec2& v) { return sqrt(v[0] * v[0] + v[1] * v[1]); }
Real cnorm(const CVec2& v) { return max(abs(v[0]), abs(v[1])); }

CVec2 to_c(const RVec2& v) { return {Complex(v[0]), Complex(v[1])}; }

double log10_of(const Real& x) {
  if (x.is_zero()) return -1e300;
  return log(abs(x)).to_double() / std::log(10.0);
}

}  // namespace

SaddleParameterization parameterize_saddle(const PlanePoly& f, const RVec2& point,
                                           const RVec2& tangent, const Real& lambda, Side side,
                                           int order, const PrecisionContext& ctx) {
  if (order < 2) throw ManifoldError("parameterization order must be at least 2");
  SaddleParameterization k;
  k.side = side;
  k.lambda = lambda;
  k.coeffs.assign(order + 1, RVec2{Real(0), Real(0)});
  k.coeffs[0] = point;
  k.coeffs[1] = tangent;
  ThirdIterateSeries F(f, order);
  F.compute(0, point);
  F.compute(1, tangent);
  // Columns of DF at the saddle: order-1 images of the unit vectors.
  auto jac_col = [&](int v) {
    ThirdIterateSeries G(f, 1);
    G.compute(0, point);
    RVec2 e{Real(v == 0 ? 1 : 0), Real(v == 1 ? 1 : 0)};
    return G.compute(1, e);
  };
  RVec2 c0 = jac_col(0), c1 = jac_col(1);
  Real mult = side == Side::unstable ? lambda : Real(1) / lambda;
  Real lp = mult;
  for (int n = 2; n <= order; ++n) {
    lp *= mult;
    RVec2 R = F.compute(n, RVec2{Real(0), Real(0)});
    // (mult^n I - DF) K_n = R
    RVec2 kn = solve2(lp - c0[0], -c1[0], -c0[1], lp - c1[1], R);
    k.coeffs[n] = kn;
    F.compute(n, kn);
  }
  // Growth rate and evaluation radius.
  const Real k1 = norm2(tangent);
  double g = 0;
  for (int n = std::max(2, order / 2); n <= order; ++n) {
    double l = (log10_of(norm2(k.coeffs[n])) - log10_of(k1)) / (n - 1);
    g = std::max(g, l);
  }
  double amp = 0;  // log10 A with |K_n| <= A 10^{g n}
  for (int n = 1; n <= order; ++n) amp = std::max(amp, log10_of(norm2(k.coeffs[n])) - g * n);
  const double target = -(static_cast<double>(ctx.digits) + 5);
  double logr = (target - amp) / (order + 1) - g;
  logr = std::min(logr, -g - std::log10(2.0));
  k.radius = pow10(0) * Real(std::pow(10.0, logr));
  // Residual check on a few points of the circle |s| = radius.
  Real worst(0);
  for (int q = 0; q < 4; ++q) {
    Complex s = polar(k.radius, const_pi() * 2 * q / 4 + Real::ratio(1, 7));
    auto evalK = [&](const Complex& z) {
      CVec2 acc{Complex(0), Complex(0)};
      for (int n = order; n >= 0; --n)
        for (int c = 0; c < 2; ++c) acc[c] = acc[c] * z + Complex(k.coeffs[n][c]);
      return acc;
    };
    CVec2 w = evalK(s);
    for (int it = 0; it < 3; ++it) {
      CVec2 nw{Complex(0), Complex(0)};
      for (int c = 0; c < 2; ++c)
        for (const auto& t : f.comps[c]) nw[c] += pow(w[0], t.i) * pow(w[1], t.j) * t.c;
      w = nw;
    }
    CVec2 target_pt = evalK(s * mult);
    worst = max(worst, cnorm(CVec2{w[0] - target_pt[0], w[1] - target_pt[1]}));
  }
  k.seed_residual = worst;
  return k;
}

// ------------------------------------------------------------------ Manifold

Manifold::Manifold(std::shared_ptr<const MapEvaluator> ev, SaddleParameterization k, Real epsilon,
                   Real scale)
    : ev_(std::move(ev)), k_(std::move(k)), eps_(std::move(epsilon)), c_(std::move(scale)) {
  amp_limit_ = 0.5 * static_cast<double>(bits_to_digits(working_precision()));
}

void Manifold::shift_phase(const Real& shift) {
  if (k_.side == Side::unstable)
    c_ = c_ * exp(eps_ * shift);
  else
    c_ = c_ * exp(-eps_ * shift);
}

CVec2 Manifold::evaluate(const Complex& tau, CVec2* deriv, int extra_steps) const {
  if (!ev_) throw ManifoldError("evaluate on an empty manifold");
  if (max_im_ >= Real(0) && abs(tau.im) > max_im_)
    throw ManifoldError("OutOfDomain: |Im tau| = " + abs(tau.im).str(6) + " exceeds " + max_im_.str(6));
  const bool unstable = k_.side == Side::unstable;
  // s = c exp(+-eps tau), reduced by lambda^k into the disk |s| <= radius.
  Real logs = log(c_) + (unstable ? eps_ * tau.re : -(eps_ * tau.re));
  Real ratio = (logs - log(k_.radius)) / eps_;
  long k = 0;
  if (ratio > Real(0)) k = ceil(ratio).to_long();
  k += std::max(0, extra_steps);
  Complex shifted = unstable ? Complex(tau.re - Real(k), tau.im) : Complex(tau.re + Real(k), tau.im);
  Complex s = unstable ? exp(shifted * eps_) * c_ : exp(shifted * (-eps_)) * c_;
  const auto& K = k_.coeffs;
  const int order = static_cast<int>(K.size()) - 1;
  CVec2 w{Complex(0), Complex(0)}, dw{Complex(0), Complex(0)};
  for (int n = order; n >= 0; --n)
    for (int c = 0; c < 2; ++c) w[c] = w[c] * s + Complex(K[n][c]);
  for (int n = order; n >= 1; --n)
    for (int c = 0; c < 2; ++c) dw[c] = dw[c] * s + Complex(K[n][c] * static_cast<long>(n));
  Complex fac = s * (unstable ? eps_ : -eps_);
  CVec2 v{dw[0] * fac, dw[1] * fac};
  Real v0 = cnorm(v);
  for (long it = 0; it < k; ++it) {
    CMat2 j;
    w = unstable ? ev_->F(w, &j) : ev_->Finv(w, &j);
    v = matvec(j, v);
    if (!w[0].is_finite() || !w[1].is_finite())
      throw ManifoldError("PrecisionExhausted: orbit overflow at tau = " + tau.re.str(8));
  }
  stats_->last_iter.store(static_cast<int>(k));
  if (!v0.is_zero()) {
    double a = log10_of(cnorm(v)) - log10_of(v0);
    // Growth of the tangent relative to the growth of the point itself is the
    // forward-error amplification.
    double pt = log10_of(cnorm(CVec2{w[0] - Complex(K[0][0]), w[1] - Complex(K[0][1])})) -
                log10_of(abs(s) * norm2(K[1]));
    double amp = std::max(0.0, a - pt);
    double cur = stats_->max_amp.load();
    while (amp > cur && !stats_->max_amp.compare_exchange_weak(cur, amp)) {
    }
    if (amp > amp_limit_)
      throw ManifoldError("PrecisionExhausted: amplification 10^" + std::to_string(static_cast<int>(amp)));
  }
  if (deriv) *deriv = v;
  return w;
}

RVec2 Manifold::evaluate_real(const Real& tau, RVec2* deriv) const {
  CVec2 d;
  CVec2 w = evaluate(Complex(tau), deriv ? &d : nullptr);
  if (deriv) *deriv = {d[0].re, d[1].re};
  return {w[0].re, w[1].re};
}

// ------------------------------------------------------------- construction

Real section_value(const ManifoldPair& mp, const RVec2& w) {
  return apply_transform(mp.to_normal, w, mp.mu)[1];
}

namespace {

RVec2 eigenvector(const CMat2& J, const Real& ev) {
  Real a = J[0][0].re - ev, b = J[0][1].re, c = J[1][0].re, d = J[1][1].re - ev;
  RVec2 v1{b, -a}, v2{d, -c};
  RVec2 v = norm2(v1) > norm2(v2) ? v1 : v2;
  Real n = norm2(v);
  return {v[0] / n, v[1] / n};
}

// First sign change of the section along W starting near the saddle, then
// Illinois refinement.
Real find_crossing(const ManifoldPair& mp, const Manifold& m, const PrecisionContext& ctx) {
  const bool unstable = m.side() == Side::unstable;
  const Real& eps = m.epsilon();
  // Start at |s| = radius / 10.
  Real t0 = (log(m.parameterization().radius / 10) - log(m.scale())) / eps;
  if (!unstable) t0 = -t0;
  Real step = unstable ? Real(1) : Real(-1);
  auto g = [&](const Real& t) { return section_value(mp, m.evaluate_real(t)); };
  Real a = t0, ga = g(a);
  Real b, gb;
  const int max_steps = static_cast<int>(40.0 / eps.to_double()) + 200;
  bool found = false;
  for (int i = 0; i < max_steps; ++i) {
    b = a + step;
    gb = g(b);
    if (ga.sign() * gb.sign() <= 0) {
      found = true;
      break;
    }
    a = b;
    ga = gb;
  }
  if (!found) throw ManifoldError("separatrix does not cross the symmetry axis");
  const Real tol = ctx.residual_tol();
  int side = 0;
  for (int it = 0; it < 400; ++it) {
    Real c = b - gb * (b - a) / (gb - ga);
    Real gc = g(c);
    if (gc.is_zero() || abs(b - a) < tol) return c;
    if (gc.sign() == gb.sign()) {
      b = c;
      gb = gc;
      if (side == -1) ga /= 2;
      side = -1;
    } else {
      a = c;
      ga = gc;
      if (side == 1) gb /= 2;
      side = 1;
    }
    if (abs(gc) < tol * tol) return c;
  }
  return b;
}

}  // namespace

ManifoldPair build_manifold_pair(const PolyMapFamily& f_in, const Real& epsilon,
                                 const PrecisionContext& ctx, const ManifoldOptions& opt,
                                 const NormalFormData* nf_in) {
  ContextScope scope(ctx);
  ManifoldPair mp;
  mp.family = f_in.at_working_precision();
  mp.branch = opt.branch >= 0 ? 1 : -1;
  NormalFormData own;
  if (!nf_in) {
    own = normalize(mp.family, opt.nf_order, ctx);
    nf_in = &own;
  }
  const NormalFormData& nf = *nf_in;
  mp.to_normal = nf.to_normal;
  Real mu0 = predicted_mu(nf, epsilon, mp.branch);
  OrbitPredictor pred = [&](const Real& mu) { return predicted_saddles(nf, mu)[0]; };
  mp.orbit = mu_of_epsilon(mp.family, epsilon, mu0, pred, ctx);
  mp.mu = mp.orbit.mu;
  mp.lambda = mp.orbit.lambda;
  mp.epsilon = log(mp.lambda);
  auto ev = std::make_shared<MapEvaluator>(mp.family, mp.mu);
  ev->set_inverse_tolerance(ctx.residual_tol() * pow10(-5));
  mp.ev = ev;

  // Drop the saddle closest to the normal-form horizontal axis.
  int drop = 0;
  Real best(-1);
  for (int k = 0; k < 3; ++k) {
    RVec2 z = apply_transform(nf.to_normal, mp.orbit.points[k], mp.mu);
    Real r = norm2(z);
    Real q = abs(z[1]) / r;
    if (best < Real(0) || q < best) {
      best = q;
      drop = k;
    }
  }
  std::array<RVec2, 2> pts;
  int idx = 0;
  for (int k = 0; k < 3; ++k)
    if (k != drop) pts[idx++] = mp.orbit.points[k];
  // Unstable end: unstable direction aligned with the side of the pair.
  int iu = 0;
  Real best_cos(-2);
  int best_sign = 1;
  std::array<RVec2, 2> eu, es;
  for (int i = 0; i < 2; ++i) {
    CMat2 J;
    ev->F(to_c(pts[i]), &J);
    eu[i] = eigenvector(J, mp.lambda);
    es[i] = eigenvector(J, Real(1) / mp.lambda);
    RVec2 d{pts[1 - i][0] - pts[i][0], pts[1 - i][1] - pts[i][1]};
    Real c = (eu[i][0] * d[0] + eu[i][1] * d[1]) / norm2(d);
    if (abs(c) > best_cos) {
      best_cos = abs(c);
      iu = i;
      best_sign = c.sign() >= 0 ? 1 : -1;
    }
  }
  mp.unstable_saddle = pts[iu];
  mp.stable_saddle = pts[1 - iu];
  RVec2 d{mp.stable_saddle[0] - mp.unstable_saddle[0], mp.stable_saddle[1] - mp.unstable_saddle[1]};
  Real L0 = norm2(d);
  RVec2 tu{eu[iu][0] * L0 * best_sign, eu[iu][1] * L0 * best_sign};
  RVec2 vs = es[1 - iu];
  Real sgs = (vs[0] * (-d[0]) + vs[1] * (-d[1])).sign() >= 0 ? Real(1) : Real(-1);
  RVec2 ts{vs[0] * L0 * sgs, vs[1] * L0 * sgs};

  const int order = opt.param_order > 0 ? opt.param_order : std::max<int>(30, static_cast<int>(ctx.digits / 2));
  PlanePoly fp = plane_poly_at(mp.family.comps, mp.mu);
  auto Ku = parameterize_saddle(fp, mp.unstable_saddle, tu, mp.lambda, Side::unstable, order, ctx);
  auto Ks = parameterize_saddle(fp, mp.stable_saddle, ts, mp.lambda, Side::stable, order, ctx);
  mp.W_minus = Manifold(ev, Ku, mp.epsilon, Real(1));
  mp.W_plus = Manifold(ev, Ks, mp.epsilon, Real(1));
  mp.tau_crossing_minus = find_crossing(mp, mp.W_minus, ctx);
  mp.W_minus.shift_phase(mp.tau_crossing_minus);
  mp.tau_crossing_plus = find_crossing(mp, mp.W_plus, ctx);
  mp.W_plus.shift_phase(mp.tau_crossing_plus);
  if (!opt.phase_shift.is_zero()) {
    mp.W_minus.shift_phase(opt.phase_shift);
    mp.W_plus.shift_phase(opt.phase_shift);
  }
  Real lim = const_pi() / mp.epsilon - opt.singularity_margin;
  mp.W_minus.set_domain_limit(lim);
  mp.W_plus.set_domain_limit(lim);
  return mp;
}

FormalSeed seed_from_formal(const FormalSeparatrix& fs, const NormalFormData& nf,
                            const Real& epsilon, Side side, const Real& frac,
                            const PrecisionContext& ctx) {
  ContextScope scope(ctx);
  const int n = fs.order;
  Real mu = mu_series(fs, n, epsilon);
  // The last computed order stands in for the truncation error.
  auto estimate = [&](const Real& tau) {
    CVec2 full = evaluate_formal(fs, n, epsilon, Complex(tau));
    CVec2 lower = evaluate_formal(fs, n - 1, epsilon, Complex(tau));
    return max(abs(full[0] - lower[0]), abs(full[1] - lower[1]));
  };
  const Real target = ctx.residual_tol() * 100;
  Real best_tau(0), best_err(-1);
  const int steps = static_cast<int>(60.0 / epsilon.to_double());
  for (int k = 0; k <= steps; ++k) {
    Real tau = Real(side == Side::unstable ? -k : k) + frac;
    Real e = estimate(tau);
    if (best_err < Real(0) || e < best_err) {
      best_err = e;
      best_tau = tau;
    }
    if (e < target) break;
  }
  if (best_err >= target)
    throw ManifoldError("SeedAccuracyUnreachable: outer series truncation error " + best_err.str(4) +
                        " exceeds " + target.str(4) + " at order " + std::to_string(n));
  CVec2 z = evaluate_formal(fs, n, epsilon, Complex(best_tau));
  RVec2 zn{z[0].re, z[1].re};
  return {apply_transform(nf.to_original, zn, mu), best_tau, best_err};
}

ContinuationPath continue_to_singularity(const Manifold& m, const Real& re_t, const Real& im_depth,
                                         int n_samples, const Real& lambda_margin) {
  if (im_depth < lambda_margin)
    throw ManifoldError("OutOfDomain: depth " + im_depth.str(6) + " is closer to the singularity than " +
                        lambda_margin.str(6));
  if (n_samples < 2) throw ManifoldError("continue_to_singularity needs at least two samples");
  ContinuationPath path;
  const Real top = const_pi() / m.epsilon() - im_depth;
  path.anchor = Complex(re_t, top);
  for (int j = 0; j < n_samples; ++j) {
    Real im = top * j / (n_samples - 1);
    PathSample ps;
    ps.tau = Complex(re_t, im);
    ps.value = m.evaluate(ps.tau, &ps.derivative);
    CVec2 prev = m.evaluate(Complex(re_t - Real(1), im));
    CVec2 img = m.map_forward(prev);
    ps.step_residual = max(abs(img[0] - ps.value[0]), abs(img[1] - ps.value[1]));
    path.samples.push_back(ps);
  }
  return path;
}

CVec2 inner_expansion(const SingularExpansion& se, const Real& epsilon, const Complex& t) {
  return {se.W_map[0].evaluate(epsilon, t), se.W_map[1].evaluate(epsilon, t)};
}

std::string manifold_samples_csv(const Manifold& m, const std::vector<Complex>& taus) {
  std::ostringstream os;
  long digits = bits_to_digits(working_precision());
  os << "tau_re,tau_im,x_re,x_im,y_re,y_im\n";
  for (const auto& t : taus) {
    CVec2 w = m.evaluate(t);
    os << t.re.str(digits) << ',' << t.im.str(digits) << ',' << w[0].re.str(digits) << ','
       << w[0].im.str(digits) << ',' << w[1].re.str(digits) << ',' << w[1].im.str(digits) << '\n';
  }
  return os.str();
}

// ------------------------------------------------------------ resonant map

namespace {

// Quadratic part q of F0 = f0^3 as a pair of real series in (x, y).
std::array<RSeries, 2> resonant_quadratic(const PolyMapFamily& f0) {
  PolyMapFamily t = third_iterate(f0, 2);
  std::array<RSeries, 2> q = {RSeries(3, 2), RSeries(3, 2)};
  for (int c = 0; c < 2; ++c) {
    const MonomialTable& tab = t.comps[c].table();
    for (int i = 0; i < t.comps[c].size(); ++i) {
      const Exponents& e = tab.exps(i);
      if (e[2] == 0 && e[0] + e[1] == 2) q[c].set(e, t.comps[c][i]);
    }
  }
  return q;
}

RVec2 eval_q(const std::array<RSeries, 2>& q, const RVec2& d) {
  RVec2 out;
  for (int c = 0; c < 2; ++c) out[c] = q[c].evaluate({d[0], d[1], Real(0)});
  return out;
}

}  // namespace

std::vector<RVec2> resonant_leading_candidates(const PolyMapFamily& f0_in, const PrecisionContext& ctx) {
  ContextScope scope(ctx);
  PolyMapFamily f0 = f0_in.at_working_precision();
  auto q = resonant_quadratic(f0);
  auto cross = [&](const Real& phi) {
    RVec2 d{cos(phi), sin(phi)};
    RVec2 v = eval_q(q, d);
    return v[0] * d[1] - v[1] * d[0];
  };
  const int N = 720;
  const Real pi = const_pi();
  std::vector<RVec2> out;
  // Half-step offset keeps exact roots such as phi = 0 off the grid.
  Real prev_phi = pi / (2 * N), prev = cross(prev_phi);
  for (int i = 1; i <= N; ++i) {
    Real phi = pi * (2 * i + 1) / (2 * N);
    Real c = cross(phi);
    if (prev.sign() * c.sign() < 0 || c.is_zero()) {
      Real a = prev_phi, b = phi, fa = prev, fb = c;
      for (int it = 0; it < 400 && !fb.is_zero(); ++it) {
        Real m = (a + b) / 2;
        if (abs(b - a) < ctx.residual_tol()) break;
        Real fm = cross(m);
        if (fm.sign() == fa.sign()) {
          a = m;
          fa = fm;
        } else {
          b = m;
          fb = fm;
        }
      }
      Real root = fb.is_zero() ? b : (a + b) / 2;
      RVec2 d{cos(root), sin(root)};
      RVec2 v = eval_q(q, d);
      Real lam = v[0] * d[0] + v[1] * d[1];
      if (abs(lam) > ctx.zero_tol()) {
        Real r = -Real(1) / lam;
        out.push_back({d[0] * r, d[1] * r});
      }
    }
    prev_phi = phi;
    prev = c;
  }
  if (out.empty()) throw ManifoldError("DegenerateResonance: no direction with q(a) = -a");
  return out;
}

ResonantSeries resonant_formal_series(const PolyMapFamily& f0_in, const RVec2& leading, int terms,
                                      const PrecisionContext& ctx) {
  ContextScope scope(ctx);
  if (terms < 4) throw ManifoldError("resonant series needs at least 4 terms");
  PolyMapFamily f0 = f0_in.at_working_precision();
  PlanePoly fp = plane_poly_at(f0.comps, Real(0));
  const int L = terms + 1;  // powers of u = 1/t up to L
  std::vector<RVec2> w(L + 1, RVec2{Real(0), Real(0)});
  w[1] = leading;
  // Binomial table for (1+u)^{-j}.
  std::vector<std::vector<Real>> binom(L + 1, std::vector<Real>(L + 1, Real(0)));
  for (int j = 1; j <= L; ++j) {
    Real c(1);
    for (int l = 0; j + l <= L; ++l) {
      binom[j][l] = c;
      c = c * static_cast<long>(-j - l) / static_cast<long>(l + 1);
    }
  }
  auto shifted_coeff = [&](int n) {
    RVec2 acc{Real(0), Real(0)};
    for (int j = 1; j <= n; ++j)
      for (int c = 0; c < 2; ++c) acc[c].fma_acc(w[j][c], binom[j][n - j]);
    return acc;
  };
  ThirdIterateSeries F(fp, L);
  F.compute(0, RVec2{Real(0), Real(0)});
  F.compute(1, w[1]);
  RVec2 a = leading;
  for (int k = 2; k < L; ++k) {
    // Residual at u^{k+1} is affine in w_k (w_{k+1} cancels); probe it.
    auto residual = [&](const RVec2& wk) {
      w[k] = wk;
      w[k + 1] = {Real(0), Real(0)};
      F.compute(k, wk);
      RVec2 Fk1 = F.compute(k + 1, w[k + 1]);
      RVec2 s = shifted_coeff(k + 1);
      return RVec2{s[0] - Fk1[0], s[1] - Fk1[1]};
    };
    RVec2 r0 = residual({Real(0), Real(0)});
    RVec2 r1 = residual({Real(1), Real(0)});
    RVec2 r2 = residual({Real(0), Real(1)});
    Real m00 = r1[0] - r0[0], m10 = r1[1] - r0[1], m01 = r2[0] - r0[0], m11 = r2[1] - r0[1];
    RVec2 sol;
    if (k == 2) {
      // Time-shift freedom: the kernel is spanned by a; take w_2 orthogonal to a.
      RVec2 p{-a[1], a[0]};
      RVec2 Mp{m00 * p[0] + m01 * p[1], m10 * p[0] + m11 * p[1]};
      Real c = -(Mp[0] * r0[0] + Mp[1] * r0[1]) / (Mp[0] * Mp[0] + Mp[1] * Mp[1]);
      Real res = max(abs(Mp[0] * c + r0[0]), abs(Mp[1] * c + r0[1]));
      if (res > ctx.zero_tol() * pow10(10))
        throw ManifoldError("resonant series: incompatible order-2 equation (residual " + res.str(4) + ")");
      sol = {p[0] * c, p[1] * c};
    } else {
      sol = solve2(m00, m01, m10, m11, RVec2{-r0[0], -r0[1]});
    }
    w[k] = sol;
    F.compute(k, sol);
  }
  ResonantSeries out;
  out.leading = leading;
  out.w.assign(L, CVec2{Complex(0), Complex(0)});
  for (int k = 1; k < L; ++k) out.w[k] = to_c(w[k]);
  return out;
}

ResonantManifolds::ResonantManifolds(const PolyMapFamily& f0, ResonantSeries series, int shift, int terms)
    : series_(std::move(series)), shift_(shift), terms_(terms) {
  ev_ = std::make_shared<MapEvaluator>(f0.at_working_precision(), Real(0));
  if (terms_ >= static_cast<int>(series_.w.size()))
    terms_ = static_cast<int>(series_.w.size()) - 1;
}

CVec2 ResonantManifolds::eval_series(const Complex& t, CVec2* deriv) const {
  Complex u = Complex(1) / t;
  CVec2 w{Complex(0), Complex(0)}, d{Complex(0), Complex(0)};
  for (int k = terms_; k >= 1; --k)
    for (int c = 0; c < 2; ++c) {
      w[c] = w[c] + series_.w[k][c];
      if (k > 1) w[c] = w[c] * u;
    }
  // w currently holds sum w_k u^{k-1}; multiply by u.
  for (int c = 0; c < 2; ++c) w[c] = w[c] * u;
  if (deriv) {
    // dW/dt = -sum k w_k u^{k+1}
    for (int k = terms_; k >= 1; --k)
      for (int c = 0; c < 2; ++c) {
        d[c] = d[c] + series_.w[k][c] * Real(k);
        if (k > 1) d[c] = d[c] * u;
      }
    Complex u2 = -(u * u);
    *deriv = {d[0] * u2, d[1] * u2};
  }
  return w;
}

CVec2 ResonantManifolds::W_minus(const Complex& t, CVec2* deriv) const {
  CVec2 v;
  CVec2 w = eval_series(t - Complex(shift_), deriv ? &v : nullptr);
  for (int k = 0; k < shift_; ++k) {
    CMat2 j;
    w = ev_->F(w, deriv ? &j : nullptr);
    if (deriv) v = matvec(j, v);
  }
  if (deriv) *deriv = v;
  return w;
}

CVec2 ResonantManifolds::W_plus(const Complex& t, CVec2* deriv) const {
  CVec2 v;
  CVec2 w = eval_series(t + Complex(shift_), deriv ? &v : nullptr);
  for (int k = 0; k < shift_; ++k) {
    CMat2 j;
    w = ev_->Finv(w, deriv ? &j : nullptr);
    if (deriv) v = matvec(j, v);
  }
  if (deriv) *deriv = v;
  return w;
}

Real ResonantManifolds::residual(const Complex& t, Side side) const {
  CVec2 a = side == Side::unstable ? W_minus(t) : W_plus(t);
  CVec2 b = side == Side::unstable ? W_minus(t + Complex(1)) : W_plus(t + Complex(1));
  CVec2 fa = ev_->F(a);
  return max(abs(fa[0] - b[0]), abs(fa[1] - b[1]));
}

std::vector<ResonantSample> resonant_manifolds(const ResonantManifolds& rm,
                                               const std::vector<Complex>& t_grid) {
  std::vector<ResonantSample> out;
  for (const auto& t : t_grid) {
    // Common part of the two sectors: away from the real axis.
    if (abs(t.im) < Real(2))
      throw ManifoldError("SectorViolation: |Im t| < 2 at t = " + t.re.str(6) + " + " + t.im.str(6) + "i");
    ResonantSample s;
    s.t = t;
    s.minus = rm.W_minus(t);
    s.plus = rm.W_plus(t);
    s.residual_minus = rm.residual(t, Side::unstable);
    s.residual_plus = rm.residual(t, Side::stable);
    out.push_back(s);
  }
  return out;
}

}  // namespace seplab
