#include "seplab/splitting.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <sstream>

#include "seplab/linalg.hpp"

namespace seplab {

namespace {

Real cvec_norm(const CVec2& v) { return max(abs(v[0]), abs(v[1])); }

long current_digits() { return bits_to_digits(working_precision()); }

Real frac_part(const Real& x) { return x - floor(x); }

}  // namespace

Complex splitting_function(const ManifoldPair& mp, const Complex& tau, ThetaDetail* detail) {
  CVec2 dm;
  CVec2 wm = mp.W_minus.evaluate(tau, &dm);
  CVec2 wp = mp.W_plus.evaluate(tau);
  CVec2 delta{wp[0] - wm[0], wp[1] - wm[1]};
  if (detail) *detail = {delta, dm};
  return symplectic_form(delta, dm);
}

Real splitting_function_real(const ManifoldPair& mp, const Real& tau) {
  return splitting_function(mp, Complex(tau)).re;
}

std::vector<std::pair<Real, Real>> zero_brackets(const ManifoldPair& mp, int samples, const Real& start) {
  if (samples < 4) throw SplittingError("zero_brackets needs at least 4 samples");
  std::vector<Real> t(samples + 1), v(samples + 1);
  for (int j = 0; j <= samples; ++j) {
    t[j] = start + Real::ratio(j, samples);
    v[j] = splitting_function_real(mp, t[j]);
  }
  std::vector<std::pair<Real, Real>> out;
  for (int j = 0; j < samples; ++j)
    if (v[j].sign() * v[j + 1].sign() < 0 || (v[j].is_zero() && j > 0)) out.emplace_back(t[j], t[j + 1]);
  return out;
}

HomoclinicPoint find_homoclinic(const ManifoldPair& mp, const Real& a_in, const Real& b_in) {
  Real a = a_in, b = b_in;
  Real fa = splitting_function_real(mp, a), fb = splitting_function_real(mp, b);
  if (fa.sign() * fb.sign() > 0)
    throw SplittingError("NoSignChange: Theta^- has the same sign at " + a.str(8) + " and " + b.str(8));
  const Real amplitude = max(abs(fa), abs(fb));
  const Real xtol = pow10(-(current_digits() - 5));
  // Half the digits are reserved for the exponentially small signal.
  const Real ftol = amplitude * pow10(-(current_digits() / 2 - 5));
  Real root = abs(fa) < abs(fb) ? a : b;
  int side = 0;
  for (int it = 0; it < 300; ++it) {
    if (fa.is_zero()) {
      root = a;
      break;
    }
    if (fb.is_zero()) {
      root = b;
      break;
    }
    Real c = b - fb * (b - a) / (fb - fa);
    Real fc = splitting_function_real(mp, c);
    root = c;
    if (abs(fc) <= ftol || abs(b - a) < xtol) break;
    if (fc.sign() == fb.sign()) {
      b = c;
      fb = fc;
      if (side == -1) fa /= 2;
      side = -1;
    } else {
      a = c;
      fa = fc;
      if (side == 1) fb /= 2;
      side = 1;
    }
  }
  HomoclinicPoint h;
  h.t_h = root;
  ThetaDetail d;
  h.theta_residual = abs(splitting_function(mp, Complex(root), &d));
  h.delta_norm = cvec_norm(d.delta);

  // Intersection W+(tb) = W-(ta) by Newton; its Jacobian determinant is the
  // homoclinic invariant, so convergence needs the digits headroom that the
  // precision policy provides.
  Real ta = root, tb = root;
  bool converged = false;
  for (int it = 0; it < 60; ++it) {
    RVec2 dm, dp;
    RVec2 wm = mp.W_minus.evaluate_real(ta, &dm);
    RVec2 wp = mp.W_plus.evaluate_real(tb, &dp);
    RVec2 g{wp[0] - wm[0], wp[1] - wm[1]};
    // [-dm | dp] (dta, dtb) = -g
    Real det = -dm[0] * dp[1] + dm[1] * dp[0];
    if (det.is_zero()) break;
    Real dta = (-g[0] * dp[1] + g[1] * dp[0]) / det;
    Real dtb = (-dm[0] * (-g[1]) + dm[1] * (-g[0])) / det;
    ta += dta;
    tb += dtb;
    // Attainable accuracy: evaluation noise divided by the tiny determinant.
    Real scale = max(abs(dm[0]), abs(dm[1])) * max(abs(dp[0]), abs(dp[1]));
    Real ntol = max(xtol, pow10(-(current_digits() - 15)) * scale / abs(det));
    if (max(abs(dta), abs(dtb)) < ntol) {
      converged = true;
      break;
    }
  }
  if (!converged || abs(ta - root) > Real::ratio(1, 1000) || abs(tb - root) > Real::ratio(1, 1000))
    throw SplittingError("TwoComponentInconsistency: no common zero of both components of delta near t = " +
                         root.str(12));
  h.t_minus = ta;
  h.t_plus = tb;
  return h;
}

Real align_phases(ManifoldPair& mp, const Real& a, const Real& b) {
  HomoclinicPoint h = find_homoclinic(mp, a, b);
  Real shift = h.t_plus - h.t_minus;
  mp.W_plus.shift_phase(shift);
  return shift;
}

InvariantRoutes homoclinic_invariant(const ManifoldPair& mp, const HomoclinicPoint& h, int cauchy_nodes,
                                     const Real& cauchy_radius, const Real& route_tol) {
  InvariantRoutes r;
  RVec2 dm, dp;
  mp.W_minus.evaluate_real(h.t_minus, &dm);
  mp.W_plus.evaluate_real(h.t_plus, &dp);
  r.tangent = symplectic_form(dp, dm);
  // Theta^- is differentiated with W+ re-timed so that both separatrices
  // reach the intersection point at the same time t_minus; the two primary
  // orbits differ in this offset by an exponentially small amount.
  ManifoldPair aligned = mp;
  aligned.W_plus.shift_phase(h.t_plus - h.t_minus);
  ComplexFunction theta = [&aligned](const Complex& z) { return splitting_function(aligned, z); };
  Complex d = cauchy_derivative(theta, Complex(h.t_minus), cauchy_radius, cauchy_nodes);
  r.derivative = d.re;
  r.relative_difference = abs(r.tangent - r.derivative) / abs(r.tangent);
  if (r.relative_difference > route_tol)
    throw SplittingError("RouteMismatch: omega(W+', W-') = " + r.tangent.str(20) + " but dTheta/dtau = " +
                         r.derivative.str(20) + " (relative difference " + r.relative_difference.str(4) + ")");
  return r;
}

void gauss_legendre(int n, std::vector<Real>& nodes, std::vector<Real>& weights) {
  if (n < 1) throw SplittingError("gauss_legendre needs n >= 1");
  nodes.assign(n, Real(0));
  weights.assign(n, Real(0));
  const Real pi = const_pi();
  const Real tol = pow10(-(current_digits() - 3));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    Real x = cos(pi * Real(4 * i + 3) / Real(4 * n + 2));
    Real dp;
    for (int it = 0; it < 100; ++it) {
      Real p0(1), p1 = x;
      for (int k = 2; k <= n; ++k) {
        Real p2 = (Real(2 * k - 1) * x * p1 - Real(k - 1) * p0) / Real(k);
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = Real(1);
      dp = Real(n) * (x * p1 - p0) / (x * x - Real(1));
      Real dx = p1 / dp;
      x -= dx;
      if (abs(dx) < tol) break;
    }
    Real p0(1), p1 = x;
    for (int k = 2; k <= n; ++k) {
      Real p2 = (Real(2 * k - 1) * x * p1 - Real(k - 1) * p0) / Real(k);
      p0 = p1;
      p1 = p2;
    }
    if (n == 1) p0 = Real(1);
    dp = Real(n) * (x * p1 - p0) / (x * x - Real(1));
    Real w = Real(2) / ((Real(1) - x * x) * dp * dp);
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = w;
    weights[n - 1 - i] = w;
  }
}

namespace {

Real gl_integral(const ManifoldPair& mp, const Real& t1, const Real& t2, int n) {
  std::vector<Real> x, w;
  gauss_legendre(n, x, w);
  const Real half = (t2 - t1) / 2, mid = (t1 + t2) / 2;
  std::vector<Real> vals(n);
  const mpfr_prec_t prec = working_precision();
  std::exception_ptr failure;
#pragma omp parallel for schedule(static)
  for (int k = 0; k < n; ++k) {
    PrecisionScope scope(prec);
    try {
      vals[k] = splitting_function_real(mp, mid + half * x[k]);
    } catch (...) {
#pragma omp critical(seplab_gl_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  Real acc(0);
  for (int k = 0; k < n; ++k) acc.fma_acc(w[k], vals[k]);
  return acc * half;
}

}  // namespace

Real lobe_area(const ManifoldPair& mp, const Real& t1, const Real& t2, int nodes) {
  const long digits = current_digits();
  int n = nodes > 0 ? nodes : std::max<int>(24, static_cast<int>(digits / 3));
  Real a = gl_integral(mp, t1, t2, n);
  Real b = gl_integral(mp, t1, t2, 2 * n);
  if (abs(a - b) > abs(b) * pow10(-(digits / 2)))
    throw SplittingError("QuadratureNonConvergence: lobe area changes by " + (abs(a - b) / abs(b)).str(4) +
                         " (relative) on doubling to " + std::to_string(2 * n) + " nodes");
  return abs(b);
}

Real default_nu(const Real& epsilon, int M) {
  return -(Real(M + 2) * log(epsilon)) / (const_pi() * 2);
}

int default_fourier_nodes(long digits) { return std::max<int>(16, static_cast<int>(64 * digits / 100)); }

Complex fourier_theta(const ManifoldPair& mp, const Real& nu, int nodes) {
  const Real pi = const_pi();
  const Real top = pi / mp.epsilon;
  if (nu <= Real(0) || nu >= top)
    throw SplittingError("DomainViolation: nu = " + nu.str(6) + " must lie in (0, pi/eps)");
  if (nodes < 4) throw SplittingError("fourier_theta needs at least 4 nodes");
  const Real im = top - nu;
  std::vector<Complex> terms(nodes);
  const mpfr_prec_t prec = working_precision();
  std::exception_ptr failure;
#pragma omp parallel for schedule(static)
  for (int k = 0; k < nodes; ++k) {
    PrecisionScope scope(prec);
    try {
      Real s = Real::ratio(2 * k - nodes, 2 * nodes);
      Complex tau(s, im);
      // e^{2 pi i t} with t = s - i nu
      Complex phase = polar(exp(pi * 2 * nu), pi * 2 * s);
      terms[k] = phase * splitting_function(mp, tau);
    } catch (const ManifoldError& e) {
#pragma omp critical(seplab_fourier_failure)
      if (!failure)
        failure = std::make_exception_ptr(SplittingError(std::string("DomainViolation: ") + e.what()));
    } catch (...) {
#pragma omp critical(seplab_fourier_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  Complex acc(0);
  for (const auto& t : terms) acc += t;
  return acc / Real(nodes);
}

Real quasi_periodicity_defect(const ManifoldPair& mp, int samples) {
  Real worst(0);
  for (int j = 0; j < samples; ++j) {
    Real tau = Real::ratio(j, samples);
    Real d = splitting_function_real(mp, tau + Real(1)) - splitting_function_real(mp, tau);
    worst = max(worst, abs(d));
  }
  return worst;
}

SplittingReport compute_report(const ManifoldPair& mp_in, const PrecisionContext& ctx,
                               const SplittingOptions& opt) {
  ContextScope scope(ctx);
  auto t0 = std::chrono::steady_clock::now();
  const ManifoldPair& mp = mp_in;
  SplittingReport r;
  r.epsilon = mp.epsilon;
  r.mu = mp.mu;
  r.lambda = mp.lambda;
  r.digits = ctx.digits;
  // Start a quarter period early so that roots near 0 and 1/2 sit inside brackets.
  const Real start = Real::ratio(-1, 4);
  auto br = zero_brackets(mp, opt.zero_samples, start);
  r.zero_count = static_cast<int>(br.size());
  if (br.size() < 2)
    throw SplittingError("ZeroCount: Theta^- has " + std::to_string(br.size()) + " sign changes per period");
  std::array<HomoclinicPoint, 2> h;
  for (int k = 0; k < 2; ++k) {
    h[k] = find_homoclinic(mp, br[k].first, br[k].second);
    r.time_offset[k] = h[k].t_plus - h[k].t_minus;
    auto routes = homoclinic_invariant(mp, h[k], opt.cauchy_nodes, opt.cauchy_radius);
    r.t_h[k] = frac_part(h[k].t_h);
    r.omega[k] = routes.tangent;
    r.omega_theta[k] = routes.derivative;
  }
  if (opt.lobe) r.lobe_area = lobe_area(mp, h[0].t_h, h[1].t_h);
  r.nu = opt.nu ? *opt.nu : default_nu(mp.epsilon);
  if (opt.fourier) {
    int nodes = opt.fourier_nodes > 0 ? opt.fourier_nodes : default_fourier_nodes(ctx.digits);
    r.theta_eps = fourier_theta(mp, r.nu, nodes);
  }
  if (opt.quasi_periodicity) r.qp_defect = quasi_periodicity_defect(mp, opt.qp_samples);
  const Real pi = const_pi();
  r.scaled = abs(r.omega[0]) * exp(pi * pi * 2 / mp.epsilon);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

SplittingReport compute_report(const PolyMapFamily& f, const Real& epsilon, const PrecisionContext& ctx,
                               const SplittingOptions& opt, const ManifoldOptions& mopt) {
  ContextScope scope(ctx);
  auto t0 = std::chrono::steady_clock::now();
  ManifoldPair mp = build_manifold_pair(f, epsilon, ctx, mopt);
  SplittingReport r = compute_report(mp, ctx, opt);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::string report_csv_header() {
  return "epsilon,mu,lambda,t_h1,t_h2,omega1,omega2,lobe_area,theta_re,theta_im,scaled";
}

std::string report_csv_row(const SplittingReport& r) {
  ContextScope scope(PrecisionContext::make(r.digits));
  // The guard digits carry rounding noise; leave them out of the file.
  const long d = r.digits - PrecisionContext{}.guard_digits;
  std::ostringstream os;
  auto put = [&](const Real& x) { os << x.str(d); };
  put(r.epsilon);
  for (const Real* x : {&r.mu, &r.lambda, &r.t_h[0], &r.t_h[1], &r.omega[0], &r.omega[1], &r.lobe_area,
                        &r.theta_eps.re, &r.theta_eps.im, &r.scaled}) {
    os << ',';
    put(*x);
  }
  return os.str();
}

}  // namespace seplab
