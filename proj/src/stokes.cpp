#include <cmath>

#include "seplab/linalg.hpp"
#include "seplab/splitting.hpp"

namespace seplab {

std::vector<Real> default_stokes_depths() {
  std::vector<Real> d;
  for (int s = 4; s <= 15; ++s) d.emplace_back(s);
  return d;
}

namespace {

// Least squares for theta + e^{-2 pi (s - s0)} sum_j p_j ((s - s0) / span)^j.
Real stokes_fit(const std::vector<Real>& s, const std::vector<Real>& y, int degree) {
  const int n = static_cast<int>(s.size());
  const Real pi = const_pi();
  const Real s0 = s.front(), span = max(s.back() - s.front(), Real(1));
  RMatrix A(n, degree + 2);
  for (int i = 0; i < n; ++i) {
    A(i, 0) = Real(1);
    Real e = exp(-(pi * 2 * (s[i] - s0)));
    Real x = (s[i] - s0) / span;
    Real p(1);
    for (int j = 0; j <= degree; ++j) {
      A(i, j + 1) = e * p;
      p *= x;
    }
  }
  Real res;
  auto c = least_squares(A, y, &res);
  return c[0];
}

}  // namespace

StokesResult stokes_constant_resonant(const PolyMapFamily& f0_in, const std::vector<Real>& depths,
                                      const PrecisionContext& ctx, const StokesOptions& opt) {
  ContextScope scope(ctx);
  PolyMapFamily f0 = f0_in.at_working_precision();
  if (static_cast<int>(depths.size()) < opt.poly_degree + 3)
    throw SplittingError("NonConvergence: need at least " + std::to_string(opt.poly_degree + 3) +
                         " depths for a degree-" + std::to_string(opt.poly_degree) + " correction");
  auto cands = resonant_leading_candidates(f0, ctx);
  if (opt.leading_index < 0 || opt.leading_index >= static_cast<int>(cands.size()))
    throw SplittingError("leading_index out of range");
  StokesResult out;
  out.leading = cands[opt.leading_index];
  const int K = opt.shift > 0 ? opt.shift : 400;
  // Truncation of the 1/t series at |t| ~ K: terms behave like k!/(2 pi K)^k.
  int terms = opt.terms;
  if (terms <= 0) {
    const double target = static_cast<double>(ctx.digits) * std::log(10.0);
    terms = 10;
    while (terms < 400 && -(std::lgamma(terms + 1.0) - terms * std::log(2 * M_PI * K)) < target) ++terms;
  }
  auto series = resonant_formal_series(f0, out.leading, terms + 2, ctx);
  ResonantManifolds rm(f0, series, K, terms);
  const Real pi = const_pi();
  std::vector<Real> s, yr, yi;
  for (const auto& depth : depths) {
    Complex t(opt.re_t, -depth);
    CVec2 dm;
    CVec2 wm = rm.W_minus(t, &dm);
    CVec2 wp = rm.W_plus(t);
    Complex om = symplectic_form(CVec2{wp[0] - wm[0], wp[1] - wm[1]}, dm);
    Complex th = om * exp(pi * 2 * depth);
    out.estimates.push_back({depth, th});
    s.push_back(depth);
    yr.push_back(th.re);
    yi.push_back(th.im);
  }
  const int deg = opt.poly_degree;
  out.theta = Complex(stokes_fit(s, yr, deg), stokes_fit(s, yi, deg));
  Complex lower(stokes_fit(s, yr, deg - 1), stokes_fit(s, yi, deg - 1));
  out.error_estimate = abs(out.theta - lower);
  if (out.error_estimate > abs(out.theta) * Real::ratio(1, 1000))
    throw SplittingError("NonConvergence: Stokes estimates do not stabilize (spread " +
                         (out.error_estimate / abs(out.theta)).str(4) + " relative)");
  return out;
}

AsymptoticFit fit_asymptotics(const std::vector<Real>& eps, const std::vector<Real>& scaled, int M) {
  const int n = static_cast<int>(eps.size());
  if (n != static_cast<int>(scaled.size())) throw SplittingError("fit_asymptotics: size mismatch");
  if (M < 0 || n < M + 3)
    throw SplittingError("IllConditionedFit: need at least M + 3 = " + std::to_string(M + 3) + " points");
  Real lo = eps[0], hi = eps[0];
  for (const auto& e : eps) {
    lo = min(lo, e);
    hi = max(hi, e);
  }
  if ((hi - lo) < hi * Real::ratio(1, 10))
    throw SplittingError("IllConditionedFit: epsilon grid spans less than 10% of its largest value");
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (eps[i] == eps[j]) throw SplittingError("IllConditionedFit: repeated epsilon");
  RMatrix A(n, M + 1);
  std::vector<Real> y(n), ly(n);
  for (int i = 0; i < n; ++i) {
    Real p(1);
    // Columns in (eps / hi)^k keep the Vandermonde matrix balanced.
    Real x = eps[i] / hi;
    for (int k = 0; k <= M; ++k) {
      A(i, k) = p;
      p *= x;
    }
    y[i] = scaled[i];
    ly[i] = log(scaled[i]);
  }
  AsymptoticFit fit;
  fit.M = M;
  fit.vartheta = least_squares(A, y, &fit.fit_residual);
  fit.log_coeffs = least_squares(A, ly, &fit.log_fit_residual);
  Real p(1);
  for (int k = 0; k <= M; ++k) {
    fit.vartheta[k] /= p;
    fit.log_coeffs[k] /= p;
    p *= hi;
  }
  fit.log_vartheta0 = exp(fit.log_coeffs[0]);
  return fit;
}

AsymptoticFit fit_asymptotics(const std::vector<SplittingReport>& reports, int M) {
  std::vector<Real> e, s;
  for (const auto& r : reports) {
    e.push_back(r.epsilon);
    s.push_back(r.scaled);
  }
  return fit_asymptotics(e, s, M);
}

ExponentFit fit_exponent(const std::vector<Real>& eps, const std::vector<Real>& values,
                         const std::string& extra) {
  const int n = static_cast<int>(eps.size());
  const int cols = 2 + static_cast<int>(extra.size());
  if (n < cols) throw SplittingError("IllConditionedFit: too few points for the exponent fit");
  RMatrix A(n, cols);
  std::vector<Real> y(n);
  for (int i = 0; i < n; ++i) {
    A(i, 0) = Real(1);
    A(i, 1) = Real(1) / eps[i];
    for (size_t k = 0; k < extra.size(); ++k) {
      if (extra[k] == 'e')
        A(i, 2 + static_cast<int>(k)) = eps[i];
      else if (extra[k] == 'l')
        A(i, 2 + static_cast<int>(k)) = log(eps[i]);
      else
        throw SplittingError(std::string("fit_exponent: unknown correction term '") + extra[k] + "'");
    }
    y[i] = log(abs(values[i]));
  }
  ExponentFit f;
  f.coeffs = least_squares(A, y, &f.residual);
  f.slope = f.coeffs[1];
  return f;
}

}  // namespace seplab
