#include <doctest.h>

#include <omp.h>

#include "seplab/splitting.hpp"

using namespace seplab;

namespace {

const PrecisionContext& ctx03() {
  static PrecisionContext c = PrecisionContext::make(PrecisionContext::digits_for_epsilon(0.3));
  return c;
}
const ManifoldPair& pair03() {
  static ManifoldPair mp = [] {
    ContextScope s(ctx03());
    return build_manifold_pair(builtin_family("henon13"), Real("0.3"), ctx03());
  }();
  return mp;
}
const std::array<HomoclinicPoint, 2>& orbits03() {
  static std::array<HomoclinicPoint, 2> h = [] {
    ContextScope s(ctx03());
    auto br = zero_brackets(pair03(), 32, Real::ratio(-1, 4));
    return std::array<HomoclinicPoint, 2>{find_homoclinic(pair03(), br[0].first, br[0].second),
                                          find_homoclinic(pair03(), br[1].first, br[1].second)};
  }();
  return h;
}
Real rel(const Real& a, const Real& b) { return abs(a - b) / abs(b); }

}  // namespace

TEST_CASE("two primary homoclinic orbits at eps = 0.3") {
  ContextScope s(ctx03());
  auto br = zero_brackets(pair03(), 32, Real::ratio(-1, 4));
  CHECK(br.size() == 2);
  const auto& h = orbits03();
  CHECK(abs(h[0].t_h - Real("0.16666459")) < Real("1e-7"));
  CHECK(abs(h[1].t_h - Real("0.66666459")) < Real("1e-7"));
  for (const auto& p : h) {
    // W+ and W- at equal times differ by the (exponentially small) splitting
    CHECK(p.delta_norm < Real("1e-20"));
    CVec2 a = pair03().W_minus.evaluate(Complex(p.t_minus));
    CVec2 b = pair03().W_plus.evaluate(Complex(p.t_plus));
    CHECK(abs(a[0] - b[0]) < pow10(-(ctx03().digits - 20)));
    CHECK(abs(a[1] - b[1]) < pow10(-(ctx03().digits - 20)));
  }
}

TEST_CASE("Lazutkin invariant by both routes") {
  ContextScope s(ctx03());
  const auto& h = orbits03();
  const Real frozen("6.0829544586622880516e-25");
  InvariantRoutes r0 = homoclinic_invariant(pair03(), h[0]);
  InvariantRoutes r1 = homoclinic_invariant(pair03(), h[1]);
  CHECK(rel(abs(r0.tangent), frozen) < Real("1e-15"));
  CHECK(r0.tangent * r1.tangent < Real(0));
  CHECK(rel(abs(r1.tangent), abs(r0.tangent)) < Real("1e-15"));
  CHECK(r0.relative_difference < Real("1e-18"));
  // same invariant one period later along the orbit
  HomoclinicPoint later = h[0];
  later.t_h += Real(1);
  later.t_minus += Real(1);
  later.t_plus += Real(1);
  InvariantRoutes r2 = homoclinic_invariant(pair03(), later);
  CHECK(rel(r2.tangent, r0.tangent) < Real("1e-20"));
}

TEST_CASE("Cauchy derivative of the splitting function: threads do not change bits") {
  ContextScope s(ctx03());
  const auto& h = orbits03();
  ComplexFunction f = [&](const Complex& z) { return splitting_function(pair03(), z); };
  omp_set_num_threads(2);
  Complex a = cauchy_derivative(f, Complex(h[0].t_h), Real::ratio(1, 4), 32);
  Complex b = cauchy_derivative_serial(f, Complex(h[0].t_h), Real::ratio(1, 4), 32);
  CHECK(a == b);
}

TEST_CASE("lobe area") {
  ContextScope s(ctx03());
  const auto& h = orbits03();
  const Real A = lobe_area(pair03(), h[0].t_h, h[1].t_h);
  const Real omega = abs(homoclinic_invariant(pair03(), h[0]).tangent);
  const Real pi = const_pi();
  // Leading-order sine profile: A = |Omega| / (2 pi^2) (1 + O(eps)).
  CHECK(abs(A * pi * pi * 2 / omega - Real(1)) < Real("1e-3"));
}

TEST_CASE("quasi-periodicity of the splitting function") {
  ContextScope s(ctx03());
  Real d = quasi_periodicity_defect(pair03(), 8);
  CHECK(d < Real("1e-40"));
  // but Theta^- itself is not small
  CHECK(abs(splitting_function_real(pair03(), Real::ratio(2, 5))) > Real("1e-26"));
}

TEST_CASE("Fourier route") {
  ContextScope s(ctx03());
  const Real pi = const_pi();
  const Real scaled = Real("22884.746084168");
  Complex th = fourier_theta(pair03(), Real(5), default_fourier_nodes(ctx03().digits));
  CHECK(rel(abs(th) * pi * 4, scaled) < Real("1e-8"));
  CHECK_THROWS_AS(fourier_theta(pair03(), Real("0.1"), 16), SplittingError);
}

TEST_CASE("error kinds") {
  ContextScope s(ctx03());
  CHECK_THROWS_AS(find_homoclinic(pair03(), Real("0.3"), Real("0.4")), SplittingError);
}

TEST_CASE("Gauss-Legendre rule") {
  ContextScope s(PrecisionContext::make(50));
  std::vector<Real> x, w;
  gauss_legendre(6, x, w);
  for (int p = 0; p <= 11; ++p) {
    Real acc(0);
    for (size_t i = 0; i < x.size(); ++i) acc += w[i] * pow(x[i], p);
    Real exact = p % 2 ? Real(0) : Real(2) / Real(p + 1);
    CHECK(abs(acc - exact) < pow10(-45));
  }
}

TEST_CASE("asymptotic fits on synthetic data") {
  ContextScope s(PrecisionContext::make(60));
  std::vector<Real> e, y, om;
  for (int k = 0; k < 8; ++k) {
    Real eps = Real::ratio(10 - k, 100);
    e.push_back(eps);
    y.push_back(Real(5) - Real(3) * eps + Real(2) * eps * eps);
    om.push_back(Real(7) * exp(Real(-20) / eps + Real("0.5") * eps));
  }
  AsymptoticFit a = fit_asymptotics(e, y, 2);
  CHECK(abs(a.vartheta[0] - Real(5)) < pow10(-40));
  CHECK(abs(a.vartheta[1] + Real(3)) < pow10(-38));
  ExponentFit x = fit_exponent(e, om, "e");
  CHECK(abs(x.slope + Real(20)) < pow10(-35));
  ExponentFit xl = fit_exponent(e, om, "el");
  CHECK(abs(xl.slope + Real(20)) < pow10(-30));
  CHECK_THROWS_AS(fit_asymptotics(std::vector<Real>(e.begin(), e.begin() + 4), std::vector<Real>(y.begin(), y.begin() + 4), 2),
                  SplittingError);
  std::vector<Real> dup = e;
  dup[1] = dup[0];
  CHECK_THROWS_AS(fit_asymptotics(dup, y, 2), SplittingError);
}

TEST_CASE("Stokes constant of the resonant map") {
  auto ctx = PrecisionContext::make(80);
  ContextScope s(ctx);
  const Real pi = const_pi();
  PolyMapFamily f = builtin_family("henon13");
  StokesResult st = stokes_constant_resonant(f, default_stokes_depths(), ctx);
  // Frozen from an 80-digit run; stable across leading-coefficient choices.
  CHECK(rel(abs(st.theta) * pi * 4, Real("59156.768889126835")) < Real("1e-13"));
  CHECK(st.error_estimate < abs(st.theta) * Real("1e-10"));
  StokesOptions o;
  o.re_t = Real("0.3");
  StokesResult shifted = stokes_constant_resonant(f, default_stokes_depths(), ctx, o);
  CHECK(rel(abs(shifted.theta), abs(st.theta)) < Real("1e-12"));
  o = StokesOptions{};
  o.leading_index = 2;
  CHECK(rel(abs(stokes_constant_resonant(f, default_stokes_depths(), ctx, o).theta), abs(st.theta)) <
        Real("1e-12"));
}

TEST_CASE("report csv") {
  ContextScope s(ctx03());
  SplittingOptions o;
  o.lobe = false;
  o.fourier = false;
  SplittingReport r = compute_report(pair03(), ctx03(), o);
  CHECK(r.zero_count == 2);
  CHECK(rel(r.scaled, Real("22884.746084168")) < Real("1e-12"));
  std::string row = report_csv_row(r);
  CHECK(std::count(row.begin(), row.end(), ',') == 10);
  CHECK(report_csv_header().rfind("epsilon,", 0) == 0);
}
