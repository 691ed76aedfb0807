#include <doctest.h>

#include "seplab/formal_separatrix.hpp"
#include "seplab/manifolds.hpp"

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
Real dist(const CVec2& a, const CVec2& b) { return max(abs(a[0] - b[0]), abs(a[1] - b[1])); }

}  // namespace

TEST_CASE("saddle parameterization") {
  ContextScope s(ctx03());
  const ManifoldPair& mp = pair03();
  const auto& k = mp.W_minus.parameterization();
  CHECK(k.side == Side::unstable);
  CHECK(mp.W_plus.parameterization().side == Side::stable);
  CHECK(k.seed_residual < ctx03().residual_tol());
  CHECK(abs(log(mp.lambda) - Real("0.3")) < ctx03().residual_tol());
  CHECK(abs(k.coeffs[0][0] - mp.unstable_saddle[0]) < ctx03().zero_tol());
}

TEST_CASE("functional equation with independent series points") {
  ContextScope s(ctx03());
  const ManifoldPair& mp = pair03();
  const Real tol = ctx03().residual_tol();
  for (int j = 0; j < 8; ++j) {
    const Complex tau(Real::ratio(j, 8) - Real("0.4"), Real::ratio(j, 3));
    for (const Manifold* m : {&mp.W_minus, &mp.W_plus}) {
      CVec2 lhs = m->evaluate(tau + Complex(1), nullptr, 2);
      CVec2 rhs = m->map_forward(m->evaluate(tau));
      CHECK(dist(lhs, rhs) < tol);
    }
  }
}

TEST_CASE("real on the real axis and conjugate symmetric") {
  ContextScope s(ctx03());
  const ManifoldPair& mp = pair03();
  const Complex tau(Real("0.31"), Real("1.7"));
  CVec2 a = mp.W_minus.evaluate(tau), b = mp.W_minus.evaluate(conj(tau));
  CHECK(dist(a, CVec2{conj(b[0]), conj(b[1])}) < ctx03().zero_tol());
  RVec2 d;
  RVec2 r = mp.W_minus.evaluate_real(Real("0.31"), &d);
  CVec2 dc;
  CVec2 c = mp.W_minus.evaluate(Complex(Real("0.31")), &dc);
  CHECK(abs(c[0].im) < ctx03().zero_tol());
  CHECK(abs(c[0].re - r[0]) < ctx03().zero_tol());
  CHECK(abs(dc[1].re - d[1]) < ctx03().zero_tol());
}

TEST_CASE("phase normalization on the normal-form section") {
  ContextScope s(ctx03());
  const ManifoldPair& mp = pair03();
  CHECK(abs(section_value(mp, mp.W_minus.evaluate_real(Real(0)))) < ctx03().zero_tol());
  CHECK(abs(section_value(mp, mp.W_plus.evaluate_real(Real(0)))) < ctx03().zero_tol());
}

TEST_CASE("phase shift moves the time origin") {
  ContextScope s(ctx03());
  Manifold m = pair03().W_minus;
  const Real shift("0.37");
  Manifold shifted = m;
  shifted.shift_phase(shift);
  for (const Complex& tau : {Complex(Real("-0.2")), Complex(Real("0.6"), Real("2.5"))}) {
    CHECK(dist(shifted.evaluate(tau), m.evaluate(tau + Complex(shift))) < ctx03().residual_tol());
  }
}

TEST_CASE("tangent propagation matches a Cauchy derivative") {
  ContextScope s(ctx03());
  const Manifold& m = pair03().W_plus;
  const Complex tau(Real("0.15"), Real("3"));
  CVec2 d;
  m.evaluate(tau, &d);
  for (int c = 0; c < 2; ++c) {
    ComplexFunction f = [&](const Complex& z) { return m.evaluate(z)[c]; };
    Complex num = cauchy_derivative(f, tau, Real::ratio(1, 4), 96);
    CHECK(abs(num - d[c]) < abs(d[c]) * pow10(-40));
  }
}

TEST_CASE("domain limit near the singularity") {
  ContextScope s(ctx03());
  const ManifoldPair& mp = pair03();
  const Real top = const_pi() / Real("0.3");
  CHECK_THROWS_AS(mp.W_minus.evaluate(Complex(Real(0), top - Real("0.1"))), ManifoldError);
  CHECK_NOTHROW(mp.W_minus.evaluate(Complex(Real(0), top - Real(1))));
  CHECK_THROWS_AS(continue_to_singularity(mp.W_minus, Real(0), Real(1), 8), ManifoldError);
  ContinuationPath path = continue_to_singularity(mp.W_minus, Real(0), Real(4), 9);
  REQUIRE(path.samples.size() == 9);
  for (const auto& p : path.samples) CHECK(p.step_residual < ctx03().residual_tol());
  // growth toward the singularity
  CHECK(abs(path.samples.back().value[0]) > abs(path.samples.front().value[0]));
}

TEST_CASE("outer formal series seeds the unstable manifold") {
  auto ctx = PrecisionContext::make(30);
  ContextScope s(ctx);
  PolyMapFamily f = builtin_family("henon13");
  NormalFormData nf = normalize(f, 13, ctx);
  FormalSeparatrix fs = solve_formal_separatrix(nf, 12, 1);
  const Real eps("0.02");
  FormalSeed seed = seed_from_formal(fs, nf, eps, Side::unstable, Real(0), ctx);
  CHECK(seed.tau <= Real(0));
  CHECK(seed.next_order_estimate < ctx.residual_tol() * 100);
  ManifoldPair mp = build_manifold_pair(f, eps, ctx);
  RVec2 w = mp.W_minus.evaluate_real(seed.tau);
  // The normal form itself is truncated at degree 13.
  CHECK(abs(seed.point[0] - w[0]) < Real("1e-12"));
  CHECK(abs(seed.point[1] - w[1]) < Real("1e-12"));
  // At eps = 0.3 the outer series cannot reach the working tolerance.
  CHECK_THROWS_AS(seed_from_formal(fs, nf, Real("0.3"), Side::unstable, Real(0), ctx), ManifoldError);
}

TEST_CASE("resonant map: leading coefficients and 1/t series") {
  auto ctx = PrecisionContext::make(60);
  ContextScope s(ctx);
  PolyMapFamily f = builtin_family("henon13");
  auto cands = resonant_leading_candidates(f, ctx);
  CHECK(cands.size() == 3);
  ResonantSeries rs = resonant_formal_series(f, cands[0], 80, ctx);
  CHECK(abs(rs.w[1][0].re - cands[0][0]) < pow10(-50));
  ResonantManifolds rm(f, rs, 200, 80);
  std::vector<Complex> grid{Complex(Real(0), Real(-3)), Complex(Real("0.5"), Real(-5)),
                            Complex(Real("-0.25"), Real(4))};
  auto samples = resonant_manifolds(rm, grid);
  for (const auto& smp : samples) {
    CHECK(smp.residual_minus < ctx.residual_tol());
    CHECK(smp.residual_plus < ctx.residual_tol());
  }
  // W0(t) ~ w1 / t for large |t|
  const Complex t(Real(0), Real(-2000));
  CVec2 w = rm.W_minus(t);
  CHECK(abs(w[0] * t - Complex(cands[0][0])) < Real("1e-2"));
  CHECK_THROWS_AS(resonant_manifolds(rm, {Complex(Real(3), Real(1))}), ManifoldError);
}

TEST_CASE("csv samples") {
  ContextScope s(ctx03());
  std::string csv = manifold_samples_csv(pair03().W_minus, {Complex(Real(0)), Complex(Real(1), Real(1))});
  CHECK(csv.rfind("tau_re,tau_im,x_re,x_im,y_re,y_im\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}
