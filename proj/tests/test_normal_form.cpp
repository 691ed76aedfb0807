#include <doctest.h>

#include "seplab/normal_form.hpp"

using namespace seplab;

TEST_CASE("leading normal-form coefficients of the builtin family") {
  auto ctx = PrecisionContext::make(60);
  ContextScope s(ctx);
  NormalFormData nf = normalize(builtin_family("henon13"), 8, ctx);
  // Closed forms: a01 = sqrt(3)/6, b00^2 = 1/(6 sqrt(3)).
  CHECK(abs(nf.a01 - sqrt(Real(3)) / 6) < pow10(-50));
  CHECK(abs(nf.b00 * nf.b00 * 6 * sqrt(Real(3)) - Real(1)) < pow10(-50));
  CHECK(abs(nf.max_inconsistency) < ctx.zero_tol());
  // The resonant term with k = 0, m = 0 is absent by construction.
  CHECK(abs(nf.a.at({0, 0})) < ctx.zero_tol());
}

TEST_CASE("normalizing transforms invert each other") {
  auto ctx = PrecisionContext::make(60);
  ContextScope s(ctx);
  NormalFormData nf = normalize(builtin_family("henon13"), 8, ctx);
  const Real mu("0.01");
  const RVec2 p{Real("0.002"), Real("-0.001")};
  RVec2 q = apply_transform(nf.to_original, apply_transform(nf.to_normal, p, mu), mu);
  // agreement through degree 8 in (x, y, mu): error ~ |p|^9
  CHECK(abs(q[0] - p[0]) < pow10(-17));
  CHECK(abs(q[1] - p[1]) < pow10(-17));
}

TEST_CASE("coefficients are unchanged by a symplectic pre-conjugation") {
  auto ctx = PrecisionContext::make(80);
  ContextScope s(ctx);
  PolyMapFamily f = builtin_family("henon13");
  NormalFormData a = normalize(f, 8, ctx);
  for (unsigned seed : {3u, 11u}) {
    NormalFormData b = normalize(conjugate_family(f, random_symplectic_change(seed)), 8, ctx);
    REQUIRE(a.rotation_sign == b.rotation_sign);
    for (const auto& [key, v] : a.a) CHECK(abs(b.a.at(key) - v) < pow10(-60));
    for (const auto& [key, v] : a.b) CHECK(abs(b.b.at(key) - v) < pow10(-60));
  }
}

TEST_CASE("coefficient table") {
  auto ctx = PrecisionContext::make(40);
  ContextScope s(ctx);
  NormalFormData nf = normalize(builtin_family("henon13"), 6, ctx);
  const std::string csv = coefficient_csv(nf);
  CHECK(csv.rfind("kind,k,m,value\n", 0) == 0);
  CHECK(csv.find("\na,0,1,") != std::string::npos);
  CHECK(csv.find("\nb,0,0,") != std::string::npos);
}

TEST_CASE("period-3 saddle predicted by the normal form") {
  auto ctx = PrecisionContext::make(60);
  ContextScope s(ctx);
  PolyMapFamily f = builtin_family("henon13");
  NormalFormData nf = normalize(f, 8, ctx);
  const Real eps("0.1");
  const Real mu0 = predicted_mu(nf, eps, 1);
  OrbitPredictor pred = [&](const Real& mu) { return predicted_saddles(nf, mu)[0]; };
  ResonantOrbitData orb = mu_of_epsilon(f, eps, mu0, pred, ctx);
  CHECK(abs(log(orb.lambda) - eps) < pow10(-45));
  // leading-order prediction: relative error O(eps^2)
  CHECK(abs(orb.mu - mu0) < abs(orb.mu) * eps * eps);
  MapEvaluator ev(f, orb.mu);
  for (int k = 0; k < 3; ++k) {
    CVec2 p{Complex(orb.points[k][0]), Complex(orb.points[k][1])};
    CVec2 q = ev.f(p);
    CHECK(abs(q[0].re - orb.points[(k + 1) % 3][0]) < pow10(-45));
    CHECK(abs(q[1].re - orb.points[(k + 1) % 3][1]) < pow10(-45));
  }
  // Jacobian of the third iterate at the saddle has trace lambda + 1/lambda.
  CMat2 J;
  ev.F(CVec2{Complex(orb.points[0][0]), Complex(orb.points[0][1])}, &J);
  CHECK(abs((J[0][0] + J[1][1]).re - (orb.lambda + Real(1) / orb.lambda)) < pow10(-40));
}
