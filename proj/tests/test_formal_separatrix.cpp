#include <doctest.h>

#include "seplab/formal_separatrix.hpp"
#include "seplab/normal_form.hpp"

using namespace seplab;

namespace {
struct Fixture {
  PrecisionContext ctx = PrecisionContext::make(80);
  ContextScope scope{ctx};
  PolyMapFamily fam = builtin_family("henon13");
  NormalFormData nf = normalize(fam, 9, ctx);
  FormalSeparatrix fs = solve_formal_separatrix(nf, 8, 1);
};
}  // namespace

TEST_CASE_FIXTURE(Fixture, "parameter series mu(eps)") {
  CHECK(abs(fs.mu[1] - Real::ratio(1, 3)) < pow10(-70));
  CHECK(abs(fs.mu[2] + Real::ratio(1, 54)) < pow10(-70));
  CHECK(abs(fs.mu[3] - Real::ratio(14, 243)) < pow10(-70));
  // Values frozen from an 80-digit run.
  CHECK(abs(fs.mu[4] - Real("-8.97919524462734339277549154092363968907e-02")) < pow10(-38));
  CHECK(abs(fs.mu[5] - Real("1.79776964893562973124015648021134989585e-01")) < pow10(-38));
}

TEST_CASE_FIXTURE(Fixture, "truncated mu(eps) matches the orbit solve") {
  const Real eps("0.05");
  OrbitPredictor pred = [&](const Real& mu) { return predicted_saddles(nf, mu)[0]; };
  ResonantOrbitData orb = mu_of_epsilon(fam, eps, predicted_mu(nf, eps, 1), pred, ctx);
  Real prev(1);
  for (int n = 2; n <= 8; n += 2) {
    Real err = abs(mu_series(fs, n, eps) - orb.mu);
    CHECK(err < pow(eps, n + 1) * 10);
    CHECK(err < prev);
    prev = err;
  }
}

TEST_CASE_FIXTURE(Fixture, "residual valuations") {
  auto F = normal_third_iterate(nf, 9);
  const Real tol = ctx.residual_tol();
  for (int n = 1; n <= 8; ++n) {
    CHECK(residual_valuation(hamilton_residual(fs, n, n + 2), tol) == n + 2);
    CHECK(residual_valuation(map_residual(F, fs, n, std::min(n + 2, 9)), tol) >= std::min(n + 2, 9));
  }
  CHECK(fs.degree_violations.empty());
}

TEST_CASE_FIXTURE(Fixture, "both branches") {
  FormalSeparatrix other = solve_formal_separatrix(nf, 4, -1);
  CHECK(other.branch == -1);
  CHECK(abs(other.mu[1] + fs.mu[1]) < pow10(-70));
}

TEST_CASE_FIXTURE(Fixture, "singular re-expansion and variational equation") {
  SingularExpansion se = resum_by_columns(fs, nf, 3, 6);
  CHECK(se.cmax == 3);
  CHECK_NOTHROW(formal_variational(se, fs));
  CHECK(se.has_xi);
}

TEST_CASE_FIXTURE(Fixture, "csv dump") {
  const std::string csv = formal_series_csv(fs);
  CHECK(!csv.empty());
  CHECK(csv.find("mu") != std::string::npos);
}

TEST_CASE("Bernoulli numbers") {
  auto b = bernoulli_numbers(8);
  REQUIRE(b.size() == 9);
  CHECK(b[0] == std::make_pair(std::string("1"), std::string("1")));
  CHECK(b[2] == std::make_pair(std::string("1"), std::string("6")));
  CHECK(b[4] == std::make_pair(std::string("-1"), std::string("30")));
  CHECK(b[3].first == "0");
}
