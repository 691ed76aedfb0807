#include <doctest.h>

#include "seplab/pipeline.hpp"

using namespace seplab;

TEST_CASE("epsilon list parsing") {
  auto v = parse_eps_list("0.5, 0.4,0.3");
  REQUIRE(v.size() == 3);
  CHECK(v[1] == "0.4");
  CHECK(parse_eps_list("").empty());
  CHECK_THROWS_AS(parse_eps_list("0.5,abc"), std::invalid_argument);
  CHECK_THROWS_AS(parse_eps_list("0.5,-0.1"), std::invalid_argument);
}

TEST_CASE("FNV-1a reference values") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(hex64(0xaf63dc4c8601ec8cULL) == "af63dc4c8601ec8c");
  CHECK(hex64(1) == "0000000000000001");
}

TEST_CASE("parallel sweep reproduces the serial sweep") {
  PolyMapFamily f = builtin_family("henon13");
  SweepOptions o;
  o.jobs = 2;
  o.splitting.lobe = false;
  const std::vector<std::string> eps{"0.5", "0.45"};
  auto par = run_sweep(f, eps, o);
  auto ser = run_sweep_serial(f, eps, o);
  REQUIRE(par.size() == 2);
  CHECK(par[0].ok);
  CHECK(par[1].ok);
  CHECK(reports_csv(par) == reports_csv(ser));
  CHECK(par[0].eps_text == "0.5");

  auto back = parse_reports_csv(reports_csv(par));
  REQUIRE(back.size() == 2);
  ContextScope s(PrecisionContext::make(par[0].digits));
  CHECK(abs(back[0].scaled - par[0].report.scaled) < abs(par[0].report.scaled) * pow10(-50));
}

TEST_CASE("a failing point does not stop the sweep") {
  PolyMapFamily f = builtin_family("henon13");
  SweepOptions o;
  o.splitting.lobe = false;
  o.splitting.nu = Real("0.1");  // Fourier line inside the excluded strip
  auto out = run_sweep(f, {"0.5", "0.45"}, o);
  REQUIRE(out.size() == 2);
  CHECK_FALSE(out[0].ok);
  CHECK(out[0].error.find("DomainViolation") != std::string::npos);
  CHECK(reports_csv(out) == report_csv_header() + "\n");
}

TEST_CASE("reports parser rejects malformed input") {
  CHECK_THROWS_AS(parse_reports_csv(""), std::invalid_argument);
  CHECK_THROWS_AS(parse_reports_csv(report_csv_header() + "\n1,2\n"), std::invalid_argument);
}

TEST_CASE("sweep fit reports errors instead of throwing") {
  ContextScope s(PrecisionContext::make(40));
  std::vector<SplittingReport> few(2);
  for (auto& r : few) r.digits = 40;
  few[0].epsilon = Real("0.5");
  few[1].epsilon = Real("0.4");
  SweepFit fit = fit_sweep(few, 1, Real(1), 40);
  CHECK_FALSE(fit.ok);
  CHECK(!fit.error.empty());
  CHECK(fit_csv(fit, 40).find("error") != std::string::npos);
}

TEST_CASE("svg output") {
  PlotSpec p{"t", "x", "y", {{"pts", {1, 2, 3}, {1, 4, 9}, false}, {"line", {1, 3}, {1, 9}, true}}, true, 5, "ref"};
  std::string svg = svg_plot(p);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(svg.find("<polyline") != std::string::npos);
  CHECK(svg.find("ref") != std::string::npos);
}
