#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>

#include "seplab/map_file.hpp"

using namespace seplab;

namespace {
const char* kHenonText = R"(# same family as the builtin
name file-henon
description recentred Henon map
component 1
0 1 0 1
component 2
1 0 0 -1
0 1 0 -1
0 1 1 -1
0 2 0 -1
)";
}

TEST_CASE("builtin registry") {
  auto names = builtin_family_names();
  REQUIRE(names.size() >= 2);
  CHECK(names[0] == "henon13");
  for (const auto& n : names) CHECK(builtin_family(n).name == n);
  try {
    builtin_family("no-such-map");
    FAIL("expected MapError");
  } catch (const MapError& e) {
    const std::string msg = e.what();
    for (const auto& n : names) CHECK(msg.find(n) != std::string::npos);
  }
}

TEST_CASE("map file parser") {
  ContextScope s(PrecisionContext::make(50));
  PolyMapFamily f = parse_map_text(kHenonText);
  CHECK(f.name == "file-henon");
  CHECK(f.degree() == 2);
  PolyMapFamily g = builtin_family("henon13");
  const std::vector<Real> p{Real("0.3"), Real("-0.2"), Real("0.05")};
  for (int c = 0; c < 2; ++c) CHECK(abs(f.comps[c].evaluate(p) - g.comps[c].evaluate(p)) < pow10(-45));
  CHECK(check_family_invariants(f, PrecisionContext::make(50)).empty());

  // round trip through the writer
  PolyMapFamily h = parse_map_text(format_map_text(f));
  for (int c = 0; c < 2; ++c) CHECK(abs(h.comps[c].evaluate(p) - f.comps[c].evaluate(p)) < pow10(-45));

  // rational and decimal coefficients
  PolyMapFamily r = parse_map_text("component 1\n0 1 0 1\ncomponent 2\n1 0 0 -1\n0 1 0 -1\n0 2 0 -1/2\n0 3 0 0.25\n");
  CHECK(r.degree() == 3);
}

TEST_CASE("map file errors carry positions") {
  try {
    parse_map_text("component 1\n0 1 0 1\ncomponent 2\n1 0 x -1\n");
    FAIL("expected MapFileError");
  } catch (const MapFileError& e) {
    CHECK(e.line() == 4);
  }
  CHECK_THROWS_AS(parse_map_text("component 3\n"), MapFileError);
  CHECK_THROWS_AS(load_map_file("/nonexistent/file.map"), MapError);
}

TEST_CASE("invariant check flags a non-area-preserving family") {
  ContextScope s(PrecisionContext::make(50));
  PolyMapFamily bad = parse_map_text("component 1\n0 1 0 1\ncomponent 2\n1 0 0 -1\n0 1 0 -1\n1 1 0 1\n");
  CHECK_FALSE(check_family_invariants(bad, PrecisionContext::make(50)).empty());
}

TEST_CASE("load from file") {
  const std::string path = "seplab_test_map.txt";
  {
    std::ofstream o(path);
    o << kHenonText;
  }
  ContextScope s(PrecisionContext::make(40));
  CHECK(load_map_file(path).name == "file-henon");
  std::remove(path.c_str());
}

TEST_CASE("closed and implicit inverses") {
  ContextScope s(PrecisionContext::make(60));
  for (const auto& name : builtin_family_names()) {
    MapEvaluator ev(builtin_family(name), Real("0.07"));
    ev.set_inverse_tolerance(pow10(-55));
    CVec2 p{Complex(Real("0.21"), Real("0.03")), Complex(Real("-0.4"), Real("0.01"))};
    CVec2 q = ev.finv(ev.f(p));
    CHECK(abs(q[0] - p[0]) < pow10(-50));
    CHECK(abs(q[1] - p[1]) < pow10(-50));
    CVec2 r = ev.Finv(ev.F(p));
    CHECK(abs(r[0] - p[0]) < pow10(-45));
    CHECK(abs(r[1] - p[1]) < pow10(-45));
  }
}

TEST_CASE("conjugated families keep the structural invariants") {
  ContextScope s(PrecisionContext::make(60));
  PolyMapFamily f = builtin_family("henon13");
  for (unsigned seed : {1u, 7u, 42u}) {
    PolyMapFamily g = conjugate_family(f, random_symplectic_change(seed));
    CHECK(check_family_invariants(g, PrecisionContext::make(60)).empty());
  }
}

TEST_CASE("third iterate matches three applications") {
  ContextScope s(PrecisionContext::make(60));
  PolyMapFamily f = builtin_family("henon13");
  PolyMapFamily f3 = third_iterate(f, 8);
  MapEvaluator ev(f, Real(0));
  // Small point: truncation error is of degree 9.
  CVec2 p{Complex(Real("0.001")), Complex(Real("-0.002"))};
  CVec2 q = ev.f(ev.f(ev.f(p)));
  const std::vector<Real> pt{Real("0.001"), Real("-0.002"), Real(0)};
  for (int c = 0; c < 2; ++c) CHECK(abs(f3.comps[c].evaluate(pt) - q[c].re) < pow10(-24));
}
