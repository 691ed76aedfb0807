#include <doctest.h>

#include <omp.h>

#include "seplab/precision.hpp"

using namespace seplab;

TEST_CASE("digit policy for epsilon") {
  CHECK(PrecisionContext::digits_for_epsilon(0.3) == 108);
  CHECK(PrecisionContext::digits_for_epsilon(0.2) == 136);
  // ceil(4 pi^2 / (0.05 ln 10)) + 50
  CHECK(PrecisionContext::digits_for_epsilon(0.05) == 393);
  CHECK_THROWS_AS(PrecisionContext::make(20), NumericError);
  CHECK_THROWS_AS(PrecisionContext::make(60, 5), NumericError);
}

TEST_CASE("tolerances follow the digit count") {
  auto ctx = PrecisionContext::make(80);
  ContextScope s(ctx);
  CHECK(ctx.residual_tol() == pow10(-70));
  CHECK(ctx.zero_tol() == pow10(-60));
}

TEST_CASE("precision scope nests and restores") {
  const auto outer = working_precision();
  {
    PrecisionScope a(digits_to_bits(100));
    CHECK(working_precision() == digits_to_bits(100));
    {
      PrecisionScope b(digits_to_bits(40));
      CHECK(working_precision() == digits_to_bits(40));
    }
    CHECK(working_precision() == digits_to_bits(100));
  }
  CHECK(working_precision() == outer);
}

TEST_CASE("elementary functions at 100 digits") {
  ContextScope s(PrecisionContext::make(100));
  const Real pi = const_pi();
  CHECK(pi.str(40) == "3.141592653589793238462643383279502884197e+00");
  const Real x("0.7");
  CHECK(abs(exp(log(x)) - x) < pow10(-98));
  CHECK(abs(sin(x) * sin(x) + cos(x) * cos(x) - Real(1)) < pow10(-98));
  const Complex z(Real("0.3"), Real("-1.2"));
  CHECK(abs(exp(log(z)) - z) < pow10(-98));
  CHECK(abs(sqrt(z) * sqrt(z) - z) < pow10(-98));
  CHECK(Real::ratio(1, 3) * 3 == Real(1));
  CHECK_THROWS_AS(Real("1.2.3"), NumericError);
}

TEST_CASE("symplectic form") {
  ContextScope s(PrecisionContext::make(40));
  RVec2 u{Real(2), Real(3)}, v{Real(5), Real(7)};
  CHECK(symplectic_form(u, v) == Real(-1));
  CHECK(symplectic_form(v, u) == Real(1));
}

TEST_CASE("Cauchy derivative: parallel matches the serial reference bit for bit") {
  ContextScope s(PrecisionContext::make(60));
  ComplexFunction f = [](const Complex& z) { return exp(z * z) * z; };
  const Complex z0(Real("0.25"), Real("0.1"));
  omp_set_num_threads(2);
  Complex par = cauchy_derivative(f, z0, Real::ratio(1, 4), 96);
  Complex ser = cauchy_derivative_serial(f, z0, Real::ratio(1, 4), 96);
  CHECK(par == ser);
  // d/dz z e^{z^2} = (1 + 2 z^2) e^{z^2}
  Complex exact = (Complex(1) + Real(2) * z0 * z0) * exp(z0 * z0);
  CHECK(abs(par - exact) < pow10(-50));
}
