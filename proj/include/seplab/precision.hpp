// Working-precision context and small numerical utilities shared by all
// modules.
#pragma once

#include <functional>

#include "seplab/real.hpp"

namespace seplab {

struct PrecisionContext {
  long digits = 60;
  long guard_digits = 10;
  // log10 of how far into the saddle's linear regime seeds are placed.
  long seed_offset_log10 = -2;

  // Builds a context and validates the invariants (digits >= 30, guard >= 10).
  static PrecisionContext make(long digits, long guard_digits = 10);
  // Minimum digits for a splitting computation at `epsilon`:
  // ceil(2 * (2 pi^2 / epsilon) / ln 10) + 50.
  static long digits_for_epsilon(double epsilon);
  static PrecisionContext for_epsilon(double epsilon, long guard_digits = 10);

  mpfr_prec_t bits() const { return digits_to_bits(digits); }
  // 10^-(digits - guard_digits)
  Real residual_tol() const;
  // 10^-(digits - 2*guard_digits): threshold for "coefficient is zero" after
  // divisions that amplify noise.
  Real zero_tol() const;
};

// Scope guard that sets the thread's working precision from a context.
class ContextScope {
 public:
  explicit ContextScope(const PrecisionContext& ctx) : scope_(ctx.bits()) {}

 private:
  PrecisionScope scope_;
};

// omega(u, v) = u1 v2 - u2 v1.
Complex symplectic_form(const CVec2& u, const CVec2& v);
Real symplectic_form(const RVec2& u, const RVec2& v);

using ComplexFunction = std::function<Complex(const Complex&)>;

// (1/2 pi i) \oint f(z)/(z-z0)^2 dz by the trapezoidal rule on the circle
// |z - z0| = radius with `nodes` equally spaced nodes.  Node evaluations run
// in parallel; the reduction is serial and in node order, so the result does
// not depend on the thread count.
Complex cauchy_derivative(const ComplexFunction& f, const Complex& z0, const Real& radius,
                          int nodes);
// Same quadrature, evaluated strictly serially.
Complex cauchy_derivative_serial(const ComplexFunction& f, const Complex& z0, const Real& radius,
                                 int nodes);

}  // namespace seplab
