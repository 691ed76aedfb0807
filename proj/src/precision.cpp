#include "seplab/precision.hpp"

#include <cmath>
#include <exception>
#include <vector>

namespace seplab {

PrecisionContext PrecisionContext::make(long digits, long guard_digits) {
  if (digits < 30) throw NumericError("digits must be >= 30");
  if (guard_digits < 10) throw NumericError("guard_digits must be >= 10");
  PrecisionContext c;
  c.digits = digits;
  c.guard_digits = guard_digits;
  return c;
}

long PrecisionContext::digits_for_epsilon(double epsilon) {
  if (!(epsilon > 0)) throw NumericError("epsilon must be positive");
  const double pi = 3.14159265358979323846;
  return static_cast<long>(std::ceil(2.0 * (2.0 * pi * pi / epsilon) / std::log(10.0))) + 50;
}

PrecisionContext PrecisionContext::for_epsilon(double epsilon, long guard_digits) {
  return make(digits_for_epsilon(epsilon), guard_digits);
}

Real PrecisionContext::residual_tol() const { return pow10(-(digits - guard_digits)); }
Real PrecisionContext::zero_tol() const { return pow10(-(digits - 2 * guard_digits)); }

Complex symplectic_form(const CVec2& u, const CVec2& v) { return u[0] * v[1] - u[1] * v[0]; }
Real symplectic_form(const RVec2& u, const RVec2& v) { return u[0] * v[1] - u[1] * v[0]; }

namespace {

Complex node_point(const Complex& z0, const Real& radius, int k, int nodes, Complex* unit) {
  Real theta = const_pi() * 2 * k / nodes;
  *unit = polar(Real(1), theta);
  return z0 + *unit * radius;
}

Complex reduce(const std::vector<Complex>& samples, const std::vector<Complex>& units,
               const Real& radius) {
  // f'(z0) = (1/(N r)) sum f(z_k) e^{-i theta_k}
  Complex acc;
  for (size_t k = 0; k < samples.size(); ++k) {
    if (!samples[k].is_finite()) throw NumericError("NonFiniteSample in cauchy_derivative");
    acc += samples[k] * conj(units[k]);
  }
  return acc / (radius * static_cast<long>(samples.size()));
}

void check_args(const Real& radius, int nodes) {
  if (nodes < 16) throw NumericError("cauchy_derivative needs at least 16 nodes");
  if (!(radius > Real(0))) throw NumericError("cauchy_derivative radius must be positive");
}

}  // namespace

Complex cauchy_derivative_serial(const ComplexFunction& f, const Complex& z0, const Real& radius,
                                 int nodes) {
  check_args(radius, nodes);
  std::vector<Complex> samples(nodes), units(nodes);
  for (int k = 0; k < nodes; ++k) samples[k] = f(node_point(z0, radius, k, nodes, &units[k]));
  return reduce(samples, units, radius);
}

Complex cauchy_derivative(const ComplexFunction& f, const Complex& z0, const Real& radius,
                          int nodes) {
  check_args(radius, nodes);
  std::vector<Complex> samples(nodes), units(nodes);
  const mpfr_prec_t prec = working_precision();
  std::exception_ptr failure;
#pragma omp parallel for schedule(static)
  for (int k = 0; k < nodes; ++k) {
    PrecisionScope scope(prec);
    try {
      Complex u;
      Complex z = node_point(z0, radius, k, nodes, &u);
      samples[k] = f(z);
      units[k] = u;
    } catch (...) {
#pragma omp critical(seplab_cauchy_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return reduce(samples, units, radius);
}

}  // namespace seplab
