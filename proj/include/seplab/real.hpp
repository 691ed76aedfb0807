// Multiprecision real and complex scalars on top of MPFR.
//
// Every arithmetic result is rounded to nearest at the calling thread's
// working precision (see PrecisionScope).  Values remember the precision they
// were created with, so copies are exact.
#pragma once

#include <mpfr.h>

#include <array>
#include <compare>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace seplab {

class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thread-local working precision in bits.
mpfr_prec_t working_precision();
void set_working_precision(mpfr_prec_t bits);
mpfr_prec_t digits_to_bits(long digits);
long bits_to_digits(mpfr_prec_t bits);

class PrecisionScope {
 public:
  explicit PrecisionScope(mpfr_prec_t bits);
  ~PrecisionScope();
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  mpfr_prec_t saved_;
};

class Real {
 public:
  Real();
  Real(long v);  // NOLINT(google-explicit-constructor)
  Real(int v) : Real(static_cast<long>(v)) {}  // NOLINT
  explicit Real(double v);
  explicit Real(std::string_view decimal);
  // p / q computed at working precision.
  static Real ratio(long p, long q);
  static Real from_rational(std::string_view num, std::string_view den);

  Real(const Real& o);
  Real(Real&& o) noexcept;
  Real& operator=(const Real& o);
  Real& operator=(Real&& o) noexcept;
  ~Real();

  mpfr_ptr raw() { return v_; }
  mpfr_srcptr raw() const { return v_; }
  mpfr_prec_t precision() const { return mpfr_get_prec(v_); }

  Real& operator+=(const Real& o);
  Real& operator-=(const Real& o);
  Real& operator*=(const Real& o);
  Real& operator/=(const Real& o);
  Real& operator*=(long o);
  Real& operator/=(long o);
  Real operator-() const;

  // this += a*b with a single rounding.
  void fma_acc(const Real& a, const Real& b);

  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }
  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  long to_long() const { return mpfr_get_si(v_, MPFR_RNDN); }
  // Base-2 exponent e with 0.5 <= |x|/2^e < 1; very negative for zero.
  long exponent2() const;
  // Scientific decimal string with `digits` significant digits (0 = all).
  std::string str(long digits = 0) const;

 private:
  mpfr_t v_;
};

Real operator+(const Real& a, const Real& b);
Real operator-(const Real& a, const Real& b);
Real operator*(const Real& a, const Real& b);
Real operator/(const Real& a, const Real& b);
Real operator*(const Real& a, long b);
Real operator*(long a, const Real& b);
Real operator/(const Real& a, long b);
bool operator==(const Real& a, const Real& b);
std::partial_ordering operator<=>(const Real& a, const Real& b);
std::ostream& operator<<(std::ostream& os, const Real& x);

Real abs(const Real& x);
Real sqrt(const Real& x);
Real exp(const Real& x);
Real log(const Real& x);
Real sin(const Real& x);
Real cos(const Real& x);
Real tanh(const Real& x);
Real atan2(const Real& y, const Real& x);
Real pow(const Real& x, const Real& y);
Real pow(const Real& x, long n);
Real ldexp(const Real& x, long e);
Real floor(const Real& x);
Real ceil(const Real& x);
Real const_pi();
Real max(const Real& a, const Real& b);
Real min(const Real& a, const Real& b);
// 10^e at working precision.
Real pow10(long e);

struct Complex {
  Real re;
  Real im;

  Complex() = default;
  Complex(Real r) : re(std::move(r)), im(0) {}  // NOLINT
  Complex(long r) : re(r), im(0) {}  // NOLINT
  Complex(int r) : re(r), im(0) {}  // NOLINT
  Complex(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}

  Complex& operator+=(const Complex& o);
  Complex& operator-=(const Complex& o);
  Complex& operator*=(const Complex& o);
  Complex& operator*=(const Real& o);
  Complex& operator/=(const Complex& o);
  Complex operator-() const { return {-re, -im}; }
  // this += a*b
  void fma_acc(const Complex& a, const Complex& b);

  bool is_finite() const { return re.is_finite() && im.is_finite(); }
  bool is_zero() const { return re.is_zero() && im.is_zero(); }
};

Complex operator+(const Complex& a, const Complex& b);
Complex operator-(const Complex& a, const Complex& b);
Complex operator*(const Complex& a, const Complex& b);
Complex operator*(const Complex& a, const Real& b);
Complex operator*(const Real& a, const Complex& b);
Complex operator/(const Complex& a, const Complex& b);
Complex operator/(const Complex& a, const Real& b);
bool operator==(const Complex& a, const Complex& b);
std::ostream& operator<<(std::ostream& os, const Complex& z);

Complex conj(const Complex& z);
Real abs(const Complex& z);
Real norm(const Complex& z);  // |z|^2
Real arg(const Complex& z);
Complex exp(const Complex& z);
Complex log(const Complex& z);
Complex sqrt(const Complex& z);
Complex pow(const Complex& z, long n);
Complex polar(const Real& r, const Real& theta);
const Complex& imag_unit();

using RVec2 = std::array<Real, 2>;
using CVec2 = std::array<Complex, 2>;
using CMat2 = std::array<std::array<Complex, 2>, 2>;

// Scalar traits used by templates that work over Real and Complex.
inline Real magnitude(const Real& x) { return abs(x); }
inline Real magnitude(const Complex& z) { return abs(z); }
inline Real real_part(const Real& x) { return x; }
inline Real real_part(const Complex& z) { return z.re; }

}  // namespace seplab
