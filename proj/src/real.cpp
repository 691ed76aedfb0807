#include "seplab/real.hpp"

#include <cmath>
#include <cstdlib>
#include <memory>

namespace seplab {

namespace {
thread_local mpfr_prec_t g_prec = 256;
}

mpfr_prec_t working_precision() { return g_prec; }

void set_working_precision(mpfr_prec_t bits) {
  if (bits < MPFR_PREC_MIN || bits > MPFR_PREC_MAX) throw NumericError("precision out of range");
  g_prec = bits;
}

mpfr_prec_t digits_to_bits(long digits) {
  return static_cast<mpfr_prec_t>(std::ceil(static_cast<double>(digits) * 3.3219280948873623)) + 8;
}

long bits_to_digits(mpfr_prec_t bits) {
  return static_cast<long>(std::floor(static_cast<double>(bits - 8) / 3.3219280948873623));
}

PrecisionScope::PrecisionScope(mpfr_prec_t bits) : saved_(g_prec) { set_working_precision(bits); }
PrecisionScope::~PrecisionScope() { g_prec = saved_; }

// ---------------------------------------------------------------- Real

Real::Real() {
  mpfr_init2(v_, g_prec);
  mpfr_set_zero(v_, 1);
}

Real::Real(long v) {
  mpfr_init2(v_, g_prec);
  mpfr_set_si(v_, v, MPFR_RNDN);
}

Real::Real(double v) {
  mpfr_init2(v_, g_prec);
  mpfr_set_d(v_, v, MPFR_RNDN);
}

Real::Real(std::string_view decimal) {
  mpfr_init2(v_, g_prec);
  std::string s(decimal);
  char* end = nullptr;
  if (mpfr_strtofr(v_, s.c_str(), &end, 10, MPFR_RNDN), end == s.c_str() || *end != '\0') {
    mpfr_clear(v_);
    throw NumericError("invalid decimal literal '" + s + "'");
  }
}

Real Real::ratio(long p, long q) {
  Real r(p);
  mpfr_div_si(r.v_, r.v_, q, MPFR_RNDN);
  return r;
}

Real Real::from_rational(std::string_view num, std::string_view den) {
  // Parse numerator and denominator exactly when they are integers by
  // giving them enough bits, then divide once at working precision.
  auto parse_exact = [](std::string_view txt) {
    std::string s(txt);
    bool integral = !s.empty() && s.find_first_not_of("+-0123456789") == std::string::npos;
    mpfr_prec_t bits = integral ? static_cast<mpfr_prec_t>(s.size() * 4 + 16) : g_prec + 64;
    if (bits < g_prec) bits = g_prec;
    auto holder = std::make_unique<Real>();
    mpfr_set_prec(holder->raw(), bits);
    char* end = nullptr;
    mpfr_strtofr(holder->raw(), s.c_str(), &end, 10, MPFR_RNDN);
    if (end == s.c_str() || *end != '\0') throw NumericError("invalid number '" + s + "'");
    return holder;
  };
  auto n = parse_exact(num);
  auto d = parse_exact(den);
  if (d->is_zero()) throw NumericError("zero denominator");
  Real r;
  mpfr_div(r.v_, n->raw(), d->raw(), MPFR_RNDN);
  return r;
}

Real::Real(const Real& o) {
  mpfr_init2(v_, mpfr_get_prec(o.v_));
  mpfr_set(v_, o.v_, MPFR_RNDN);
}

Real::Real(Real&& o) noexcept {
  mpfr_init2(v_, mpfr_get_prec(o.v_));
  mpfr_swap(v_, o.v_);
}

Real& Real::operator=(const Real& o) {
  if (this != &o) {
    if (mpfr_get_prec(v_) != mpfr_get_prec(o.v_)) mpfr_set_prec(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  return *this;
}

Real& Real::operator=(Real&& o) noexcept {
  mpfr_swap(v_, o.v_);
  return *this;
}

Real::~Real() { mpfr_clear(v_); }

namespace {
inline void to_working(mpfr_ptr x) {
  if (mpfr_get_prec(x) != g_prec) mpfr_prec_round(x, g_prec, MPFR_RNDN);
}
}  // namespace

Real& Real::operator+=(const Real& o) {
  to_working(v_);
  mpfr_add(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}
Real& Real::operator-=(const Real& o) {
  to_working(v_);
  mpfr_sub(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}
Real& Real::operator*=(const Real& o) {
  to_working(v_);
  mpfr_mul(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}
Real& Real::operator/=(const Real& o) {
  to_working(v_);
  mpfr_div(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}
Real& Real::operator*=(long o) {
  to_working(v_);
  mpfr_mul_si(v_, v_, o, MPFR_RNDN);
  return *this;
}
Real& Real::operator/=(long o) {
  to_working(v_);
  mpfr_div_si(v_, v_, o, MPFR_RNDN);
  return *this;
}
Real Real::operator-() const {
  Real r;
  mpfr_neg(r.v_, v_, MPFR_RNDN);
  return r;
}

void Real::fma_acc(const Real& a, const Real& b) {
  to_working(v_);
  mpfr_fma(v_, a.v_, b.v_, v_, MPFR_RNDN);
}

long Real::exponent2() const {
  if (mpfr_zero_p(v_)) return -(1L << 40);
  return mpfr_get_exp(v_);
}

std::string Real::str(long digits) const {
  if (digits <= 0) digits = bits_to_digits(mpfr_get_prec(v_));
  if (digits < 1) digits = 1;
  char* buf = nullptr;
  mpfr_asprintf(&buf, "%.*Re", static_cast<int>(digits - 1), v_);
  std::string s(buf);
  mpfr_free_str(buf);
  return s;
}

#define SEPLAB_BINOP(OP, FN)                           \
  Real operator OP(const Real& a, const Real& b) {     \
    Real r;                                            \
    FN(r.raw(), a.raw(), b.raw(), MPFR_RNDN);          \
    return r;                                          \
  }
SEPLAB_BINOP(+, mpfr_add)
SEPLAB_BINOP(-, mpfr_sub)
SEPLAB_BINOP(*, mpfr_mul)
SEPLAB_BINOP(/, mpfr_div)
#undef SEPLAB_BINOP

Real operator*(const Real& a, long b) {
  Real r;
  mpfr_mul_si(r.raw(), a.raw(), b, MPFR_RNDN);
  return r;
}
Real operator*(long a, const Real& b) { return b * a; }
Real operator/(const Real& a, long b) {
  Real r;
  mpfr_div_si(r.raw(), a.raw(), b, MPFR_RNDN);
  return r;
}

bool operator==(const Real& a, const Real& b) { return mpfr_equal_p(a.raw(), b.raw()) != 0; }

std::partial_ordering operator<=>(const Real& a, const Real& b) {
  if (mpfr_unordered_p(a.raw(), b.raw())) return std::partial_ordering::unordered;
  int c = mpfr_cmp(a.raw(), b.raw());
  if (c < 0) return std::partial_ordering::less;
  if (c > 0) return std::partial_ordering::greater;
  return std::partial_ordering::equivalent;
}

std::ostream& operator<<(std::ostream& os, const Real& x) {
  auto p = os.precision();
  return os << x.str(p > 0 ? p : 17);
}

#define SEPLAB_UNARY(NAME, FN)        \
  Real NAME(const Real& x) {          \
    Real r;                           \
    FN(r.raw(), x.raw(), MPFR_RNDN);  \
    return r;                         \
  }
SEPLAB_UNARY(abs, mpfr_abs)
SEPLAB_UNARY(sqrt, mpfr_sqrt)
SEPLAB_UNARY(exp, mpfr_exp)
SEPLAB_UNARY(log, mpfr_log)
SEPLAB_UNARY(sin, mpfr_sin)
SEPLAB_UNARY(cos, mpfr_cos)
SEPLAB_UNARY(tanh, mpfr_tanh)
#undef SEPLAB_UNARY

Real floor(const Real& x) {
  Real r;
  mpfr_floor(r.raw(), x.raw());
  return r;
}
Real ceil(const Real& x) {
  Real r;
  mpfr_ceil(r.raw(), x.raw());
  return r;
}

Real atan2(const Real& y, const Real& x) {
  Real r;
  mpfr_atan2(r.raw(), y.raw(), x.raw(), MPFR_RNDN);
  return r;
}
Real pow(const Real& x, const Real& y) {
  Real r;
  mpfr_pow(r.raw(), x.raw(), y.raw(), MPFR_RNDN);
  return r;
}
Real pow(const Real& x, long n) {
  Real r;
  mpfr_pow_si(r.raw(), x.raw(), n, MPFR_RNDN);
  return r;
}
Real ldexp(const Real& x, long e) {
  Real r;
  mpfr_mul_2si(r.raw(), x.raw(), e, MPFR_RNDN);
  return r;
}
Real const_pi() {
  Real r;
  mpfr_const_pi(r.raw(), MPFR_RNDN);
  return r;
}
Real max(const Real& a, const Real& b) { return (a < b) ? Real(b) : Real(a); }
Real min(const Real& a, const Real& b) { return (b < a) ? Real(b) : Real(a); }
Real pow10(long e) {
  Real r(10);
  mpfr_pow_si(r.raw(), r.raw(), e, MPFR_RNDN);
  return r;
}

// ---------------------------------------------------------------- Complex

Complex& Complex::operator+=(const Complex& o) {
  re += o.re;
  im += o.im;
  return *this;
}
Complex& Complex::operator-=(const Complex& o) {
  re -= o.re;
  im -= o.im;
  return *this;
}
Complex& Complex::operator*=(const Complex& o) {
  *this = *this * o;
  return *this;
}
Complex& Complex::operator*=(const Real& o) {
  re *= o;
  im *= o;
  return *this;
}
Complex& Complex::operator/=(const Complex& o) {
  *this = *this / o;
  return *this;
}

void Complex::fma_acc(const Complex& a, const Complex& b) {
  Real t = a.im * b.im;
  re.fma_acc(a.re, b.re);
  re -= t;
  im.fma_acc(a.re, b.im);
  im.fma_acc(a.im, b.re);
}

Complex operator+(const Complex& a, const Complex& b) { return {a.re + b.re, a.im + b.im}; }
Complex operator-(const Complex& a, const Complex& b) { return {a.re - b.re, a.im - b.im}; }
Complex operator*(const Complex& a, const Complex& b) {
  Real r, i;
  mpfr_fmms(r.raw(), a.re.raw(), b.re.raw(), a.im.raw(), b.im.raw(), MPFR_RNDN);
  mpfr_fmma(i.raw(), a.re.raw(), b.im.raw(), a.im.raw(), b.re.raw(), MPFR_RNDN);
  return {std::move(r), std::move(i)};
}
Complex operator*(const Complex& a, const Real& b) { return {a.re * b, a.im * b}; }
Complex operator*(const Real& a, const Complex& b) { return {a * b.re, a * b.im}; }
Complex operator/(const Complex& a, const Complex& b) {
  Real d = norm(b);
  Real r, i;
  mpfr_fmma(r.raw(), a.re.raw(), b.re.raw(), a.im.raw(), b.im.raw(), MPFR_RNDN);
  mpfr_fmms(i.raw(), a.im.raw(), b.re.raw(), a.re.raw(), b.im.raw(), MPFR_RNDN);
  return {r / d, i / d};
}
Complex operator/(const Complex& a, const Real& b) { return {a.re / b, a.im / b}; }
bool operator==(const Complex& a, const Complex& b) { return a.re == b.re && a.im == b.im; }

std::ostream& operator<<(std::ostream& os, const Complex& z) {
  return os << "(" << z.re << ", " << z.im << ")";
}

Complex conj(const Complex& z) { return {z.re, -z.im}; }
Real abs(const Complex& z) {
  Real r;
  mpfr_hypot(r.raw(), z.re.raw(), z.im.raw(), MPFR_RNDN);
  return r;
}
Real norm(const Complex& z) {
  Real r;
  mpfr_fmma(r.raw(), z.re.raw(), z.re.raw(), z.im.raw(), z.im.raw(), MPFR_RNDN);
  return r;
}
Real arg(const Complex& z) { return atan2(z.im, z.re); }
Complex exp(const Complex& z) {
  Real m = exp(z.re);
  Real s, c;
  mpfr_sin_cos(s.raw(), c.raw(), z.im.raw(), MPFR_RNDN);
  return {m * c, m * s};
}
Complex log(const Complex& z) { return {log(abs(z)), arg(z)}; }
Complex sqrt(const Complex& z) {
  Real r = abs(z);
  if (r.is_zero()) return Complex();
  Real a = sqrt((r + abs(z.re)) / 2);
  if (z.re.sign() >= 0) return {a, z.im / (a * 2)};
  Real b = z.im.sign() >= 0 ? a : -a;
  return {abs(z.im) / (a * 2), b};
}
Complex pow(const Complex& z, long n) {
  if (n < 0) return Complex(1) / pow(z, -n);
  Complex result(1), base = z;
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n) base = base * base;
  }
  return result;
}
Complex polar(const Real& r, const Real& theta) {
  Real s, c;
  mpfr_sin_cos(s.raw(), c.raw(), theta.raw(), MPFR_RNDN);
  return {r * c, r * s};
}
const Complex& imag_unit() {
  static const Complex i = [] {
    PrecisionScope scope(16);
    return Complex(Real(0), Real(1));
  }();
  return i;
}

}  // namespace seplab
