#include "seplab/series.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace seplab {

// ------------------------------------------------------------ MonomialTable

MonomialTable::MonomialTable(int nvars, int order) : nvars_(nvars), order_(order) {
  if (nvars < 1 || nvars > kMaxVars) throw SeriesError("unsupported variable count");
  if (order < 0) throw SeriesError("negative order");
  begin_.assign(order + 2, 0);
  for (int d = 0; d <= order; ++d) {
    begin_[d] = static_cast<int>(exps_.size());
    // Enumerate exponent vectors of total degree d, first variable descending.
    Exponents e{};
    std::vector<int> stack;
    auto rec = [&](auto&& self, int v, int remaining) -> void {
      if (v == nvars - 1) {
        e[v] = remaining;
        exps_.push_back(e);
        degree_.push_back(d);
        return;
      }
      for (int k = remaining; k >= 0; --k) {
        e[v] = k;
        self(self, v + 1, remaining - k);
      }
    };
    rec(rec, 0, d);
  }
  begin_[order + 1] = static_cast<int>(exps_.size());
  size_t dense = 1;
  for (int v = 0; v < nvars; ++v) dense *= static_cast<size_t>(order + 1);
  lookup_.assign(dense, -1);
  for (int i = 0; i < size(); ++i) {
    size_t key = 0;
    for (int v = 0; v < nvars; ++v) key = key * (order + 1) + exps_[i][v];
    lookup_[key] = i;
  }
  lower_.assign(static_cast<size_t>(size()) * nvars, -1);
  raise_.assign(static_cast<size_t>(size()) * nvars, -1);
  for (int i = 0; i < size(); ++i) {
    for (int v = 0; v < nvars; ++v) {
      Exponents e = exps_[i];
      if (e[v] > 0) {
        e[v] -= 1;
        lower_[i * nvars + v] = index(e);
        e[v] += 1;
      }
      e[v] += 1;
      raise_[i * nvars + v] = index(e);
    }
  }
}

int MonomialTable::index(const Exponents& e) const {
  int deg = 0;
  size_t key = 0;
  for (int v = 0; v < nvars_; ++v) {
    if (e[v] < 0) return -1;
    deg += e[v];
    if (deg > order_) return -1;
    key = key * (order_ + 1) + e[v];
  }
  for (int v = nvars_; v < kMaxVars; ++v)
    if (e[v] != 0) return -1;
  return lookup_[key];
}

void MonomialTable::build_pairs() const {
  pair_begin_.assign(size() + 1, 0);
  for (int r = 0; r < size(); ++r) {
    pair_begin_[r] = static_cast<int>(pairs_.size());
    const Exponents& er = exps_[r];
    Exponents ep{};
    auto rec = [&](auto&& self, int v) -> void {
      if (v == nvars_) {
        Exponents eq{};
        for (int w = 0; w < nvars_; ++w) eq[w] = er[w] - ep[w];
        pairs_.emplace_back(index(ep), index(eq));
        return;
      }
      for (int k = 0; k <= er[v]; ++k) {
        ep[v] = k;
        self(self, v + 1);
      }
    };
    rec(rec, 0);
  }
  pair_begin_[size()] = static_cast<int>(pairs_.size());
}

const std::vector<int>& MonomialTable::pair_begin() const {
  std::call_once(pairs_once_, [this] { build_pairs(); });
  return pair_begin_;
}

const std::vector<std::pair<int, int>>& MonomialTable::pairs() const {
  std::call_once(pairs_once_, [this] { build_pairs(); });
  return pairs_;
}

std::shared_ptr<const MonomialTable> MonomialTable::get(int nvars, int order) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const MonomialTable>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{nvars, order}];
  if (!slot) slot = std::make_shared<const MonomialTable>(nvars, order);
  return slot;
}

// ------------------------------------------------------------------ helpers

namespace {

inline void div_long(Real& x, long k) { x /= k; }
inline void div_long(Complex& z, long k) {
  z.re /= k;
  z.im /= k;
}
inline void mul_long(Real& x, long k) { x *= k; }
inline void mul_long(Complex& z, long k) {
  z.re *= k;
  z.im *= k;
}

template <class T>
bool exactly_variable(const MSeries<T>& s, int v) {
  const auto& t = s.table();
  for (int i = 0; i < s.size(); ++i) {
    const Exponents& e = t.exps(i);
    bool is_v = t.degree(i) == 1 && e[v] == 1;
    if (is_v) {
      if (!(s[i] == T(1))) return false;
    } else if (!s[i].is_zero()) {
      return false;
    }
  }
  return true;
}

}  // namespace

// ------------------------------------------------------------------ MSeries

template <class T>
MSeries<T>::MSeries(int nvars, int order)
    : table_(MonomialTable::get(nvars, order)), c_(static_cast<size_t>(table_->size())) {}

template <class T>
MSeries<T> MSeries<T>::constant(int nvars, int order, const T& c) {
  MSeries s(nvars, order);
  s.c_[0] = c;
  return s;
}

template <class T>
MSeries<T> MSeries<T>::variable(int nvars, int order, int v) {
  MSeries s(nvars, order);
  if (order >= 1) {
    Exponents e{};
    e[v] = 1;
    s.c_[s.table_->index(e)] = T(1);
  }
  return s;
}

template <class T>
MSeries<T> MSeries<T>::monomial(int nvars, int order, const Exponents& e, const T& c) {
  MSeries s(nvars, order);
  int idx = s.table_->index(e);
  if (idx >= 0) s.c_[idx] = c;
  return s;
}

template <class T>
T MSeries<T>::coeff(const Exponents& e) const {
  int idx = table_->index(e);
  return idx < 0 ? T() : c_[idx];
}

template <class T>
void MSeries<T>::set(const Exponents& e, const T& v) {
  int idx = table_->index(e);
  if (idx < 0) throw SeriesError("monomial beyond truncation order");
  c_[idx] = v;
}

template <class T>
void MSeries<T>::check_compatible(const MSeries& o) const {
  if (!table_ || !o.table_) throw SeriesError("uninitialised series");
  if (table_->nvars() != o.table_->nvars() || table_->order() != o.table_->order())
    throw SeriesError("OrderMismatch: series differ in variables or order");
}

template <class T>
MSeries<T>& MSeries<T>::operator+=(const MSeries& o) {
  check_compatible(o);
  for (size_t i = 0; i < c_.size(); ++i)
    if (!o.c_[i].is_zero()) c_[i] += o.c_[i];
  return *this;
}

template <class T>
MSeries<T>& MSeries<T>::operator-=(const MSeries& o) {
  check_compatible(o);
  for (size_t i = 0; i < c_.size(); ++i)
    if (!o.c_[i].is_zero()) c_[i] -= o.c_[i];
  return *this;
}

template <class T>
MSeries<T>& MSeries<T>::operator*=(const T& s) {
  for (auto& c : c_)
    if (!c.is_zero()) c *= s;
  return *this;
}

template <class T>
MSeries<T> MSeries<T>::operator-() const {
  MSeries r(*this);
  for (auto& c : r.c_) c = -c;
  return r;
}

template <class T>
MSeries<T> MSeries<T>::with_order(int order) const {
  MSeries r(nvars(), order);
  int n = std::min(r.size(), size());
  // Graded numbering is a prefix property: indices of degree <= min order agree.
  int cut = table_->degree_begin(std::min(order, this->order()) + 1);
  n = std::min(n, cut);
  for (int i = 0; i < n; ++i) r.c_[i] = c_[i];
  return r;
}

template <class T>
MSeries<T> MSeries<T>::homogeneous(int d) const {
  return degree_range(d, d);
}

template <class T>
MSeries<T> MSeries<T>::degree_range(int lo, int hi) const {
  MSeries r(nvars(), order());
  lo = std::max(lo, 0);
  hi = std::min(hi, order());
  if (lo > hi) return r;
  for (int i = table_->degree_begin(lo); i < table_->degree_begin(hi + 1); ++i) r.c_[i] = c_[i];
  return r;
}

template <class T>
int MSeries<T>::valuation() const {
  for (int i = 0; i < size(); ++i)
    if (!c_[i].is_zero()) return table_->degree(i);
  return order() + 1;
}

template <class T>
Real MSeries<T>::max_abs() const {
  Real m(0);
  for (const auto& c : c_) {
    Real a = magnitude(c);
    if (a > m) m = a;
  }
  return m;
}

template <class T>
Real MSeries<T>::max_abs_degree(int d) const {
  Real m(0);
  if (d < 0 || d > order()) return m;
  for (int i = table_->degree_begin(d); i < table_->degree_begin(d + 1); ++i) {
    Real a = magnitude(c_[i]);
    if (a > m) m = a;
  }
  return m;
}

template <class T>
bool MSeries<T>::is_zero() const {
  for (const auto& c : c_)
    if (!c.is_zero()) return false;
  return true;
}

template <class T>
MSeries<T> MSeries<T>::derivative(int v) const {
  MSeries r(nvars(), order());
  for (int i = 0; i < size(); ++i) {
    if (c_[i].is_zero()) continue;
    int e = table_->exps(i)[v];
    if (e == 0) continue;
    int lo = table_->lower(i, v);
    r.c_[lo] = c_[i];
    mul_long(r.c_[lo], e);
  }
  return r;
}

template <class T>
T MSeries<T>::evaluate(const std::vector<T>& point) const {
  if (static_cast<int>(point.size()) != nvars()) throw SeriesError("evaluate: wrong point size");
  std::vector<std::vector<T>> pw(nvars());
  for (int v = 0; v < nvars(); ++v) {
    pw[v].resize(order() + 1);
    pw[v][0] = T(1);
    for (int k = 1; k <= order(); ++k) pw[v][k] = pw[v][k - 1] * point[v];
  }
  T acc;
  for (int i = 0; i < size(); ++i) {
    if (c_[i].is_zero()) continue;
    T term = c_[i];
    const Exponents& e = table_->exps(i);
    for (int v = 0; v < nvars(); ++v)
      if (e[v]) term = term * pw[v][e[v]];
    acc += term;
  }
  return acc;
}

// ---------------------------------------------------------------- products

namespace {

template <class T>
void mul_range(const MSeries<T>& a, const MSeries<T>& b, MSeries<T>& out, int r) {
  const auto& t = a.table();
  const auto& pb = t.pair_begin();
  const auto& pr = t.pairs();
  T acc;
  bool any = false;
  for (int k = pb[r]; k < pb[r + 1]; ++k) {
    const T& x = a[pr[k].first];
    if (x.is_zero()) continue;
    const T& y = b[pr[k].second];
    if (y.is_zero()) continue;
    acc.fma_acc(x, y);
    any = true;
  }
  if (any) out[r] = std::move(acc);
}

template <class T>
void check_mul(const MSeries<T>& a, const MSeries<T>& b) {
  if (!a.valid() || !b.valid()) throw SeriesError("uninitialised series");
  if (a.nvars() != b.nvars() || a.order() != b.order())
    throw SeriesError("OrderMismatch: operands differ in variables or order");
}

}  // namespace

template <class T>
MSeries<T> mul_serial(const MSeries<T>& a, const MSeries<T>& b) {
  check_mul(a, b);
  MSeries<T> out(a.nvars(), a.order());
  for (int r = 0; r < out.size(); ++r) mul_range(a, b, out, r);
  return out;
}

template <class T>
MSeries<T> mul(const MSeries<T>& a, const MSeries<T>& b) {
  check_mul(a, b);
  MSeries<T> out(a.nvars(), a.order());
  const int n = out.size();
  if (n < 64) {
    for (int r = 0; r < n; ++r) mul_range(a, b, out, r);
    return out;
  }
  a.table().pairs();  // build the plan before entering the parallel region
  const mpfr_prec_t prec = working_precision();
#pragma omp parallel
  {
    PrecisionScope scope(prec);
#pragma omp for schedule(dynamic, 16)
    for (int r = 0; r < n; ++r) mul_range(a, b, out, r);
  }
  return out;
}

template <class T>
MSeries<T> poisson(const MSeries<T>& f, const MSeries<T>& g) {
  if (f.is_zero() || g.is_zero()) return MSeries<T>(f.nvars(), f.order());
  MSeries<T> r = mul(f.derivative(0), g.derivative(1));
  r -= mul(f.derivative(1), g.derivative(0));
  return r;
}

template <class T>
MSeries<T> lie_exp(const MSeries<T>& f, const MSeries<T>& chi, const Real& tol, int max_terms) {
  MSeries<T> result = f;
  MSeries<T> term = f;
  for (int k = 1; k <= max_terms; ++k) {
    term = poisson(term, chi);
    if (term.is_zero()) return result;
    for (auto& c : term.data())
      if (!c.is_zero()) div_long(c, k);
    result += term;
    if (term.max_abs() < tol) return result;
  }
  throw SeriesError("lie_exp did not converge");
}

template <class T>
MSeries<T> compose(const MSeries<T>& outer, const std::vector<MSeries<T>>& inner) {
  const int nv = outer.nvars();
  if (static_cast<int>(inner.size()) != nv) throw SeriesError("compose: wrong inner count");
  const int rv = inner[0].nvars();
  const int ro = inner[0].order();
  for (const auto& s : inner)
    if (s.nvars() != rv || s.order() != ro) throw SeriesError("OrderMismatch in compose");
  bool has_constant = false;
  for (const auto& s : inner)
    if (!s[0].is_zero()) has_constant = true;
  // Highest degree actually present in outer.
  int top = -1;
  for (int i = 0; i < outer.size(); ++i)
    if (!outer[i].is_zero()) top = std::max(top, outer.table().degree(i));
  if (has_constant && top >= outer.order() && outer.order() < ro)
    throw SeriesError("DivergentComposition: inner has a constant term and outer is truncated");

  std::vector<bool> ident(nv, false);
  for (int v = 0; v < nv; ++v) ident[v] = (v < rv) && exactly_variable(inner[v], v);

  const MonomialTable& ot = outer.table();
  Exponents prefix{};
  // Horner recursion over the variables of outer.
  auto rec = [&](auto&& self, int v, int used) -> MSeries<T> {
    MSeries<T> acc(rv, ro);
    const int maxdeg = ot.order() - used;
    if (v == nv - 1) {
      if (ident[v]) {
        Exponents e{};
        for (int m = 0; m <= maxdeg; ++m) {
          prefix[v] = m;
          int idx = ot.index(prefix);
          if (idx < 0 || outer[idx].is_zero()) continue;
          e = Exponents{};
          e[v] = m;
          int ri = acc.table().index(e);
          if (ri >= 0) acc[ri] = outer[idx];
        }
        prefix[v] = 0;
        return acc;
      }
      bool started = false;
      for (int m = maxdeg; m >= 0; --m) {
        prefix[v] = m;
        int idx = ot.index(prefix);
        if (started) acc = mul(acc, inner[v]);
        if (idx >= 0 && !outer[idx].is_zero()) {
          acc[0] += outer[idx];
          started = true;
        }
      }
      prefix[v] = 0;
      return acc;
    }
    bool started = false;
    for (int m = maxdeg; m >= 0; --m) {
      prefix[v] = m;
      MSeries<T> part = self(self, v + 1, used + m);
      if (started) acc = mul(acc, inner[v]);
      if (!part.is_zero()) {
        acc += part;
        started = true;
      }
    }
    prefix[v] = 0;
    return acc;
  };
  return rec(rec, 0, 0);
}

template <class T>
MSeries<T> linear_substitute(const MSeries<T>& f, const std::array<std::array<T, 2>, 2>& m) {
  // Expand (m00 x + m01 y)^i (m10 x + m11 y)^j monomial by monomial; the
  // remaining variables pass through unchanged.
  const MonomialTable& tab = f.table();
  const int ord = f.order();
  MSeries<T> out(f.nvars(), ord);
  auto powers = [&](const T& a, const T& b) {
    // pw[n][p] = coefficient of x^p y^(n-p) in (a x + b y)^n
    std::vector<std::vector<T>> pw(ord + 1);
    pw[0] = {T(1)};
    for (int n = 1; n <= ord; ++n) {
      pw[n].assign(n + 1, T(0));
      for (int p = 0; p < n; ++p) {
        if (pw[n - 1][p].is_zero()) continue;
        pw[n][p + 1] += pw[n - 1][p] * a;
        pw[n][p] += pw[n - 1][p] * b;
      }
    }
    return pw;
  };
  auto pa = powers(m[0][0], m[0][1]);
  auto pb = powers(m[1][0], m[1][1]);
  std::vector<T> prod;
  for (int idx = 0; idx < f.size(); ++idx) {
    if (f[idx].is_zero()) continue;
    Exponents e = tab.exps(idx);
    const int i = e[0], j = e[1];
    prod.assign(i + j + 1, T(0));
    for (int p = 0; p <= i; ++p) {
      if (pa[i][p].is_zero()) continue;
      for (int q = 0; q <= j; ++q) {
        if (pb[j][q].is_zero()) continue;
        prod[p + q].fma_acc(pa[i][p], pb[j][q]);
      }
    }
    for (int p = 0; p <= i + j; ++p) {
      if (prod[p].is_zero()) continue;
      Exponents r = e;
      r[0] = p;
      r[1] = i + j - p;
      int ri = tab.index(r);
      out[ri].fma_acc(prod[p], f[idx]);
    }
  }
  return out;
}

template <class T>
std::array<MSeries<T>, 2> hamiltonian_time1_flow(const MSeries<T>& H, int order,
                                                  bool require_tangent_identity) {
  MSeries<T> h = H.with_order(order);
  const int nv = h.nvars();
  if (!h.homogeneous(0).is_zero() || !h.homogeneous(1).is_zero())
    throw SeriesError("InvalidHamiltonian: constant or linear terms present");
  if (require_tangent_identity && !h.homogeneous(2).is_zero())
    throw SeriesError("InvalidHamiltonian: linear part of X_H is nonzero");
  Real tol = ldexp(Real(1), -static_cast<long>(working_precision()) - 4);
  auto x = MSeries<T>::variable(nv, order, 0);
  auto y = MSeries<T>::variable(nv, order, 1);
  return {lie_exp(x, h, tol), lie_exp(y, h, tol)};
}

template <class T>
MSeries<T> jacobian_determinant(const std::array<MSeries<T>, 2>& map) {
  return poisson(map[0], map[1]);
}

template <class T>
std::string to_table(const MSeries<T>& s, long digits) {
  std::ostringstream os;
  for (int i = 0; i < s.size(); ++i) {
    if (s[i].is_zero()) continue;
    const Exponents& e = s.table().exps(i);
    for (int v = 0; v < s.nvars(); ++v) os << e[v] << ' ';
    if constexpr (std::is_same_v<T, Complex>) {
      os << s[i].re.str(digits) << ' ' << s[i].im.str(digits) << '\n';
    } else {
      os << s[i].str(digits) << " 0\n";
    }
  }
  return os.str();
}

// ------------------------------------------------------------------ Series1

template <class T>
Series1<T> Series1<T>::constant(const T& c, int order) {
  Series1 s(0, order);
  s.c_[0] = c;
  return s;
}

template <class T>
Series1<T> Series1<T>::range(int lead, int max_power) {
  if (max_power < lead) return Series1(lead, -1);
  return Series1(lead, max_power - lead);
}

template <class T>
T Series1<T>::at(int k) const {
  int i = k - lead_;
  if (i < 0 || i >= static_cast<int>(c_.size())) return T();
  return c_[i];
}

template <class T>
T& Series1<T>::ref(int k) {
  int i = k - lead_;
  if (i < 0 || i >= static_cast<int>(c_.size())) throw SeriesError("Series1 index outside window");
  return c_[i];
}

template <class T>
Series1<T>& Series1<T>::operator+=(const Series1& o) {
  if (c_.empty()) {
    *this = o;
    return *this;
  }
  if (o.c_.empty()) return *this;
  int lo = std::min(lead_, o.lead_);
  int hi = std::min(max_power(), o.max_power());
  Series1 r = range(lo, hi);
  for (int k = lo; k <= hi; ++k) {
    T v = at(k);
    T w = o.at(k);
    if (!w.is_zero()) v += w;
    r.c_[k - lo] = std::move(v);
  }
  *this = std::move(r);
  return *this;
}

template <class T>
Series1<T>& Series1<T>::operator-=(const Series1& o) {
  Series1 neg = -o;
  return *this += neg;
}

template <class T>
Series1<T>& Series1<T>::operator*=(const T& s) {
  for (auto& c : c_)
    if (!c.is_zero()) c *= s;
  return *this;
}

template <class T>
Series1<T> Series1<T>::operator-() const {
  Series1 r(*this);
  for (auto& c : r.c_) c = -c;
  return r;
}

template <class T>
Series1<T> Series1<T>::truncated(int max_power) const {
  return with_window(lead_, std::min(max_power, this->max_power()));
}

template <class T>
Series1<T> Series1<T>::with_window(int lead, int max_power) const {
  Series1 r = range(lead, max_power);
  for (int k = lead; k <= max_power; ++k) r.c_[k - lead] = at(k);
  return r;
}

template <class T>
int Series1<T>::valuation() const {
  for (size_t i = 0; i < c_.size(); ++i)
    if (!c_[i].is_zero()) return lead_ + static_cast<int>(i);
  return max_power() + 1;
}

template <class T>
Real Series1<T>::max_abs() const {
  Real m(0);
  for (const auto& c : c_) {
    Real a = magnitude(c);
    if (a > m) m = a;
  }
  return m;
}

template <class T>
Series1<T> Series1<T>::derivative() const {
  Series1 r(lead_ - 1, order());
  for (int i = 0; i <= order(); ++i) {
    int p = lead_ + i;
    r.c_[i] = c_[i];
    mul_long(r.c_[i], p);
  }
  return r;
}

template <class T>
Series1<T> Series1<T>::derivative_reciprocal() const {
  Series1 r(lead_ + 1, order());
  for (int i = 0; i <= order(); ++i) {
    int p = lead_ + i;
    r.c_[i] = c_[i];
    mul_long(r.c_[i], -p);
  }
  return r;
}

template <class T>
T Series1<T>::evaluate(const T& v) const {
  T acc;
  for (int i = order(); i >= 0; --i) acc = acc * v + c_[i];
  if (lead_ != 0) {
    T p = T(1);
    T base = lead_ > 0 ? v : T(1) / v;
    for (int k = 0; k < std::abs(lead_); ++k) p = p * base;
    acc = acc * p;
  }
  return acc;
}

template <class T>
Series1<T> operator*(const Series1<T>& a, const Series1<T>& b) {
  if (a.empty() || b.empty()) return Series1<T>::range(a.lead() + b.lead(), a.lead() + b.lead() - 1);
  int lead = a.lead() + b.lead();
  int hi = std::min(a.max_power() + b.lead(), b.max_power() + a.lead());
  Series1<T> r = Series1<T>::range(lead, hi);
  const auto& ac = a.data();
  const auto& bc = b.data();
  for (int k = 0; k <= hi - lead; ++k) {
    T acc;
    int ilo = std::max(0, k - b.order());
    int ihi = std::min(k, a.order());
    for (int i = ilo; i <= ihi; ++i) {
      if (ac[i].is_zero() || bc[k - i].is_zero()) continue;
      acc.fma_acc(ac[i], bc[k - i]);
    }
    r.data()[k] = std::move(acc);
  }
  return r;
}

template <class T>
Series1<T> inverse(const Series1<T>& a) {
  int v = a.valuation();
  if (v > a.max_power()) throw SeriesError("inverse of zero series");
  Series1<T> s = a.with_window(v, a.max_power());
  const auto& c = s.data();
  int n = s.order();
  Series1<T> r(-v, n);
  T inv0 = T(1) / c[0];
  r.data()[0] = inv0;
  for (int k = 1; k <= n; ++k) {
    T acc;
    for (int i = 1; i <= k; ++i) acc.fma_acc(c[i], r.data()[k - i]);
    r.data()[k] = -(acc * inv0);
  }
  return r;
}

std::string to_table(const Series1<Complex>& s, long digits) {
  std::ostringstream os;
  for (int i = 0; i <= s.order(); ++i)
    os << (s.lead() + i) << ' ' << s.data()[i].re.str(digits) << ' ' << s.data()[i].im.str(digits)
       << '\n';
  return os.str();
}

std::string to_table(const Series1<Real>& s, long digits) {
  std::ostringstream os;
  for (int i = 0; i <= s.order(); ++i)
    os << (s.lead() + i) << ' ' << s.data()[i].str(digits) << " 0\n";
  return os.str();
}

// ----------------------------------------------------- explicit instantiation

template class MSeries<Real>;
template class MSeries<Complex>;
template class Series1<Real>;
template class Series1<Complex>;

#define SEPLAB_INST(T)                                                                        \
  template MSeries<T> mul(const MSeries<T>&, const MSeries<T>&);                              \
  template MSeries<T> mul_serial(const MSeries<T>&, const MSeries<T>&);                       \
  template MSeries<T> poisson(const MSeries<T>&, const MSeries<T>&);                          \
  template MSeries<T> lie_exp(const MSeries<T>&, const MSeries<T>&, const Real&, int);        \
  template MSeries<T> compose(const MSeries<T>&, const std::vector<MSeries<T>>&);             \
  template MSeries<T> linear_substitute(const MSeries<T>&,                                    \
                                        const std::array<std::array<T, 2>, 2>&);              \
  template std::array<MSeries<T>, 2> hamiltonian_time1_flow(const MSeries<T>&, int, bool);    \
  template MSeries<T> jacobian_determinant(const std::array<MSeries<T>, 2>&);                 \
  template std::string to_table(const MSeries<T>&, long);                                     \
  template Series1<T> operator*(const Series1<T>&, const Series1<T>&);                        \
  template Series1<T> inverse(const Series1<T>&);
SEPLAB_INST(Real)
SEPLAB_INST(Complex)
#undef SEPLAB_INST

}  // namespace seplab
