// Formal separatrix of the normal form flow in powers of epsilon and
// sigma = tanh(epsilon tau / 2), its re-expansion near tau = pi i / epsilon,
// and the formal variational solution.
#pragma once

#include <string>
#include <vector>

#include "seplab/normal_form.hpp"

namespace seplab {

class FormalSeriesError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using SigmaPoly = std::vector<Real>;  // coefficient of sigma^k at index k

// Polynomial in sigma with coefficients indexed by the power of epsilon.
struct EpsPoly {
  std::vector<SigmaPoly> c;  // c[n] multiplies epsilon^n
  explicit EpsPoly(int max_eps = 0) : c(static_cast<size_t>(max_eps + 1)) {}
  int max_eps() const { return static_cast<int>(c.size()) - 1; }
};

struct FormalSeparatrix {
  int order = 0;   // n_max
  int branch = 1;  // sign of P_1 (and of a01 * mu)
  // Coefficients of the third-iterate generator Ht = 3 H.
  RSeries Ht;
  Real a_t;  // coefficient of mu I in Ht
  Real b_t;  // Ht cubic term = (b_t / 3)(x^3 - 3 x y^2)
  std::vector<Real> mu;  // mu[n], mu[0] = 0
  std::vector<SigmaPoly> P, Q;
  // Lemma degree bound violations found by the post-check.
  std::vector<std::string> degree_violations;
};

// Base case n = 1 for the given branch.
FormalSeparatrix formal_separatrix_init(const NormalFormData& nf, int branch = 1);
// Appends order n = state.order + 1.  Errors: SingularSystem, parity corruption.
void solve_order(FormalSeparatrix& state);
// Orders 1..n_max; requires n_max <= nf.order - 1.
FormalSeparatrix solve_formal_separatrix(const NormalFormData& nf, int n_max, int branch = 1);

// Hamilton-equation residual of the truncated series, per epsilon power
// 0..max_eps (max over sigma coefficients and both components).
std::vector<Real> hamilton_residual(const FormalSeparatrix& fs, int n, int max_eps);
// Discrete residual W_n(tau + 1) - F(W_n(tau)) per epsilon power 0..max_eps,
// F given by its components in normal coordinates (x, y, mu).
std::vector<Real> map_residual(const std::array<RSeries, 2>& F, const FormalSeparatrix& fs, int n,
                               int max_eps);
// Third iterate phi^1_{3H} used as F in normal coordinates.
std::array<RSeries, 2> normal_third_iterate(const NormalFormData& nf, int order);
// Max coefficient magnitude of the map residual through epsilon^{n+1}.
Real formal_separatrix_map_residual(const NormalFormData& nf, const FormalSeparatrix& fs, int n);
// First epsilon power whose residual exceeds tol (max_eps + 1 if none).
int residual_valuation(const std::vector<Real>& per_power, const Real& tol);

// Evaluates the truncated series sum_{k<=n} eps^k (P_k, Q_k)(sigma) and mu(eps).
CVec2 evaluate_formal(const FormalSeparatrix& fs, int n, const Real& eps, const Complex& tau);
Real mu_series(const FormalSeparatrix& fs, int n, const Real& eps);

// ---------------------------------------------------------------- singular

// Double series sum c_{c,s} w^c v^s with w = eps t, v = 1/t, c in [0, cmax],
// s in [smin, smax].  eps^c t^{c - s} is the monomial w^c v^s.
class DSeries {
 public:
  DSeries() = default;
  DSeries(int cmax, int smin, int smax);
  int cmax() const { return cmax_; }
  int smin() const { return smin_; }
  int smax() const { return smax_; }
  Real at(int c, int s) const;
  Real& ref(int c, int s);
  DSeries& operator+=(const DSeries& o);
  DSeries& operator-=(const DSeries& o);
  DSeries& operator*=(const Real& k);
  DSeries with_range(int smin, int smax) const;
  // d/dt: w^c v^s -> (c - s) w^c v^{s+1}
  DSeries dt() const;
  // Termwise antiderivative in t; throws on a t^{-1} term (log).
  DSeries integrate_t(const Real& tol) const;
  // 1/a; the w^0 coefficient of the lowest v power must be nonzero.
  DSeries inverse() const;
  // Column c as a Laurent series in v = 1/t (coefficient of eps^c t^{c-s} at v^{s-c}).
  Series1<Real> column(int c) const;
  Complex evaluate(const Real& eps, const Complex& t) const;
  Real max_abs() const;

 private:
  int cmax_ = 0, smin_ = 0, smax_ = -1;
  std::vector<Real> a_;  // [c][s - smin]
};
DSeries operator*(const DSeries& a, const DSeries& b);
DSeries operator+(DSeries a, const DSeries& b);
DSeries operator-(DSeries a, const DSeries& b);
// Polynomial (x, y, mu) evaluated on double series.
DSeries evaluate_poly(const RSeries& p, const DSeries& x, const DSeries& y, const DSeries& mu);

struct SingularExpansion {
  int order = 0;  // n_max of the source
  int cmax = 0;   // number of columns - 1
  int depth = 0;
  // Normal-form coordinates and original map coordinates.
  std::array<DSeries, 2> W_normal;
  std::array<DSeries, 2> W_map;
  DSeries mu;  // mu(eps) as a double series
  // Formal variational solution (normal-form coordinates), v-powers from -2.
  std::array<DSeries, 2> Xi;
  bool has_xi = false;
  // Valid v-power range of the column with index c (t-powers c - s).
  int column_smax(int c) const;
};

// Bernoulli numbers B_0..B_n as exact rationals "p/q".
std::vector<std::pair<std::string, std::string>> bernoulli_numbers(int n);

// Re-expansion of eps^n Z_n(coth(eps t / 2)) by columns.  `cmax` columns
// 0..cmax; `depth` caps the 1/t depth (t-powers >= -depth).
SingularExpansion resum_by_columns(const FormalSeparatrix& fs, const NormalFormData& nf, int cmax,
                                   int depth);
// Populates Xi by reduction of order.  Errors: LogTermDetected.
void formal_variational(SingularExpansion& se, const FormalSeparatrix& fs);

// CSV dump of mu_n and the sigma coefficients.
std::string formal_series_csv(const FormalSeparatrix& fs);

}  // namespace seplab
