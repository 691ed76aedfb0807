// One-parameter families of area-preserving polynomial maps f_mu(x, y).
#pragma once

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "seplab/precision.hpp"
#include "seplab/series.hpp"

namespace seplab {

class MapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Exact coefficient of x^i y^j mu^k, stored as a rational or decimal string so
// the family can be re-instantiated at any precision.
struct MapTerm {
  int i = 0, j = 0, k = 0;
  std::string num = "0";
  std::string den = "1";
};

struct PolyMapFamily {
  std::string name;
  std::string description;
  // Components as series in (x, y, mu); order = degree bound.
  std::array<RSeries, 2> comps;
  // Closed-form inverse family when known.
  std::optional<std::array<RSeries, 2>> inverse;
  // Exact source terms (empty for families produced numerically).
  std::array<std::vector<MapTerm>, 2> exact_terms;
  std::optional<std::array<std::vector<MapTerm>, 2>> exact_inverse_terms;
  // Recomputes a numerically produced family (e.g. a conjugated one) at the
  // current working precision.
  std::function<PolyMapFamily()> builder;

  int degree() const;
  // Rebuild the numeric components at the current working precision from
  // exact terms (no-op for numerically produced families).
  PolyMapFamily at_working_precision() const;
};

PolyMapFamily family_from_terms(std::string name, std::string description,
                                const std::array<std::vector<MapTerm>, 2>& terms,
                                const std::optional<std::array<std::vector<MapTerm>, 2>>& inv);

// Recentred area-preserving Henon map at the 1:3 resonance:
// f_mu(x, y) = (y, -x - (1 + mu) y - y^2).
PolyMapFamily builtin_henon13();
// A cubic variant (y, -x - (1+mu) y - y^2 + y^3/5) used as a second test family.
PolyMapFamily builtin_henon13_cubic();
std::vector<std::string> builtin_family_names();
PolyMapFamily builtin_family(const std::string& name);  // throws MapError listing names

// Resonance data of the uncentred family (x,y) -> (y, -x + a + s - y^2):
// trace -1 at the fixed point (p, p) gives p = 1/2 and a = 5/4.
inline constexpr long kHenonA_num = 5, kHenonA_den = 4;
inline constexpr long kHenonFixed_num = 1, kHenonFixed_den = 2;

// Planar polynomial map at a fixed parameter value, evaluated on complex points.
class PlanarMap {
 public:
  PlanarMap() = default;
  PlanarMap(const std::array<RSeries, 2>& comps, const Real& mu);

  CVec2 operator()(const CVec2& p) const;
  CMat2 jacobian(const CVec2& p) const;
  // Value and Jacobian together.
  CVec2 eval(const CVec2& p, CMat2* jac) const;
  int degree() const { return degree_; }

 private:
  struct Term {
    int i, j;
    Real c;
  };
  std::array<std::vector<Term>, 2> terms_;
  int degree_ = 0;
};

// f_mu together with its inverse (closed form when available, Newton
// otherwise) and the third iterate F = f^3.
class MapEvaluator {
 public:
  MapEvaluator(const PolyMapFamily& fam, const Real& mu);

  const Real& mu() const { return mu_; }
  CVec2 f(const CVec2& p) const { return f_(p); }
  CVec2 f(const CVec2& p, CMat2* jac) const { return f_.eval(p, jac); }
  CVec2 finv(const CVec2& p) const;
  CVec2 finv(const CVec2& p, CMat2* jac) const;
  CVec2 F(const CVec2& p, CMat2* jac = nullptr) const;
  CVec2 Finv(const CVec2& p, CMat2* jac = nullptr) const;
  bool has_closed_inverse() const { return has_inverse_; }
  // Newton tolerance for the implicit inverse.
  void set_inverse_tolerance(const Real& tol) { inv_tol_ = tol; }

 private:
  Real mu_;
  PlanarMap f_;
  PlanarMap finv_;
  bool has_inverse_ = false;
  Real inv_tol_;
};

CMat2 matmul(const CMat2& a, const CMat2& b);
CVec2 matvec(const CMat2& a, const CVec2& v);
Complex det(const CMat2& a);
CMat2 identity2();

// Third iterate as a truncated series family.
PolyMapFamily third_iterate(const PolyMapFamily& f, int order);

// Conjugated family Psi^{-1} o f o Psi for the polynomial symplectic change
// Psi = S o L with L a linear symplectic matrix and S(x,y) = (x, y + c x^2).
struct SymplecticChange {
  // L = [[a, b], [c, (1 + b c) / a]] and the shear coefficient s, all exact
  // rationals num/den so the change can be rebuilt at any precision.
  std::array<long, 4> num{1, 0, 0, 0};
  long den = 1;
  std::array<std::array<Real, 2>, 2> L() const;
  Real shear() const;
  std::array<RSeries, 2> forward(int order) const;  // Psi
  std::array<RSeries, 2> backward(int order) const;  // Psi^{-1}
};
SymplecticChange random_symplectic_change(unsigned seed, double size = 0.3);
PolyMapFamily conjugate_family(const PolyMapFamily& f, const SymplecticChange& psi);

struct ResonantOrbitData {
  Real mu;
  std::array<RVec2, 3> points;  // points[k+1] = f(points[k])
  Real lambda;
  Real epsilon;
};

// Newton solve of F_mu(v) = v from `seed`; multipliers from the trace of DF.
// Errors: NewtonDivergence, NotHyperbolic (both as MapError).
ResonantOrbitData find_period3_orbit(const PolyMapFamily& f, const Real& mu, const RVec2& seed,
                                     const PrecisionContext& ctx);

// Seed predictor: for a parameter value returns the expected location of a
// period-3 point (usually from the normal form's saddle).
using OrbitPredictor = std::function<RVec2(const Real& mu)>;

// Secant solve of log lambda(mu) = epsilon starting from mu_guess; each
// evaluation re-converges the orbit from the predictor's seed.
ResonantOrbitData mu_of_epsilon(const PolyMapFamily& f, const Real& epsilon, const Real& mu_guess,
                                const OrbitPredictor& predictor, const PrecisionContext& ctx);

}  // namespace seplab
