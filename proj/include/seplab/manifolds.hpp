// Numerical separatrices of the period-3 saddles: high-order
// parameterizations at the saddles, evaluation at complex times by
// iteration, phase normalization, and the resonant (mu = 0) manifolds.
#pragma once

#include <atomic>
#include <memory>
#include <string>
#include <vector>

#include "seplab/formal_separatrix.hpp"

namespace seplab {

class ManifoldError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Side { unstable, stable };

// Taylor coefficients of K with F(K(s)) = K(lambda s) (unstable) or
// F(K(s)) = K(s / lambda) (stable), K(0) = saddle.
struct SaddleParameterization {
  Side side = Side::unstable;
  std::vector<RVec2> coeffs;
  Real lambda;
  // Series is evaluated only for |s| <= radius.
  Real radius;
  // Largest residual |F(K(s)) - K(lambda^{+-1} s)| at |s| = radius.
  Real seed_residual;
};

// Coefficients of the polynomial map at a fixed parameter: x^i y^j terms.
struct PlaneTerm {
  int i, j;
  Real c;
};
struct PlanePoly {
  std::array<std::vector<PlaneTerm>, 2> comps;
  int degree = 0;
};
PlanePoly plane_poly_at(const std::array<RSeries, 2>& comps, const Real& mu);

// Parameterization of order `order` around `point` (a fixed point of F =
// f^3) with K'(0) = `tangent`.
SaddleParameterization parameterize_saddle(const PlanePoly& f, const RVec2& point,
                                           const RVec2& tangent, const Real& lambda, Side side,
                                           int order, const PrecisionContext& ctx);

struct ManifoldOptions {
  int branch = 1;             // sign of a01 * mu
  int param_order = 0;        // 0 = automatic (depends on digits)
  int nf_order = 6;           // normal form used for predictions and the section
  Real singularity_margin{0.5};  // evaluate() refuses |Im tau| > pi/eps - margin
  Real phase_shift{0};        // extra shift added to both phase normalizations
};

// One separatrix W(tau) with W(tau + 1) = F(W(tau)).
class Manifold {
 public:
  Manifold() = default;
  Manifold(std::shared_ptr<const MapEvaluator> ev, SaddleParameterization k, Real epsilon,
           Real scale);
  Side side() const { return k_.side; }
  const Real& epsilon() const { return eps_; }
  const SaddleParameterization& parameterization() const { return k_; }
  // Value at tau, with dW/dtau when `deriv` is non-null.  `extra_steps`
  // moves the series evaluation point that many further units toward the
  // saddle (used for consistency checks).  Errors: OutOfDomain,
  // PrecisionExhausted.
  CVec2 evaluate(const Complex& tau, CVec2* deriv = nullptr, int extra_steps = 0) const;
  RVec2 evaluate_real(const Real& tau, RVec2* deriv = nullptr) const;
  // One unit of time: F(w).
  CVec2 map_forward(const CVec2& w) const { return ev_->F(w); }
  // Shifts the time origin: new W(tau) = old W(tau + shift).
  void shift_phase(const Real& shift);
  // Parameter scale c in s = c exp(+-eps tau).
  const Real& scale() const { return c_; }
  void set_domain_limit(const Real& max_im) { max_im_ = max_im; }
  // log10 of the largest forward-error amplification seen so far.
  double max_amplification_log10() const { return stats_->max_amp.load(); }
  // Iteration count used by the most recent evaluate() call.
  int last_iterations() const { return stats_->last_iter.load(); }

 private:
  std::shared_ptr<const MapEvaluator> ev_;
  SaddleParameterization k_;
  Real eps_;
  Real c_;
  Real max_im_{-1};
  // Diagnostics updated from concurrent evaluations (shared by copies).
  struct Stats {
    std::atomic<double> max_amp{0};
    std::atomic<int> last_iter{0};
  };
  std::shared_ptr<Stats> stats_ = std::make_shared<Stats>();
  double amp_limit_ = 0;
};

// The primary separatrix pair joining two saddles of the period-3 orbit.
struct ManifoldPair {
  PolyMapFamily family;
  std::shared_ptr<const MapEvaluator> ev;
  ResonantOrbitData orbit;
  RVec2 unstable_saddle, stable_saddle;
  Manifold W_minus;  // unstable separatrix of unstable_saddle
  Manifold W_plus;   // stable separatrix of stable_saddle
  // Section function whose zero fixes tau = 0 (normal-form horizontal axis).
  std::array<RSeries, 2> to_normal;
  Real tau_crossing_minus, tau_crossing_plus;  // crossing times before normalization
  Real epsilon, mu, lambda;
  int branch = 1;
};

// Normal-form y coordinate of a point (zero on the symmetry axis).
Real section_value(const ManifoldPair& mp, const RVec2& w);

// Full construction at parameter epsilon: mu(eps), orbit, saddle pair,
// parameterizations and phase normalization.  `nf` supplies predictions and
// the section (normalize(f, options.nf_order) if null).
ManifoldPair build_manifold_pair(const PolyMapFamily& f, const Real& epsilon,
                                 const PrecisionContext& ctx, const ManifoldOptions& opt = {},
                                 const NormalFormData* nf = nullptr);

// Seed evaluation from the outer formal series in map coordinates at
// tau_seed + frac, choosing tau_seed so that the next-order term is below
// 100 residual_tol.  Errors: SeedAccuracyUnreachable.
struct FormalSeed {
  RVec2 point;
  Real tau;
  Real next_order_estimate;
};
FormalSeed seed_from_formal(const FormalSeparatrix& fs, const NormalFormData& nf,
                            const Real& epsilon, Side side, const Real& frac,
                            const PrecisionContext& ctx);

struct PathSample {
  Complex tau;
  CVec2 value;
  CVec2 derivative;
  Real step_residual;  // |W(tau) - F(W(tau - 1))|, 0 for the first column
};
struct ContinuationPath {
  Complex anchor;
  std::vector<PathSample> samples;
};
// Samples along the vertical segment from Re tau = re_t on the real axis up
// to tau = re_t + i (pi/eps - im_depth), each paired with the sample one unit
// to the left.  Errors: OutOfDomain when im_depth < lambda_margin.
ContinuationPath continue_to_singularity(const Manifold& m, const Real& re_t, const Real& im_depth,
                                         int n_samples, const Real& lambda_margin = Real(4));

// Inner expansion (map coordinates) at tau = t + pi i / eps from the
// resummed columns.
CVec2 inner_expansion(const SingularExpansion& se, const Real& epsilon, const Complex& t);

// -------------------------------------------------------------- resonant map

// Asymptotic 1/t series W0(t) = sum_{k>=1} w_k t^{-k} of the resonant third
// iterate F0 with W0(t+1) = F0(W0(t)).
struct ResonantSeries {
  std::vector<CVec2> w;  // w[k], k >= 1 (real data stored as complex)
  RVec2 leading;         // w_1
};
// Candidate leading coefficients a with q(a) = -a for the quadratic part q of
// F0 = f0^3; sorted by angle.
std::vector<RVec2> resonant_leading_candidates(const PolyMapFamily& f0, const PrecisionContext& ctx);
ResonantSeries resonant_formal_series(const PolyMapFamily& f0, const RVec2& leading, int terms,
                                      const PrecisionContext& ctx);

class ResonantManifolds {
 public:
  // `shift` = number K of map iterations between the series evaluation
  // point and the requested time.
  ResonantManifolds(const PolyMapFamily& f0, ResonantSeries series, int shift, int terms);
  // W0^-(t) (forward iterate from t - K) and W0^+(t) (backward from t + K).
  CVec2 W_minus(const Complex& t, CVec2* deriv = nullptr) const;
  CVec2 W_plus(const Complex& t, CVec2* deriv = nullptr) const;
  // Equation residual |W(t+1) - F0(W(t))| for either side.
  Real residual(const Complex& t, Side side) const;
  const ResonantSeries& series() const { return series_; }
  int shift() const { return shift_; }

 private:
  CVec2 eval_series(const Complex& t, CVec2* deriv) const;
  std::shared_ptr<const MapEvaluator> ev_;
  ResonantSeries series_;
  int shift_, terms_;
};

struct ResonantSample {
  Complex t;
  CVec2 minus, plus;
  Real residual_minus, residual_plus;
};
// Samples on the grid; points must have |arg| inside the common sectors
// (SectorViolation otherwise).
std::vector<ResonantSample> resonant_manifolds(const ResonantManifolds& rm,
                                               const std::vector<Complex>& t_grid);

// CSV export tau_re,tau_im,x_re,x_im,y_re,y_im.
std::string manifold_samples_csv(const Manifold& m, const std::vector<Complex>& taus);

}  // namespace seplab
