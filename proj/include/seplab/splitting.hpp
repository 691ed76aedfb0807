// Splitting observables of a separatrix pair: the splitting function, the
// primary homoclinic orbits and their Lazutkin invariant, lobe area, the
// Fourier coefficient theta(eps), the resonant Stokes constant and the
// asymptotic fits across epsilon.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "seplab/manifolds.hpp"

namespace seplab {

// Message starts with the error kind (NoSignChange, RouteMismatch, ...).
class SplittingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ThetaDetail {
  CVec2 delta;       // W+(tau) - W-(tau)
  CVec2 wdot_minus;  // dW-/dtau
};
// Theta^-(tau) = omega(W+ - W-, dW-/dtau).
Complex splitting_function(const ManifoldPair& mp, const Complex& tau, ThetaDetail* detail = nullptr);
Real splitting_function_real(const ManifoldPair& mp, const Real& tau);

// Sign-change brackets of Theta^- on [start, start + 1) from `samples`
// equally spaced points.
std::vector<std::pair<Real, Real>> zero_brackets(const ManifoldPair& mp, int samples,
                                                 const Real& start = Real(0));

struct HomoclinicPoint {
  Real t_h;             // root of Theta^-
  Real t_minus;         // unstable-side time of the intersection point
  Real t_plus;          // stable-side time of the same point
  Real theta_residual;  // |Theta^-(t_h)|
  Real delta_norm;      // |W+(t_h) - W-(t_h)|
};
// Illinois-secant root of Theta^- in [a, b], followed by the 2x2 Newton
// solve W+(t_plus) = W-(t_h).  Errors: NoSignChange,
// TwoComponentInconsistency.
HomoclinicPoint find_homoclinic(const ManifoldPair& mp, const Real& a, const Real& b);

// Shifts the phase of W+ so that both separatrices pass through the
// homoclinic point bracketed by [a, b] at the same time.  Returns the shift.
Real align_phases(ManifoldPair& mp, const Real& a, const Real& b);

struct InvariantRoutes {
  Real tangent;     // omega(dW+/dtau, dW-/dtau) at the intersection
  Real derivative;  // d Theta^- / d tau at t_h by a Cauchy integral
  Real relative_difference;
};
// Errors: RouteMismatch when the routes differ by more than `route_tol`
// (relative).
InvariantRoutes homoclinic_invariant(const ManifoldPair& mp, const HomoclinicPoint& h,
                                     int cauchy_nodes = 64, const Real& cauchy_radius = Real::ratio(1, 4),
                                     const Real& route_tol = pow10(-20));

// Gauss-Legendre nodes and weights on [-1, 1] at working precision.
void gauss_legendre(int n, std::vector<Real>& nodes, std::vector<Real>& weights);
// Integral of Theta^- over [t1, t2] (the lobe between consecutive homoclinic
// points).  Errors: QuadratureNonConvergence.
Real lobe_area(const ManifoldPair& mp, const Real& t1, const Real& t2, int nodes = 0);

// nu = -(M + 2) log(eps) / (2 pi).
Real default_nu(const Real& epsilon, int M = 3);
int default_fourier_nodes(long digits);
// Trapezoid rule for int e^{2 pi i t} Theta^-(t + pi i / eps) dt on
// Im t = -nu, |Re t| <= 1/2.  Errors: DomainViolation.
Complex fourier_theta(const ManifoldPair& mp, const Real& nu, int nodes);

// max over `samples` points of [0, 1) of |Theta^-(tau + 1) - Theta^-(tau)|.
Real quasi_periodicity_defect(const ManifoldPair& mp, int samples = 16);

struct SplittingOptions {
  int zero_samples = 32;
  int cauchy_nodes = 64;
  Real cauchy_radius = Real::ratio(1, 4);
  std::optional<Real> nu;  // default_nu when unset
  int fourier_nodes = 0;   // 0 = default_fourier_nodes(digits)
  bool lobe = true;
  bool fourier = true;
  bool quasi_periodicity = false;
  int qp_samples = 16;
};

struct SplittingReport {
  Real epsilon, mu, lambda;
  long digits = 0;
  int zero_count = 0;
  std::array<Real, 2> t_h;
  std::array<Real, 2> omega;        // tangent route
  std::array<Real, 2> omega_theta;  // derivative route
  // t_plus - t_minus: stable-side minus unstable-side time of each orbit.
  std::array<Real, 2> time_offset;
  Real lobe_area;
  Real nu;
  Complex theta_eps;
  Real scaled;  // |Omega| e^{2 pi^2 / eps}
  Real qp_defect;
  double seconds = 0;
};

SplittingReport compute_report(const PolyMapFamily& f, const Real& epsilon, const PrecisionContext& ctx,
                               const SplittingOptions& opt = {}, const ManifoldOptions& mopt = {});
// Report for an already constructed pair.
SplittingReport compute_report(const ManifoldPair& mp, const PrecisionContext& ctx,
                               const SplittingOptions& opt = {});

std::string report_csv_header();
std::string report_csv_row(const SplittingReport& r);

// ---------------------------------------------------------------- Stokes

struct StokesOptions {
  int terms = 0;   // resonant series terms (0 = from digits)
  int shift = 0;   // iterations K between series point and t (0 = auto)
  int poly_degree = 7;
  int leading_index = 0;
  Real re_t{0};    // evaluate on t = re_t - i s
};
struct StokesEstimate {
  Real depth;
  Complex theta;
};
struct StokesResult {
  Complex theta;
  Real error_estimate;
  std::vector<StokesEstimate> estimates;
  RVec2 leading;
};
// theta(s) = e^{2 pi s} omega(W0+(t) - W0-(t), dW0-/dt) at t = re_t - i s,
// extrapolated with theta + p(s) e^{-2 pi s}.  Errors: NonConvergence.
StokesResult stokes_constant_resonant(const PolyMapFamily& f0, const std::vector<Real>& depths,
                                      const PrecisionContext& ctx, const StokesOptions& opt = {});
std::vector<Real> default_stokes_depths();

// ---------------------------------------------------------------- fits

struct AsymptoticFit {
  int M = 0;
  std::vector<Real> vartheta;  // scaled = sum vartheta_n eps^n
  Real fit_residual;
  // log(scaled) = sum c_n eps^n; vartheta0 from exp(c_0).
  std::vector<Real> log_coeffs;
  Real log_vartheta0;
  Real log_fit_residual;
};
// Errors: IllConditionedFit.
AsymptoticFit fit_asymptotics(const std::vector<Real>& eps, const std::vector<Real>& scaled, int M);
AsymptoticFit fit_asymptotics(const std::vector<SplittingReport>& reports, int M);

// log y = c0 + c1 / eps + sum_k d_k g_k(eps); returns c1.  `extra` selects
// correction terms: 'e' = eps, 'l' = log eps.
struct ExponentFit {
  Real slope;  // coefficient of 1/eps
  std::vector<Real> coeffs;
  Real residual;
};
ExponentFit fit_exponent(const std::vector<Real>& eps, const std::vector<Real>& values,
                         const std::string& extra = "e");

}  // namespace seplab
