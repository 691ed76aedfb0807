// Formal normal form of a 1:3 resonant family: f_mu is conjugated to
// R o phi^1_H with H = I A(mu, I) + 2 Re(z^3) B(mu, I), I = x^2 + y^2.
#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "seplab/map_family.hpp"

namespace seplab {

class NormalFormError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct NormalFormData {
  int order = 0;  // N: the conjugated map agrees with R o phi_H through degree N
  // Rotation R = R_{rotation_sign * 2 pi / 3} of the linear part at mu = 0.
  int rotation_sign = 1;
  // Generator H (three variables x, y, mu) through weighted degree N + 1.
  RSeries H;
  // a_{k,m}: coefficient of I^{k+1} mu^m; b_{k,m}: coefficient of
  // Re(z^{k+3} zbar^k) mu^m divided by 2, so that B = sum b_{k,m} I^k mu^m
  // and b_{0,0} = 6 B_{0,0}.
  std::map<std::pair<int, int>, Real> a;
  std::map<std::pair<int, int>, Real> b;
  Real b00;
  Real a01;
  // Normal coordinates -> original coordinates (Psi) and its inverse (Phi),
  // truncated at order N.
  std::array<RSeries, 2> to_original;
  std::array<RSeries, 2> to_normal;
  // R o phi^1_H truncated at order N.
  PolyMapFamily normalized_family;
  // Diagnostics: largest excluded coefficient left after each secondary step.
  Real max_inconsistency;
};

// Degree-by-degree Lie-transform normalization.  Errors: DegenerateResonance,
// NonGenericUnfolding (NormalFormError).
NormalFormData normalize(const PolyMapFamily& f, int N, const PrecisionContext& ctx);

// H assembled from the (a, b) tables at the data's order.
RSeries normal_form_hamiltonian(const NormalFormData& nf);

// x o phi^1_H, y o phi^1_H for a generator without quadratic (mu^0) terms.
std::array<RSeries, 2> time_one_map(const RSeries& H, int order);

// Generator G of a tangent-to-identity map h = phi^1_G through map degree
// `order` (G through order + 1).  Series tables use order + 1.
RSeries log_map(const std::array<RSeries, 2>& h, int order);

// Conversion between real (x, y, mu) and complex (z, zbar, mu) coefficients.
CSeries to_complex_basis(const RSeries& s);
RSeries from_complex_basis(const CSeries& s);

// Rotation matrix R_{sign * 2 pi / 3}.
std::array<std::array<Real, 2>, 2> rotation_matrix(int sign);

// Saddle predictions from the cubic truncation of H:
// points in normal coordinates at parameter mu (angles pi/3 + 2 pi k/3 when
// a01 mu > 0, 2 pi k / 3 otherwise).
std::array<RVec2, 3> predicted_saddles_normal(const NormalFormData& nf, const Real& mu);
std::array<RVec2, 3> predicted_saddles(const NormalFormData& nf, const Real& mu);
// Multiplier prediction log lambda = 6 sqrt(3) |a01 mu| at leading order.
Real predicted_epsilon(const NormalFormData& nf, const Real& mu);
// Leading-order inverse of predicted_epsilon on the branch sign(mu) = branch.
Real predicted_mu(const NormalFormData& nf, const Real& epsilon, int branch);

// Evaluates a truncated transform at (x, y, mu).
RVec2 apply_transform(const std::array<RSeries, 2>& t, const RVec2& p, const Real& mu);
CVec2 apply_transform(const std::array<RSeries, 2>& t, const CVec2& p, const Real& mu);

// CSV table "kind,k,m,value" with full-precision decimal strings.
std::string coefficient_csv(const NormalFormData& nf);

}  // namespace seplab
