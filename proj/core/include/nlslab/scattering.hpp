#pragma once

#include <string>

#include "nlslab/common.hpp"
#include "nlslab/jost.hpp"

namespace nlslab {

// Transmission/reflection data on the half-shifted k lattice, plus the
// genericity classification and the fitted low-k slope.
struct ScatteringData {
  Vec ks;
  CVec T, R_plus, R_minus;
  bool generic = false;
  cplx generic_value{0.0, 0.0};  // int V(x) m_+(x,0) dx
  cplx alpha_slope{0.0, 0.0};    // T(k) ~ alpha k, set by low_k_expansion

  // Per-k scattering matrix view S(k) = [[T, R_+], [R_-, T]].
  Eigen::Matrix2cd S_at(int j) const {
    Eigen::Matrix2cd s;
    s << T[j], R_plus[j], R_minus[j], T[j];
    return s;
  }
};

// T and R_pm from the Jost sweeps: 1/T = 1 - (1/2ik) int V m_+ dx and
// R_-/T, R_+/T from the mirrored integrals, realized through the exact
// plane-wave matching coefficients of the staircase model (identical to the
// defining integrals for piecewise-constant V; the quadrature route is kept
// as a test cross-check).
ScatteringData coefficients(const JostField& J, const Potential& V);

// Exact delta-potential formulas T = 2ik/(2ik - q), R_pm = q/(2ik - q).
ScatteringData delta_closed_form(double q, const Vec& ks);

// Genericity: value = int V(x) m_+(x,0) dx from a dedicated k = 0 column
// (the production lattice excludes k = 0 by the half-shift), classified
// against the relative threshold |value| > 1e-8 ||V||_L1.
struct GenericityResult {
  bool generic = false;
  cplx value{0.0, 0.0};
};
GenericityResult is_generic(const JostField& J, const Potential& V);

// Least-squares slopes over the 8 smallest-|k| nodes: T(k) ~ alpha k and
// R_pm(k) ~ -1 + alpha_pm k. Requires a generic classification; stores
// alpha into S.alpha_slope.
struct LowKExpansion {
  cplx alpha{0.0, 0.0};
  cplx alpha_plus{0.0, 0.0};
  cplx alpha_minus{0.0, 0.0};
};
LowKExpansion low_k_expansion(ScatteringData& S);

// Independent square-barrier oracle via the analytic 2x2 transfer matrix
// (kappa = sqrt(k^2 - K) branches); shares no Jost code.
ScatteringData barrier_transfer_matrix(double height, double half_width,
                                       const Vec& ks);

// CSV export: header `k,re_T,im_T,re_Rp,im_Rp,re_Rm,im_Rm`.
void save_scattering_csv(const ScatteringData& S, const std::string& path);

}  // namespace nlslab
