#pragma once

#include "nlslab/common.hpp"
#include "nlslab/grid.hpp"
#include "nlslab/jost.hpp"
#include "nlslab/scattering.hpp"

namespace nlslab {

// Distorted Fourier basis K(x,k) (rows x_i, cols k_j) together with its
// singular/regular split sqrt(2pi) K = K_S + K_R.
//
// K_S lives on smooth half-line cutoffs chi_pm (chi_+ + chi_- = 1):
//   K_S(x,k) = chi_+(x) [a_pp(k) e^{ikx} + a_pm(k) e^{-ikx}]
//            + chi_-(x) [a_mp(k) e^{ikx} + a_mm(k) e^{-ikx}],
// with plane-wave coefficients built from T and R_pm; K_R collects the
// (m - 1) corrections and decays in x like the potential tails.
struct DistortedBasis {
  Grid grid;
  Potential potential;
  ScatteringData scattering;
  CMat K;
  CMat K_S, K_R;
  Vec chi_plus, chi_minus;
  CVec a_pp, a_pm, a_mp, a_mm;

  // a_coeff(side, eps): side tags the chi_side region, eps the exponential
  // e^{eps i k x}.
  const CVec& a_coeff(char side, char eps) const;
};

// Frozen cutoff bump: Phi(x) = (1/4)(1 + cos(pi x / 2)) on [-2,2], else 0;
// chi_+ is its normalized cumulative trapezoid integral.
Vec cutoff_bump(const Vec& xs);
Vec cutoff_chi_plus(const Vec& xs);

// Assemble the basis from a Jost field and scattering data on `grid`
// (which must equal the grid both were computed on). Works for banded
// k-lattices as well; the split identity holds to roundoff by construction.
DistortedBasis build_basis(const JostField& J, const ScatteringData& S,
                           const Grid& grid);

// f_tilde(k_j) = dx * sum_i conj(K(x_i,k_j)) f(x_i).
CVec forward(const DistortedBasis& B, const CVec& f);

// f(x_i) = dk * sum_j K(x_i,k_j) g(k_j).
CVec inverse(const DistortedBasis& B, const CVec& g);

// inverse(m .* forward(f)); m(k) = k^2 realizes H = -d_xx + V.
CVec multiplier(const DistortedBasis& B, const CVec& m, const CVec& f);

// which = '0': inverse(g); 'S'/'R': (1/sqrt(2pi)) * dk * sum_j K_*(x,k_j) g.
CVec component_project(const DistortedBasis& B, const CVec& g, char which);

}  // namespace nlslab
