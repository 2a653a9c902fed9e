#pragma once

#include <vector>

#include "nlslab/common.hpp"
#include "nlslab/dft.hpp"
#include "nlslab/evolve.hpp"
#include "nlslab/grid.hpp"

namespace nlslab {

// Norms tracked along a linear flow:
//   sup            sup_x |phi(t,x)|
//   weighted_sup   sup_x <x>^{-beta} |phi(t,x)|
//   weighted_dx_L2 || <x>^{-beta} d_x phi(t, .) ||_{L^2}
//   hk1_profile    (||f_tilde||_2^2 + ||d_k f_tilde||_2^2)^{1/2} of the
//                  linear profile e^{-itk^2} forward(u(t)) (t-constant for
//                  the linear flow; the normalization the decay bounds are
//                  measured against).
enum class NormKind { sup, weighted_sup, weighted_dx_L2, hk1_profile };

struct DecaySeries {
  std::vector<double> ts;
  Vec norms;
  NormKind kind = NormKind::sup;
  double beta = 0.0;
  char component = '0';  // '0' whole solution, 'S'/'R' split parts
  double t_fit_min = 20.0;
  double fitted_slope = 0.0;
  double slope_ci = 0.0;  // 1.96 * standard error of the slope
};

// Evolve h linearly (exactly unitary propagator), project onto the
// requested basis component at each time, record the requested norm, and
// fit the log-log slope over ts >= t_fit_min. Weighted norms against a
// non-generic potential require f_tilde(0) = 0 (odd data for even V);
// violating data raises ContractError naming the hypothesis.
DecaySeries norm_series(const DistortedBasis& B, const CVec& h,
                        const std::vector<double>& times, NormKind kind,
                        char component, double beta = 0.0);

// Local-smoothing series ||<x>^{-beta} d_x (e^{itH} h)_component||_{L^2}
// with the flat spectral derivative; raw (not t-multiplied) norms.
DecaySeries smoothing_series(const DistortedBasis& B, const CVec& h,
                             const std::vector<double>& times, double beta,
                             char component);

// Ordinary least squares of log(norm) on log(t) over ts >= t_fit_min.
// Needs >= 5 points in the window and positive norms throughout it.
struct SlopeFit {
  double slope = 0.0;
  double ci = 0.0;
};
SlopeFit fit_decay_rate(const DecaySeries& series);

// Operator-norm probe for the oscillatory symbol operators
//   g |-> 1_{x >= -1} <x>^beta int e^{i lambda x} symbol(x, lambda)
//                              g(lambda) d lambda
// with symbol one of m_+ - 1 (m_minus_1), d_x m_+ (dx_m), d_k m_+ (dk_m),
// d_k d_x m_+ restricted to |lambda| <= 1 (dkdx_m). Discretized on matched
// grids n = 1024 * 2^r, r < refinements (X = 40); the largest singular
// value is found by power iteration on A^* A and scaled by sqrt(dx * dk).
// Boundedness reads off the returned sequence plateauing under refinement.
enum class SymbolKind { m_minus_1, dx_m, dk_m, dkdx_m };
Vec pdo_norm_probe(SymbolKind kind, const DistortedBasis& B, int refinements,
                   double beta = 1.0);

}  // namespace nlslab
