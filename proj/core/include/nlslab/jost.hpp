#pragma once

#include "nlslab/common.hpp"
#include "nlslab/grid.hpp"
#include "nlslab/potentials.hpp"

namespace nlslab {

// Volterra solution record: m_pm(x_i, k_j) with k- and x-derivative
// companions, all indexed (row = x_i, col = k_j).
struct JostField {
  Grid grid;
  Potential potential;  // the V this field was solved for (carried downstream)
  CMat m_plus, m_minus;
  CMat dk_m_plus, dk_m_minus;
  CMat dx_m_plus, dx_m_minus;
  // Plane-wave matching coefficients of psi_+ left of the support
  // (psi_+ = A e^{ikx} + B e^{-ikx}) and of psi_- right of it
  // (psi_- = At e^{-ikx} + Bt e^{ikx}); exact byproducts of the sweeps.
  CVec match_A, match_B, match_At, match_Bt;
  double max_residual = 0.0;  // Volterra back-substitution residual (guard)
};

// Piecewise-constant model of V used by the exact cell-propagator sweeps:
// barrier edges are honored exactly; sampled potentials take per-cell
// averages (v_i + v_{i+1})/2 between grid nodes.
struct Staircase {
  std::vector<double> edges;  // size = pieces + 1, strictly increasing
  std::vector<double> q;      // constant value per piece
  bool empty() const { return q.empty(); }
};

Staircase staircase_model(const Potential& V);

// Solve the Jost Volterra equations on grid.ks() by the exact cell
// propagator (single backward sweep for m_+, forward for m_-); derivative
// fields carry the exactly differentiated propagator. The residual guard
// substitutes m back into the staircase Volterra equation on sampled
// k-columns and throws NumericalError above 1e-8.
JostField solve_jost(const Potential& V, const Grid& grid);

// Single-column solve at an arbitrary frequency (k = 0 allowed); returns
// m_plus-style column data for that k.
struct JostColumn {
  CVec m, dk_m, dx_m;
  cplx A, B;  // matching coefficients (side '+': left of support)
};
JostColumn solve_jost_column(const Potential& V, const Grid& grid, double k,
                             char side);

// psi_+(x,k) = e^{ikx} m_+(x,k); psi_-(x,k) = e^{-ikx} m_-(x,k).
CMat eigenfunction(const JostField& J, char side);

// Build a single symbol matrix (rows = x_i, cols = k_j) without storing the
// whole JostField; used by operator-norm probes on refined grids.
//   which: 'm' -> m - 1, 'x' -> d_x m, 'k' -> d_k m, 'b' -> d_k d_x m.
CMat jost_symbol(const Potential& V, const Grid& grid, char which, char side);

// Empirical constants for |dk^s (m_pm - 1)| <k> / W_pm^{s+1}(x), s in {0,1},
// sup over the half-line +-x >= -1 (W = 0 nodes skipped).
struct JostBoundReport {
  double c_plus[2];
  double c_minus[2];
};
JostBoundReport jost_bound_report(const JostField& J, const Potential& V);

}  // namespace nlslab
