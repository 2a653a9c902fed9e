#pragma once

#include <memory>
#include <vector>

#include "nlslab/common.hpp"
#include "nlslab/dft.hpp"
#include "nlslab/grid.hpp"
#include "nlslab/potentials.hpp"

namespace nlslab {

// Nonlinearity sign: defocusing = +|u|^2 u in the equation
// i u_t - u_xx + V u + sigma |u|^2 u = 0.
enum class Sign { defocusing, focusing };
inline double sign_sigma(Sign s) { return s == Sign::defocusing ? 1.0 : -1.0; }

// Realization of the linear substep e^{i dt H}:
//   multiplier - FFT diagonal flow (V == 0 only),
//   eig        - dense eigendecomposition of the discrete H (exactly
//                unitary; default for n_x <= 4096),
//   pade22     - two exactly-unimodular rational factors of the [2/2] Pade
//                approximant, each applied by a short fixed-point iteration
//                (contraction rate dt*||V||_inf / 3); for large boxes.
enum class LinearFlow { automatic, multiplier, eig, pade22 };

struct SolveOptions {
  std::vector<double> snapshot_ts = {1, 2, 5, 10, 20, 50, 100, 200};
  LinearFlow flow = LinearFlow::automatic;
  int pade_iterations = 5;
  double blowup_factor = 10.0;
  bool fill_profile = true;  // refresh f_tilde at snapshots when basis known
  // Accumulate int_0^t |f_tilde(s,k)|^2 / (1+s) ds densely along the march
  // (every phase_stride steps). Snapshot-level trapezoids are far too coarse
  // for the modified-profile Cauchy gaps, which sit orders of magnitude
  // below the quadrature error of a sparse snapshot grid.
  bool accumulate_phase = false;
  int phase_stride = 10;
};

struct SolutionState {
  double t = 0.0;
  CVec u;
  CVec f_tilde;  // e^{-i t k^2} forward(u); empty until refreshed
  Sign sign = Sign::defocusing;
  Vec a_coeff_nl;  // variable coefficient a(x); empty means a == 1
  Vec w_phase;     // int_0^t |f_tilde|^2/(1+s) ds when accumulate_phase
};

using Trajectory = std::vector<SolutionState>;

struct Profile {
  Vec ts;
  CMat f_tilde_snapshots;  // rows t_n, cols k_j
  double sigma = 1.0;      // nonlinearity sign of the generating run
  bool has_phase = false;
  Mat phase_integral;  // rows t_n: int_0^{t_n} |f_tilde|^2/(1+s) ds
};

struct Invariants {
  double M = 0.0;
  double H = 0.0;
};

// inverse(e^{i k^2 t} * forward(f0)): the distorted-multiplier linear flow.
CVec linear_evolve(const DistortedBasis& B, const CVec& f0, double t);

// Exactly unitary e^{itH} at arbitrary t: dense eigendecomposition of the
// discrete H (FFT diagonal flow when V == 0). Build once, apply per time;
// decay fits use this to keep norm floors at roundoff rather than at the
// dense-transform defect.
class LinearPropagator {
 public:
  LinearPropagator(const Potential& V, const Grid& grid);
  ~LinearPropagator();
  LinearPropagator(LinearPropagator&&) noexcept;
  LinearPropagator& operator=(LinearPropagator&&) noexcept;
  CVec apply(const CVec& h, double t) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Strang splitting for i u_t - u_xx + V u + sigma a(x)|u|^2 u = 0:
// half gauge kick u <- u e^{i sigma a |u|^2 dt/2}, full linear step,
// half kick. Snapshot times are rounded to whole steps; the returned
// trajectory always contains t = 0 and the final time.
Trajectory nls_solve(const DistortedBasis& B, const CVec& u0, double T_end,
                     double dt, Sign sign, const Vec* a_coeff_nl = nullptr,
                     const SolveOptions& opts = SolveOptions());

// Same march on a bare (V, grid) pair, for boxes too large to hold a dense
// basis; f_tilde stays empty (extract through a banded basis afterwards).
Trajectory nls_solve(const Potential& V, const Grid& grid, const CVec& u0,
                     double T_end, double dt, Sign sign,
                     const Vec* a_coeff_nl = nullptr,
                     const SolveOptions& opts = SolveOptions());

// M = int |u|^2, H = int |u_x|^2 + V|u|^2 + (sigma/2)|u|^4 (trapezoid;
// u_x by the flat spectral derivative). Warns on stderr if more than 1e-8
// of the mass sits in the outer 5% of the box.
Invariants invariants_MH(const SolutionState& state, const Potential& V);

// f_tilde(t_n, k_j) = e^{-i t_n k_j^2} forward(u(t_n)) for every snapshot.
Profile extract_profile(const DistortedBasis& B, const Trajectory& traj);

// Streaming variant for boxes too large to hold a dense basis: each column
// K(., k) is assembled on the fly from a single-frequency Jost solve
// (T = 1/A from the matching coefficients) and dotted against every
// snapshot. `banded` must share the x-grid of the trajectory.
Profile extract_profile_banded(const Potential& V, const Grid& banded,
                               const Trajectory& traj);

// Small data normalized in the weighted Sobolev size ||u0||_{H^{1,1}} = eta,
// shape e^{-x^2/4} (even) or x e^{-x^2/4} (odd); the norm squared is
// ||u||^2_{L^2} + ||u'||^2_{L^2} + ||x u||^2_{L^2}, evaluated in closed
// form (2.25 sqrt(2 pi) and 4.75 sqrt(2 pi) respectively).
CVec gaussian_data(const Grid& grid, double eta);
CVec odd_gaussian_data(const Grid& grid, double eta);

}  // namespace nlslab
