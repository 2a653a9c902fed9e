#pragma once

#include <functional>
#include <vector>

#include "nlslab/dft.hpp"
#include "nlslab/evolve.hpp"

namespace nlslab {

// Modified scattering diagnostics for a profile trajectory.
//
// w(t,k) = exp(-(i sigma / 2) int_0^t |f_tilde(s,k)|^2 ds/(1+s)) f_tilde(t,k)
// (phase sign follows this solver's flow orientation, so that the
// logarithmic phase of f_tilde is removed and w is Cauchy in t).
struct ModScatReport {
  std::vector<double> ts;  // snapshot times (echo)
  Vec ks_probe;            // k lattice (echo)
  CMat w_snapshots;        // rows = times, cols = k
  // Successive sup-norm gaps max_k |w(t_{i+1}) - w(t_i)| over a dyadic-ish
  // subsequence of snapshot times >= 20.
  std::vector<double> gap_ts;  // the right endpoint t_{i+1} of each gap
  Vec cauchy_gaps;
  // ||r(t,.)||_inf of the asymptotic ODE over close snapshot pairs.
  std::vector<double> ode_ts;
  Vec ode_residual_norms;
  CVec W_inf_estimate;  // w at the final snapshot
  double fitted_rho = 0.0;  // from gap ~ t^{-rho/2} (0 if < 2 gaps)
};

ModScatReport modified_profile(const Profile& P, const Grid& grid,
                               double alpha = 0.05);

// |r(t_mid, k)| of r = i (f2-f1)/dt + sigma/(2 t_mid) |f_mid|^2 f_mid over
// the band |k| >= t_mid^{-3 alpha}; entries outside the band are 0. Uses the
// consecutive snapshot pair whose midpoint is nearest t.
Vec ode_residual(const Profile& P, const Grid& grid, double t,
                 double alpha = 0.05);

// Physical-space asymptotics at a snapshot time:
//   u(t,x) ~ e^{-ix^2/4t}/sqrt(-2it) f_tilde(t, -x/2t)          (linear form)
//   u(t,x) ~ same with W(k) exp((i sigma/2)|W(k)|^2 log(1+t))  (modified)
// Errors are sup-norm over grid nodes, multiplied by sqrt(t); profile values
// off-lattice by cubic interpolation, stencil-less points excluded+counted.
struct PhysicalCompare {
  double lin_err = 0.0;
  double mod_err = 0.0;
  int excluded = 0;
};
PhysicalCompare physical_compare(const Trajectory& traj, const Profile& P,
                                 const ModScatReport& rep, const Grid& grid,
                                 double t);

// Relative L2 mismatch between forward(conj(f)) and the scattering-matrix
// conjugation formula (for k < 0, with k' = -k > 0):
//   g(k)  = T(k) conj(f_tilde(k')) + R_+(k) conj(f_tilde(k))
//   g(k') = R_-(k) conj(f_tilde(k')) + T(k) conj(f_tilde(k)).
double negative_time_map(const DistortedBasis& B, const CVec& f);

// Oscillatory principal-value integral
//   I(t,K) = e^{-itK^2} pv int e^{itq^2} g(q) psi(q-K)/(q-K) dq
// with the frozen even cutoff psi normalized so psi(0) = 1/sqrt(2 pi), vs
// the stationary-phase leading term i sqrt(pi/2) sign(tK) g(K).
struct StationaryPhase {
  cplx leading;
  cplx quadrature;
  int nodes = 0;
};
StationaryPhase stationary_phase_oracle(const std::function<cplx(double)>& g,
                                        double t, double K,
                                        double alpha = 0.05);

}  // namespace nlslab
