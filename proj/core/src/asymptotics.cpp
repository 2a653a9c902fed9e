#include "nlslab/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace nlslab {

namespace {

void require_profile(const Profile& P, const Grid& grid) {
  if (P.ts.size() < 1 || P.f_tilde_snapshots.rows() != P.ts.size() ||
      P.f_tilde_snapshots.cols() != grid.n_k) {
    throw ContractError("asymptotics: profile does not match the grid");
  }
}

// Phase integrals int_0^{t_n} |f_tilde|^2/(1+s) ds per snapshot row: densely
// accumulated values when the run recorded them, snapshot-level trapezoid
// otherwise.
Mat phase_rows(const Profile& P) {
  const int nt = static_cast<int>(P.ts.size());
  const int nk = static_cast<int>(P.f_tilde_snapshots.cols());
  if (P.has_phase) return P.phase_integral;
  Mat I = Mat::Zero(nt, nk);
  for (int n = 1; n < nt; ++n) {
    const double t1 = P.ts[n - 1], t2 = P.ts[n];
    const Vec d1 =
        P.f_tilde_snapshots.row(n - 1).cwiseAbs2().transpose() / (1.0 + t1);
    const Vec d2 =
        P.f_tilde_snapshots.row(n).cwiseAbs2().transpose() / (1.0 + t2);
    I.row(n) = I.row(n - 1) + 0.5 * (t2 - t1) * (d1 + d2).transpose();
  }
  return I;
}

struct PairResidual {
  double t_mid = 0.0;
  Vec r_abs;
};

PairResidual pair_residual(const Profile& P, const Grid& grid, int n,
                           double alpha) {
  const Vec ks = grid.ks();
  const double t1 = P.ts[n], t2 = P.ts[n + 1];
  const double dt = t2 - t1;
  const double tm = 0.5 * (t1 + t2);
  PairResidual out;
  out.t_mid = tm;
  out.r_abs = Vec::Zero(grid.n_k);
  const double kmin = std::pow(tm, -3.0 * alpha);
  for (int j = 0; j < grid.n_k; ++j) {
    if (std::abs(ks[j]) < kmin) continue;
    const cplx f1 = P.f_tilde_snapshots(n, j);
    const cplx f2 = P.f_tilde_snapshots(n + 1, j);
    const cplx fm = 0.5 * (f1 + f2);
    const cplx r = kI * (f2 - f1) / dt +
                   (P.sigma / (2.0 * tm)) * std::norm(fm) * fm;
    out.r_abs[j] = std::abs(r);
  }
  return out;
}

double loglog_slope(const std::vector<double>& xs, const Vec& ys) {
  const int n = static_cast<int>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double lx = std::log(xs[i]), ly = std::log(std::max(ys[i], 1e-300));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  return den == 0.0 ? 0.0 : (n * sxy - sx * sy) / den;
}

// Cubic Lagrange interpolation on the uniform k lattice; false when the
// 4-point stencil does not fit.
bool cubic_interp(const CVec& f, const Vec& ks, double dk, double kq,
                  cplx* out) {
  const int nk = static_cast<int>(f.size());
  const double pos = (kq - ks[0]) / dk;
  const int j = static_cast<int>(std::floor(pos));
  if (j - 1 < 0 || j + 2 > nk - 1) return false;
  const double s = pos - j;
  const double wm1 = -s * (s - 1.0) * (s - 2.0) / 6.0;
  const double w0 = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0;
  const double w1 = -(s + 1.0) * s * (s - 2.0) / 2.0;
  const double w2 = (s + 1.0) * s * (s - 1.0) / 6.0;
  *out = wm1 * f[j - 1] + w0 * f[j] + w1 * f[j + 1] + w2 * f[j + 2];
  return true;
}

}  // namespace

ModScatReport modified_profile(const Profile& P, const Grid& grid,
                               double alpha) {
  require_profile(P, grid);
  const int nt = static_cast<int>(P.ts.size());
  const int nk = grid.n_k;

  ModScatReport rep;
  rep.ts.assign(P.ts.data(), P.ts.data() + nt);
  rep.ks_probe = grid.ks();
  rep.w_snapshots.resize(nt, nk);

  const Mat I = phase_rows(P);
  for (int n = 0; n < nt; ++n) {
    for (int j = 0; j < nk; ++j) {
      rep.w_snapshots(n, j) = std::polar(1.0, -0.5 * P.sigma * I(n, j)) *
                              P.f_tilde_snapshots(n, j);
    }
  }
  rep.W_inf_estimate = rep.w_snapshots.row(nt - 1).transpose();

  // Dyadic-ish subsequence of snapshot times >= 20 for the Cauchy gaps.
  std::vector<int> chosen;
  for (int n = 0; n < nt; ++n) {
    if (P.ts[n] < 19.99) continue;
    if (chosen.empty() || P.ts[n] >= 1.9 * P.ts[chosen.back()]) {
      chosen.push_back(n);
    }
  }
  if (chosen.size() >= 2) {
    const int ng = static_cast<int>(chosen.size()) - 1;
    rep.cauchy_gaps.resize(ng);
    rep.gap_ts.resize(ng);
    for (int i = 0; i < ng; ++i) {
      const CVec w1 = rep.w_snapshots.row(chosen[i]).transpose();
      const CVec w2 = rep.w_snapshots.row(chosen[i + 1]).transpose();
      rep.cauchy_gaps[i] = (w2 - w1).cwiseAbs().maxCoeff();
      rep.gap_ts[i] = P.ts[chosen[i + 1]];
    }
    if (ng >= 2) rep.fitted_rho = -2.0 * loglog_slope(rep.gap_ts,
                                                      rep.cauchy_gaps);
  }

  // ODE residual sup-norms over close consecutive snapshot pairs.
  std::vector<double> ode_ts;
  std::vector<double> ode_norms;
  for (int n = 0; n + 1 < nt; ++n) {
    const double gap = P.ts[n + 1] - P.ts[n];
    const double tm = 0.5 * (P.ts[n] + P.ts[n + 1]);
    if (gap <= 0.0 || gap > 1.0001 || tm < 10.0) continue;
    const PairResidual pr = pair_residual(P, grid, n, alpha);
    ode_ts.push_back(pr.t_mid);
    ode_norms.push_back(pr.r_abs.maxCoeff());
  }
  rep.ode_ts = ode_ts;
  rep.ode_residual_norms =
      Eigen::Map<const Vec>(ode_norms.data(), ode_norms.size());
  return rep;
}

Vec ode_residual(const Profile& P, const Grid& grid, double t, double alpha) {
  require_profile(P, grid);
  const int nt = static_cast<int>(P.ts.size());
  if (nt < 2) {
    throw ContractError("ode_residual: need at least two snapshots");
  }
  int best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (int n = 0; n + 1 < nt; ++n) {
    if (P.ts[n + 1] <= P.ts[n]) continue;
    const double tm = 0.5 * (P.ts[n] + P.ts[n + 1]);
    const double d = std::abs(tm - t);
    if (d < best_dist) {
      best_dist = d;
      best = n;
    }
  }
  return pair_residual(P, grid, best, alpha).r_abs;
}

PhysicalCompare physical_compare(const Trajectory& traj, const Profile& P,
                                 const ModScatReport& rep, const Grid& grid,
                                 double t) {
  require_profile(P, grid);
  if (traj.size() != static_cast<size_t>(P.ts.size())) {
    throw ContractError("physical_compare: trajectory/profile size mismatch");
  }
  if (t <= 0.0) throw ContractError("physical_compare: t must be positive");
  int idx = -1;
  for (size_t n = 0; n < traj.size(); ++n) {
    if (std::abs(traj[n].t - t) <= 1e-6 * std::max(1.0, t)) {
      idx = static_cast<int>(n);
      break;
    }
  }
  if (idx < 0) {
    throw ContractError("physical_compare: t is not a snapshot time");
  }

  const Vec xs = grid.xs();
  const Vec ks = grid.ks();
  const double dk = grid.dk();
  const CVec& u = traj[idx].u;
  const CVec frow = P.f_tilde_snapshots.row(idx).transpose();
  const CVec& W = rep.W_inf_estimate;
  const double sigma = P.sigma;

  const cplx inv_sqrt = 1.0 / std::sqrt(cplx(0.0, -2.0 * t));
  PhysicalCompare out;
  double lin_sup = 0.0, mod_sup = 0.0;
  for (int i = 0; i < grid.n_x; ++i) {
    const double x = xs[i];
    const double kq = -x / (2.0 * t);
    cplx fval, wval;
    if (!cubic_interp(frow, ks, dk, kq, &fval) ||
        !cubic_interp(W, ks, dk, kq, &wval)) {
      ++out.excluded;
      continue;
    }
    const cplx pref = inv_sqrt * std::polar(1.0, -x * x / (4.0 * t));
    lin_sup = std::max(lin_sup, std::abs(u[i] - pref * fval));
    const cplx fmod =
        wval * std::polar(1.0, 0.5 * sigma * std::norm(wval) *
                                   std::log1p(t));
    mod_sup = std::max(mod_sup, std::abs(u[i] - pref * fmod));
  }
  const double root_t = std::sqrt(t);
  out.lin_err = root_t * lin_sup;
  out.mod_err = root_t * mod_sup;
  return out;
}

double negative_time_map(const DistortedBasis& B, const CVec& f) {
  if (f.size() != B.grid.n_x) {
    throw ContractError("negative_time_map: data is not on the grid");
  }
  const int nk = B.grid.n_k;
  const ScatteringData& S = B.scattering;
  const CVec g_direct = forward(B, f.conjugate());
  const CVec ft = forward(B, f);
  CVec g_formula(nk);
  for (int j = 0; j < nk / 2; ++j) {
    const int jp = nk - 1 - j;  // -k_j on the half-shifted lattice
    g_formula[j] =
        S.T[j] * std::conj(ft[jp]) + S.R_plus[j] * std::conj(ft[j]);
    g_formula[jp] =
        S.R_minus[j] * std::conj(ft[jp]) + S.T[j] * std::conj(ft[j]);
  }
  const double den = std::max(g_direct.norm(), 1e-300);
  return (g_direct - g_formula).norm() / den;
}

StationaryPhase stationary_phase_oracle(const std::function<cplx(double)>& g,
                                        double t, double K, double alpha) {
  if (!g) throw ContractError("stationary_phase_oracle: g not callable");
  if (t == 0.0) throw ContractError("stationary_phase_oracle: t must be nonzero");
  if (std::abs(K) <= std::pow(std::abs(t), -3.0 * alpha)) {
    throw ContractError(
        "stationary_phase_oracle: |K| <= |t|^{-3 alpha}, outside the "
        "stationary-phase regime");
  }

  // Frozen even window: the cutoff bump scaled so psi(0) = 1/sqrt(2 pi),
  // matching the constant in the leading term.
  auto psi = [](double p) -> double {
    if (std::abs(p) >= 2.0) return 0.0;
    return 0.25 * (1.0 + std::cos(0.5 * kPi * p)) * 2.0 / kSqrt2Pi;
  };
  // After q = K + p, e^{-itK^2} e^{itq^2} = e^{it(2Kp + p^2)}.
  auto F = [&](double p) -> cplx {
    const double w = psi(p);
    if (w == 0.0) return cplx(0.0);
    return std::polar(1.0, t * (2.0 * K * p + p * p)) * g(K + p) * w;
  };
  auto h = [&](double p) -> cplx {
    if (p == 0.0) {
      const double e = 1e-6;
      return (F(e) - F(-e)) / e;
    }
    return (F(p) - F(-p)) / p;
  };

  const double a = 0.0, b = 2.0;
  auto simpson = [&](int n) -> cplx {  // n intervals, even
    const double hstep = (b - a) / n;
    cplx acc = h(a) + h(b);
    for (int i = 1; i < n; ++i) {
      acc += h(a + i * hstep) * ((i % 2) ? 4.0 : 2.0);
    }
    return acc * (hstep / 3.0);
  };

  StationaryPhase out;
  int n = 64;
  cplx prev = simpson(n);
  for (n = 128; n <= (1 << 20); n *= 2) {
    const cplx cur = simpson(n);
    const double delta = std::abs(cur - prev);
    prev = cur;
    if (delta < 1e-4 * std::max(std::abs(cur), 1e-300)) break;
  }
  out.quadrature = prev;
  out.nodes = std::min(n, 1 << 20) + 1;
  const double sgn = (t * K > 0.0) ? 1.0 : -1.0;
  out.leading = kI * std::sqrt(0.5 * kPi) * sgn * g(K);
  return out;
}

}  // namespace nlslab
