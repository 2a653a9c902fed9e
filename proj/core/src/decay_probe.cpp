#include "nlslab/decay_probe.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "nlslab/fft.hpp"
#include "nlslab/jost.hpp"

namespace nlslab {

namespace {

void require_times(const std::vector<double>& times) {
  if (times.empty()) throw ConfigError("decay series: empty time list");
  for (size_t i = 0; i + 1 < times.size(); ++i) {
    if (!(times[i] < times[i + 1])) {
      throw ConfigError("decay series: times must be strictly increasing");
    }
  }
  if (times.front() < 0.0) {
    throw ConfigError("decay series: times must be nonnegative");
  }
}

// f_tilde at k = 0 on the half-shifted lattice: mean of the two middle
// samples (k = -dk/2 and +dk/2).
double profile_at_zero(const CVec& g) {
  const int nk = static_cast<int>(g.size());
  return std::abs(0.5 * (g[nk / 2 - 1] + g[nk / 2]));
}

void check_zero_hypothesis(const DistortedBasis& B, const CVec& h) {
  if (B.scattering.generic) return;
  const CVec g = forward(B, h);
  const double at0 = profile_at_zero(g);
  const double scale = std::max(g.cwiseAbs().maxCoeff(), 1e-300);
  if (at0 > 1e-6 * scale) {
    throw ContractError(
        "decay series: weighted local decay against a non-generic potential "
        "requires f_tilde(0) = 0; got |f_tilde(0)| / max|f_tilde| = " +
        std::to_string(at0 / scale));
  }
}

Vec bracket_weights(const Vec& xs, double beta) {
  Vec w(xs.size());
  for (int i = 0; i < xs.size(); ++i) {
    w[i] = std::pow(japanese_bracket(xs[i]), -beta);
  }
  return w;
}

void try_fit(DecaySeries* s) {
  int in_window = 0;
  bool positive = true;
  for (size_t i = 0; i < s->ts.size(); ++i) {
    if (s->ts[i] >= s->t_fit_min) {
      ++in_window;
      if (!(s->norms[static_cast<int>(i)] > 0.0)) positive = false;
    }
  }
  if (in_window < 5 || !positive) return;
  const SlopeFit fit = fit_decay_rate(*s);
  s->fitted_slope = fit.slope;
  s->slope_ci = fit.ci;
}

// Transfer a potential onto a refinement grid: exact for barriers and zero;
// sampled kinds are linearly interpolated (zero outside their box).
Potential resample_potential(const Potential& V, const Grid& g) {
  if (V.kind == PotentialKind::barrier) {
    return make_barrier(V.barrier_height, V.barrier_half_width, g);
  }
  if (V.kind == PotentialKind::zero || V.is_zero()) return make_zero(g);
  const Vec xs = g.xs();
  Vec vs = Vec::Zero(g.n_x);
  const int m = static_cast<int>(V.xs.size());
  const double x0 = V.xs[0];
  const double h = V.xs[1] - V.xs[0];
  bool has_neg = false;
  for (int i = 0; i < g.n_x; ++i) {
    const double pos = (xs[i] - x0) / h;
    const int j = static_cast<int>(std::floor(pos));
    if (j < 0 || j + 1 >= m) continue;
    const double s = pos - j;
    vs[i] = (1.0 - s) * V.vs[j] + s * V.vs[j + 1];
    if (vs[i] < 0.0) has_neg = true;
  }
  return make_sampled(xs, vs, has_neg);
}

DecaySeries series_impl(const DistortedBasis& B, const CVec& h,
                        const std::vector<double>& times, NormKind kind,
                        char component, double beta) {
  require_times(times);
  if (h.size() != B.grid.n_x) {
    throw ConfigError("decay series: data is not on the basis grid");
  }
  if (component != '0' && component != 'S' && component != 'R') {
    throw ConfigError("decay series: component must be '0', 'S' or 'R'");
  }
  if (kind == NormKind::weighted_sup || kind == NormKind::weighted_dx_L2) {
    check_zero_hypothesis(B, h);
  }

  const Grid& grid = B.grid;
  const int n = grid.n_x;
  const double dx = grid.dx();
  const double dk = grid.dk();
  const Vec ks = grid.ks();
  const Vec wx = bracket_weights(grid.xs(), beta);

  LinearPropagator prop(B.potential, grid);
  Fft fft(n);
  const Vec kf = grid.ks_fft();

  DecaySeries s;
  s.ts = times;
  s.kind = kind;
  s.beta = beta;
  s.component = component;
  s.norms.resize(static_cast<int>(times.size()));

  for (size_t it = 0; it < times.size(); ++it) {
    const double t = times[it];
    const CVec ut = prop.apply(h, t);
    const CVec g = forward(B, ut);
    double val = 0.0;
    if (kind == NormKind::hk1_profile) {
      CVec ft(grid.n_k);
      for (int j = 0; j < grid.n_k; ++j) {
        ft[j] = std::polar(1.0, -t * ks[j] * ks[j]) * g[j];
      }
      CVec dft(grid.n_k);
      for (int j = 0; j < grid.n_k; ++j) {
        if (j == 0) {
          dft[j] = (ft[1] - ft[0]) / dk;
        } else if (j == grid.n_k - 1) {
          dft[j] = (ft[j] - ft[j - 1]) / dk;
        } else {
          dft[j] = (ft[j + 1] - ft[j - 1]) / (2.0 * dk);
        }
      }
      val = std::sqrt(dk * (ft.squaredNorm() + dft.squaredNorm()));
    } else {
      const CVec phi = component_project(B, g, component);
      switch (kind) {
        case NormKind::sup:
          val = phi.cwiseAbs().maxCoeff();
          break;
        case NormKind::weighted_sup:
          val = (wx.array() * phi.cwiseAbs().array()).maxCoeff();
          break;
        case NormKind::weighted_dx_L2: {
          CVec hat = fft.forward(phi);
          for (int i = 0; i < n; ++i) hat[i] *= kI * kf[i];
          const CVec dphi = fft.inverse(hat);
          val = std::sqrt(dx) * (wx.array() * dphi.cwiseAbs().array())
                                    .matrix()
                                    .norm();
          break;
        }
        default:
          break;
      }
    }
    s.norms[static_cast<int>(it)] = val;
  }

  try_fit(&s);
  return s;
}

}  // namespace

DecaySeries norm_series(const DistortedBasis& B, const CVec& h,
                        const std::vector<double>& times, NormKind kind,
                        char component, double beta) {
  return series_impl(B, h, times, kind, component, beta);
}

DecaySeries smoothing_series(const DistortedBasis& B, const CVec& h,
                             const std::vector<double>& times, double beta,
                             char component) {
  return series_impl(B, h, times, NormKind::weighted_dx_L2, component, beta);
}

SlopeFit fit_decay_rate(const DecaySeries& series) {
  std::vector<double> lt, ln;
  for (size_t i = 0; i < series.ts.size(); ++i) {
    const double t = series.ts[i];
    if (t < series.t_fit_min) continue;
    const double v = series.norms[static_cast<int>(i)];
    if (!(v > 0.0)) {
      throw ContractError("fit_decay_rate: non-positive norm in fit window");
    }
    lt.push_back(std::log(t));
    ln.push_back(std::log(v));
  }
  const int m = static_cast<int>(lt.size());
  if (m < 5) {
    throw ContractError(
        "fit_decay_rate: need at least 5 points with t >= t_fit_min");
  }
  double mx = 0, my = 0;
  for (int i = 0; i < m; ++i) {
    mx += lt[i];
    my += ln[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0, sxy = 0;
  for (int i = 0; i < m; ++i) {
    sxx += (lt[i] - mx) * (lt[i] - mx);
    sxy += (lt[i] - mx) * (ln[i] - my);
  }
  if (sxx == 0.0) throw ContractError("fit_decay_rate: degenerate abscissae");
  SlopeFit fit;
  fit.slope = sxy / sxx;
  double rss = 0.0;
  for (int i = 0; i < m; ++i) {
    const double r = ln[i] - my - fit.slope * (lt[i] - mx);
    rss += r * r;
  }
  const double var = (m > 2) ? rss / (m - 2) / sxx : 0.0;
  fit.ci = 1.96 * std::sqrt(std::max(var, 0.0));
  return fit;
}

Vec pdo_norm_probe(SymbolKind kind, const DistortedBasis& B, int refinements,
                   double beta) {
  if (refinements < 1) {
    throw ConfigError("pdo_norm_probe: refinements must be >= 1");
  }
  char which = 'm';
  switch (kind) {
    case SymbolKind::m_minus_1:
      which = 'm';
      break;
    case SymbolKind::dx_m:
      which = 'x';
      break;
    case SymbolKind::dk_m:
      which = 'k';
      break;
    case SymbolKind::dkdx_m:
      which = 'b';
      break;
  }

  Vec norms(refinements);
  for (int r = 0; r < refinements; ++r) {
    const int n = 1024 << r;
    const Grid grid = matched_grid(40.0, n);
    const Vec xs = grid.xs();
    const Vec ls = grid.ks();
    CMat A = jost_symbol(B.potential, grid, which, '+');
    for (int i = 0; i < n; ++i) {
      const double w =
          (xs[i] >= -1.0) ? std::pow(japanese_bracket(xs[i]), beta) : 0.0;
      if (w == 0.0) {
        A.row(i).setZero();
        continue;
      }
      for (int j = 0; j < n; ++j) {
        A(i, j) *= w * std::polar(1.0, ls[j] * xs[i]);
      }
    }
    if (kind == SymbolKind::dkdx_m) {
      for (int j = 0; j < n; ++j) {
        if (std::abs(ls[j]) > 1.0) A.col(j).setZero();
      }
    }

    // Power iteration on A^* A with a deterministic seed.
    CVec v(n);
    for (int j = 0; j < n; ++j) v[j] = 1.0 / (1.0 + j);
    v /= v.norm();
    double lambda = 0.0;
    bool converged = false;
    for (int iter = 0; iter < 500; ++iter) {
      const CVec w = A * v;
      const double next = w.squaredNorm();
      CVec vn = A.adjoint() * w;
      const double nn = vn.norm();
      if (nn == 0.0) {
        lambda = 0.0;
        converged = true;
        break;
      }
      v = vn / nn;
      if (iter > 0 &&
          std::abs(next - lambda) <= 1e-10 * std::max(next, 1e-300)) {
        lambda = next;
        converged = true;
        break;
      }
      lambda = next;
    }
    if (!converged) {
      throw NumericalError("pdo_norm_probe: power iteration stalled");
    }
    norms[r] = std::sqrt(lambda) * std::sqrt(grid.dx() * grid.dk());
  }
  return norms;
}

}  // namespace nlslab
