#include "nlslab/spectral_measure.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "nlslab/fft.hpp"

namespace nlslab {

namespace {

// Frequency sums stay on the integer lattice y = j*dk only when the k-lattice
// is symmetric under k -> -k (half-shifted layout). Everything below relies
// on that, so fail loudly if it is violated.
void require_symmetric_lattice(const Grid& grid) {
  const Vec ks = grid.ks();
  const int nk = grid.n_k;
  const double tol = 1e-9 * std::max(1.0, grid.k_half_width);
  for (int j = 0; j < nk / 2; ++j) {
    if (std::abs(ks[j] + ks[nk - 1 - j]) > tol) {
      throw ContractError(
          "spectral_measure: k-lattice not symmetric under reflection; "
          "frequency sums would leave the integer lattice");
    }
  }
}

void require_profile_sizes(const Grid& grid, const CVec& g1, const CVec& g2,
                           const CVec& g3) {
  if (g1.size() != grid.n_k || g2.size() != grid.n_k ||
      g3.size() != grid.n_k) {
    throw ConfigError("spectral_measure: profile length does not match n_k");
  }
}

// Array for a slot entering the frequency sum with sign sgn: index w carries
// the lattice value k_w, so sgn=-1 stores the original array reversed
// (-k_v = k_{n-1-v} on the half-shifted lattice).
CVec signed_copy(const CVec& a, int sgn) {
  if (sgn > 0) return a;
  return a.reverse();
}

// Full linear convolution via zero-padded FFT.
CVec conv_full(const CVec& a, const CVec& b) {
  const int na = static_cast<int>(a.size());
  const int nb = static_cast<int>(b.size());
  const int nc = na + nb - 1;
  int len = 1;
  while (len < nc) len <<= 1;
  Fft fft(len);
  CVec pa = CVec::Zero(len);
  CVec pb = CVec::Zero(len);
  pa.head(na) = a;
  pb.head(nb) = b;
  const CVec fa = fft.forward(pa);
  const CVec fb = fft.forward(pb);
  return fft.inverse(fa.cwiseProduct(fb)).head(nc);
}

CVec triple_conv(const CVec& s1, const CVec& s2, const CVec& s3) {
  return conv_full(conv_full(s1, s2), s3);
}

CVec phase_times(const Vec& ks, double t, const CVec& f) {
  CVec out(f.size());
  for (int j = 0; j < f.size(); ++j) {
    out[j] = std::polar(1.0, t * ks[j] * ks[j]) * f[j];
  }
  return out;
}

// Unitary Fourier transform of a compactly supported grid function, sampled
// on the symbol lattice y = (idx - 2 n_k) dk, idx = 0..4 n_k.
CVec hat_on_symbol_lattice(const Vec& f, const Vec& xs, double dx, int nk,
                           double dk) {
  const int ny = 4 * nk + 1;
  CVec out = CVec::Zero(ny);
  const double floor_mag = 1e-14 * std::max(f.cwiseAbs().maxCoeff(), 1e-300);
  std::vector<int> support;
  for (int i = 0; i < f.size(); ++i) {
    if (std::abs(f[i]) > floor_mag) support.push_back(i);
  }
  for (int j = 0; j < ny; ++j) {
    const double y = (j - 2 * nk) * dk;
    cplx acc = 0.0;
    for (int i : support) acc += std::polar(1.0, -y * xs[i]) * f[i];
    out[j] = acc * dx / kSqrt2Pi;
  }
  return out;
}

// Physical pairing of four spectral kernels with an optional x-weight:
//   N(k) = e^{-itk^2}/(2 pi)^2 dx sum_x conj(P0(x,k)) w(x) u1 conj(u2) u3,
//   u_j(x) = dk sum_l Pj(x,l) e^{itl^2} g_j(l).
// Kernels are the sqrt(2 pi)-scaled ones, matching the measure normalization.
CVec pairing_action(const CMat& P0, const CMat& P1, const CMat& P2,
                    const CMat& P3, const Vec* weight, const CVec& g1,
                    const CVec& g2, const CVec& g3, double t,
                    const Grid& grid) {
  const Vec ks = grid.ks();
  const double dk = grid.dk();
  const double dx = grid.dx();
  CVec e(grid.n_k);
  for (int j = 0; j < grid.n_k; ++j) {
    e[j] = std::polar(1.0, t * ks[j] * ks[j]);
  }
  CVec u1 = P1 * e.cwiseProduct(g1);
  CVec u2 = P2 * e.cwiseProduct(g2);
  CVec u3 = P3 * e.cwiseProduct(g3);
  CVec prod = (u1.array() * u2.conjugate().array() * u3.array()).matrix();
  prod *= dk * dk * dk;
  if (weight != nullptr) {
    prod.array() *= weight->array();
  }
  CVec out = P0.adjoint() * prod;
  const double pref = dx / (4.0 * kPi * kPi);
  for (int j = 0; j < grid.n_k; ++j) out[j] *= pref * std::conj(e[j]);
  return out;
}

// Plane-wave kernel of one half-line piece: a^+(k) e^{ikx} + a^-(k) e^{-ikx}.
CMat halfline_kernel(const DistortedBasis& B, char side) {
  const Vec xs = B.grid.xs();
  const Vec ks = B.grid.ks();
  CMat E(B.grid.n_x, B.grid.n_k);
  const CVec& ap = B.a_coeff(side, '+');
  const CVec& am = B.a_coeff(side, '-');
  for (int j = 0; j < B.grid.n_k; ++j) {
    for (int i = 0; i < B.grid.n_x; ++i) {
      E(i, j) = ap[j] * std::polar(1.0, ks[j] * xs[i]) +
                am[j] * std::polar(1.0, -ks[j] * xs[i]);
    }
  }
  return E;
}

CVec centered_diff(const CVec& f, double h) {
  const int n = static_cast<int>(f.size());
  CVec d(n);
  d[0] = (f[1] - f[0]) / h;
  d[n - 1] = (f[n - 1] - f[n - 2]) / h;
  for (int i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
  return d;
}

CutoffSplit cutoff_split_impl(const Grid& grid) {
  const Vec xs = grid.xs();
  const int n = grid.n_x;
  const double dx = grid.dx();
  const Vec chi = cutoff_chi_plus(xs);
  Vec phi(n);
  for (int i = 0; i < n; ++i) {
    const double c = chi[i];
    phi[i] = c * c * c * c;
  }
  // phi is constant outside the cutoff transition, so the wide stencil only
  // matters there; fall back to zero at the grid edges.
  Vec dphi = Vec::Zero(n);
  for (int i = 2; i + 2 < n; ++i) {
    dphi[i] = (-phi[i + 2] + 8.0 * phi[i + 1] - 8.0 * phi[i - 1] +
               phi[i - 2]) /
              (12.0 * dx);
  }
  CutoffSplit split;
  split.zeta = Vec::Zero(n);
  Vec odd = Vec::Zero(n);
  for (int i = 0; i < n; ++i) {
    const int ir = (n - i) % n;  // index of -x_i on the periodic layout
    split.zeta[i] = 0.5 * (dphi[i] + dphi[ir]);
    odd[i] = 0.5 * (dphi[i] - dphi[ir]);
  }
  split.varpi = Vec::Zero(n);
  for (int i = 1; i < n; ++i) {
    split.varpi[i] = split.varpi[i - 1] + 0.5 * dx * (odd[i - 1] + odd[i]);
  }
  // The odd part has zero integral, so varpi is compactly supported up to
  // roundoff; snap the dust to zero to keep transform support tight.
  const double snap = 1e-14 * std::max(split.varpi.cwiseAbs().maxCoeff(),
                                       1e-300);
  for (int i = 0; i < n; ++i) {
    if (std::abs(split.varpi[i]) < snap) split.varpi[i] = 0.0;
  }
  return split;
}

}  // namespace

TrilinearSpec make_trilinear_spec(const Grid& grid, int e1, int e2, int e3,
                                  double t, BKind kind,
                                  const std::function<cplx(double)>& b) {
  if (std::abs(e1) != 1 || std::abs(e2) != 1 || std::abs(e3) != 1) {
    throw ConfigError("trilinear spec: signs must be +1 or -1");
  }
  TrilinearSpec spec;
  spec.grid = grid;
  spec.eps[0] = e1;
  spec.eps[1] = e2;
  spec.eps[2] = e3;
  spec.b_kind = kind;
  spec.t = t;
  const int nk = grid.n_k;
  const double dk = grid.dk();
  spec.b_samples = CVec::Zero(4 * nk + 1);
  if (kind != BKind::delta) {
    if (!b) throw ConfigError("trilinear spec: symbol samples required");
    for (int j = 0; j <= 4 * nk; ++j) {
      spec.b_samples[j] = b((j - 2 * nk) * dk);
    }
  }
  return spec;
}

CVec trilinear_apply(const TrilinearSpec& spec, const CVec& f1, const CVec& f2,
                     const CVec& f3) {
  const Grid& grid = spec.grid;
  require_symmetric_lattice(grid);
  require_profile_sizes(grid, f1, f2, f3);
  const int nk = grid.n_k;
  const double dk = grid.dk();
  const double t = spec.t;
  if (spec.b_kind != BKind::delta && spec.b_samples.size() != 4 * nk + 1) {
    throw ConfigError("trilinear spec: symbol sample count must be 4 n_k + 1");
  }
  const Vec ks = grid.ks();
  const CVec G1 = phase_times(ks, t, f1);
  const CVec G2c = phase_times(ks, t, f2).conjugate();
  const CVec G3 = phase_times(ks, t, f3);
  const CVec P = triple_conv(signed_copy(G1, spec.eps[0]),
                             signed_copy(G2c, spec.eps[1]),
                             signed_copy(G3, spec.eps[2]));
  const int umax = 3 * nk - 3;  // P has indices 0..umax
  CVec out(nk);
  for (int j0 = 0; j0 < nk; ++j0) {
    // b argument y = k_{j0} + s(u) sits at sample index j0 + u + 2.
    cplx acc = 0.0;
    switch (spec.b_kind) {
      case BKind::smooth: {
        acc = (P.array() * spec.b_samples.segment(j0 + 2, umax + 1).array())
                  .sum();
        acc *= dk * dk * dk;
        break;
      }
      case BKind::delta: {
        const int ustar = 2 * nk - 2 - j0;
        acc = P[ustar] * dk * dk;  // one dk absorbed by the lattice delta
        break;
      }
      case BKind::pv: {
        const int ustar = 2 * nk - 2 - j0;  // y = 0 node, excluded
        const int radius = std::min(ustar, umax - ustar);
        for (int r = 1; r <= radius; ++r) {
          const double y = r * dk;
          acc += spec.b_samples[2 * nk + r] / (kI * y) * P[ustar + r];
          acc -= spec.b_samples[2 * nk - r] / (kI * y) * P[ustar - r];
        }
        // Desingularized center value psi'(0)/i (psi = numerator * P;
        // y increases with u here).
        acc += (spec.b_samples[2 * nk + 1] * P[ustar + 1] -
                spec.b_samples[2 * nk - 1] * P[ustar - 1]) /
               (2.0 * dk * kI);
        acc *= dk * dk * dk;
        break;
      }
    }
    out[j0] = std::polar(1.0, -t * ks[j0] * ks[j0]) * acc;
  }
  return out;
}

CutoffSplit cutoff_split(const Grid& grid) { return cutoff_split_impl(grid); }

CVec trilinear_direct(const DistortedBasis& B, const CVec& g1, const CVec& g2,
                      const CVec& g3, double t) {
  require_profile_sizes(B.grid, g1, g2, g3);
  const Vec ks = B.grid.ks();
  CVec e(B.grid.n_k);
  for (int j = 0; j < B.grid.n_k; ++j) {
    e[j] = std::polar(1.0, t * ks[j] * ks[j]);
  }
  const CVec u1 = inverse(B, e.cwiseProduct(g1));
  const CVec u2 = inverse(B, e.cwiseProduct(g2));
  const CVec u3 = inverse(B, e.cwiseProduct(g3));
  const CVec prod =
      (u1.array() * u2.conjugate().array() * u3.array()).matrix();
  CVec out = forward(B, prod);
  for (int j = 0; j < B.grid.n_k; ++j) out[j] *= std::conj(e[j]);
  return out;
}

CVec singular_action(const DistortedBasis& B, const CVec& g1, const CVec& g2,
                     const CVec& g3, double t, char side) {
  const Grid& grid = B.grid;
  require_symmetric_lattice(grid);
  require_profile_sizes(grid, g1, g2, g3);
  if (side != '+' && side != '-') {
    throw ConfigError("singular_action: side must be '+' or '-'");
  }
  const int nk = grid.n_k;
  const double dk = grid.dk();
  const Vec ks = grid.ks();
  const Vec xs = grid.xs();

  const CVec& ap = B.a_coeff(side, '+');
  const CVec& am = B.a_coeff(side, '-');
  const CVec p1 = phase_times(ks, t, g1);
  const CVec p2 = phase_times(ks, t, g2);
  const CVec p3 = phase_times(ks, t, g3);
  // Slot arrays with the half-line coefficient attached, per exponent sign.
  const CVec A1[2] = {am.cwiseProduct(p1), ap.cwiseProduct(p1)};
  const CVec A2c[2] = {am.cwiseProduct(p2).conjugate(),
                       ap.cwiseProduct(p2).conjugate()};
  const CVec A3[2] = {am.cwiseProduct(p3), ap.cwiseProduct(p3)};

  // Three-part symbol of phi_side. The delta coefficient uses the discrete
  // zeta-hat(0) so the decomposition matches the grid quadrature.
  const CutoffSplit split = cutoff_split_impl(grid);
  const CVec zhat =
      hat_on_symbol_lattice(split.zeta, xs, grid.dx(), nk, dk);
  const CVec what =
      hat_on_symbol_lattice(split.varpi, xs, grid.dx(), nk, dk);
  const double zhat0 = zhat[2 * nk].real();
  const double pv_sign = (side == '+') ? 1.0 : -1.0;
  const int ny = 4 * nk + 1;
  CVec bpv(ny);
  for (int j = 0; j < ny; ++j) {
    const double y = (j - 2 * nk) * dk;
    bpv[j] = (j == 2 * nk) ? cplx(0.0)
                           : pv_sign * kSqrt2Pi * zhat[j] / (kI * y);
  }
  const CVec bsm = kSqrt2Pi * what;
  const double delta_coef = kSqrt2Pi * kPi * zhat0 / dk;

  const int umax = 3 * nk - 3;
  CVec out = CVec::Zero(nk);
  for (int e0 = 0; e0 < 2; ++e0) {
    const CVec& a0 = (e0 == 1) ? ap : am;
    for (int e1 = 0; e1 < 2; ++e1) {
      for (int e2 = 0; e2 < 2; ++e2) {
        for (int e3 = 0; e3 < 2; ++e3) {
          // Frequency sum s = e1 l - e2 m + e3 n, symbol argument e0 k - s.
          const CVec P = triple_conv(
              signed_copy(A1[e1], e1 == 1 ? +1 : -1),
              signed_copy(A2c[e2], e2 == 1 ? -1 : +1),
              signed_copy(A3[e3], e3 == 1 ? +1 : -1));
          // Symbol sums as convolutions: index j0eff + 3 nk - 1 carries
          // sum_u P[u] b[(j0eff - u - 1) + 2 nk].
          const CVec cpv = conv_full(P, bpv);
          const CVec csm = conv_full(P, bsm);
          for (int j0 = 0; j0 < nk; ++j0) {
            if (a0[j0] == 0.0) continue;
            const int j0eff = (e0 == 1) ? j0 : nk - 1 - j0;
            const int ustar = j0eff + nk - 1;  // y = 0 node
            cplx acc = delta_coef * P[ustar];
            // Principal value with symmetric truncation: remove the
            // asymmetric excess picked up by the full convolution.
            const int radius = std::min(ustar, umax - ustar);
            cplx pv = cpv[j0eff + 3 * nk - 1];
            for (int u = 0; u < ustar - radius; ++u) {
              pv -= P[u] * bpv[j0eff - u - 1 + 2 * nk];
            }
            for (int u = ustar + radius + 1; u <= umax; ++u) {
              pv -= P[u] * bpv[j0eff - u - 1 + 2 * nk];
            }
            // Desingularized center value: the odd pairing cancels the
            // singular part exactly, but the regular part of the integrand
            // still carries mass at y = 0 (trapezoid value psi'(0)/i,
            // psi(y) = pv_sign sqrt(2pi) zhat(y) P(u(y)); y decreases in u).
            const cplx psi_p =
                pv_sign * kSqrt2Pi * zhat[2 * nk + 1] * P[ustar - 1];
            const cplx psi_m =
                pv_sign * kSqrt2Pi * zhat[2 * nk - 1] * P[ustar + 1];
            pv += (psi_p - psi_m) / (2.0 * dk * kI);
            acc += pv + csm[j0eff + 3 * nk - 1];
            out[j0] += std::conj(a0[j0]) * acc;
          }
        }
      }
    }
  }
  const double pref = dk * dk * dk / (4.0 * kPi * kPi);
  for (int j0 = 0; j0 < nk; ++j0) {
    out[j0] *= pref * std::polar(1.0, -t * ks[j0] * ks[j0]);
  }
  return out;
}

CVec singular_action_physical(const DistortedBasis& B, const CVec& g1,
                              const CVec& g2, const CVec& g3, double t,
                              char side) {
  require_profile_sizes(B.grid, g1, g2, g3);
  if (side != '+' && side != '-') {
    throw ConfigError("singular_action_physical: side must be '+' or '-'");
  }
  const Vec& chi = (side == '+') ? B.chi_plus : B.chi_minus;
  Vec phi(chi.size());
  for (int i = 0; i < chi.size(); ++i) {
    const double c = chi[i];
    phi[i] = c * c * c * c;
  }
  const CMat E = halfline_kernel(B, side);
  return pairing_action(E, E, E, E, &phi, g1, g2, g3, t, B.grid);
}

CVec regular_action(const DistortedBasis& B, const CVec& g1, const CVec& g2,
                    const CVec& g3, double t) {
  return trilinear_direct(B, g1, g2, g3, t) -
         singular_action(B, g1, g2, g3, t, '+') -
         singular_action(B, g1, g2, g3, t, '-');
}

RegularReport regular_action_report(const DistortedBasis& B, const CVec& g1,
                                    const CVec& g2, const CVec& g3, double t) {
  const Grid& grid = B.grid;
  require_profile_sizes(grid, g1, g2, g3);
  const Vec ks = grid.ks();
  const double dk = grid.dk();
  const double dx = grid.dx();
  const int nk = grid.n_k;

  const CVec direct = trilinear_direct(B, g1, g2, g3, t);
  RegularReport report;
  report.complement = direct - singular_action(B, g1, g2, g3, t, '+') -
                      singular_action(B, g1, g2, g3, t, '-');

  // Kernel-quadruple enumeration: one slot-S / slot-R field per input, then
  // the 15 quadruples with at least one regular slot, grouped by the output
  // kernel so only two adjoint applications are needed.
  CVec e(nk);
  for (int j = 0; j < nk; ++j) e[j] = std::polar(1.0, t * ks[j] * ks[j]);
  const CVec v1 = e.cwiseProduct(g1);
  const CVec v2 = e.cwiseProduct(g2);
  const CVec v3 = e.cwiseProduct(g3);
  const CVec uS[3] = {B.K_S * v1, B.K_S * v2, B.K_S * v3};
  const CVec uR[3] = {B.K_R * v1, B.K_R * v2, B.K_R * v3};
  const int nx = grid.n_x;
  CVec accS = CVec::Zero(nx);
  CVec accR = CVec::Zero(nx);
  for (int b = 0; b < 2; ++b) {
    for (int c = 0; c < 2; ++c) {
      for (int d = 0; d < 2; ++d) {
        const CVec& w1 = (b == 0) ? uS[0] : uR[0];
        const CVec& w2 = (c == 0) ? uS[1] : uR[1];
        const CVec& w3 = (d == 0) ? uS[2] : uR[2];
        const CVec W =
            (w1.array() * w2.conjugate().array() * w3.array()).matrix();
        if (b != 0 || c != 0 || d != 0) accS += W;  // skip the all-S quadruple
        accR += W;
      }
    }
  }
  const double pref = dk * dk * dk * dx / (4.0 * kPi * kPi);
  CVec r1 = B.K_S.adjoint() * accS + B.K_R.adjoint() * accR;
  for (int j = 0; j < nk; ++j) r1[j] *= pref * std::conj(e[j]);

  Vec ones = Vec::Ones(nx);
  CVec all_singular =
      pairing_action(B.K_S, B.K_S, B.K_S, B.K_S, &ones, g1, g2, g3, t, grid);
  CVec r2 = all_singular - singular_action_physical(B, g1, g2, g3, t, '+') -
            singular_action_physical(B, g1, g2, g3, t, '-');

  report.independent = r1 + r2;
  const double scale =
      std::max(direct.cwiseAbs().maxCoeff(), 1e-300);
  report.closure_rel =
      (report.complement - report.independent).cwiseAbs().maxCoeff() / scale;
  return report;
}

double commutator_residual(const TrilinearSpec& spec, const CVec& f1,
                           const CVec& f2, const CVec& f3) {
  const Grid& grid = spec.grid;
  require_profile_sizes(grid, f1, f2, f3);
  const int nk = grid.n_k;
  const double dk = grid.dk();
  if (nk < 8) throw ConfigError("commutator_residual: lattice too small");

  const CVec T0 = trilinear_apply(spec, f1, f2, f3);
  const CVec lhs = centered_diff(T0, dk);

  const CVec t1 = trilinear_apply(spec, centered_diff(f1, dk), f2, f3);
  const CVec t2 = trilinear_apply(spec, f1, centered_diff(f2, dk), f3);
  const CVec t3 = trilinear_apply(spec, f1, f2, centered_diff(f3, dk));

  TrilinearSpec yspec = spec;
  yspec.b_kind = BKind::smooth;
  switch (spec.b_kind) {
    case BKind::smooth:
      for (int j = 0; j <= 4 * nk; ++j) {
        yspec.b_samples[j] *= (j - 2 * nk) * dk;
      }
      break;
    case BKind::pv:
      // y * zhat(y)/(iy) extends smoothly to zhat/i, center node included.
      yspec.b_samples = spec.b_samples / kI;
      break;
    case BKind::delta:
      yspec.b_samples = CVec::Zero(4 * nk + 1);
      break;
  }
  const CVec t4 = trilinear_apply(yspec, f1, f2, f3);

  const double e1 = spec.eps[0], e2 = spec.eps[1], e3 = spec.eps[2];
  const cplx two_it = 2.0 * kI * spec.t;
  double num = 0.0;
  double den = 0.0;
  for (int j = 3; j + 3 < nk; ++j) {
    const cplx rhs = -e1 * t1[j] + e2 * t2[j] - e3 * t3[j] - two_it * t4[j];
    num = std::max(num, std::abs(lhs[j] - rhs));
    den = std::max(den, std::abs(lhs[j]));
  }
  return num / std::max(den, 1e-300);
}

double inverse_fd_map(const TrilinearSpec& spec, const CVec& f1,
                      const CVec& f2, const CVec& f3) {
  const Grid& grid = spec.grid;
  require_profile_sizes(grid, f1, f2, f3);
  if (spec.b_kind != BKind::smooth) {
    throw ConfigError(
        "inverse_fd_map: requires a smooth symbol (distributional symbols "
        "have no pointwise flat inverse transform)");
  }
  const int nk = grid.n_k;
  const int nx = grid.n_x;
  const double dk = grid.dk();
  const double t = spec.t;
  const Vec ks = grid.ks();
  const Vec xs = grid.xs();

  const CVec T = trilinear_apply(spec, f1, f2, f3);
  CVec e(nk);
  for (int j = 0; j < nk; ++j) e[j] = std::polar(1.0, t * ks[j] * ks[j]);

  // Flat transforms at +x and -x for all lattice functions at once.
  CMat Mp(nx, nk);
  for (int j = 0; j < nk; ++j) {
    for (int i = 0; i < nx; ++i) {
      Mp(i, j) = std::polar(1.0, ks[j] * xs[i]);
    }
  }
  const CMat Mm = Mp.conjugate();
  const double flat = dk / kSqrt2Pi;

  const CVec lhs = flat * (Mp * e.cwiseProduct(T));
  const CVec w1 = e.cwiseProduct(f1);
  const CVec w2 = e.cwiseProduct(f2);
  const CVec w3 = e.cwiseProduct(f3);
  const CVec u1 = flat * ((spec.eps[0] > 0 ? Mm : Mp) * w1);  // at -e1 x
  const CVec u2 = flat * ((spec.eps[1] > 0 ? Mp : Mm) * w2);  // at +e2 x
  const CVec u3 = flat * ((spec.eps[2] > 0 ? Mm : Mp) * w3);  // at -e3 x

  CVec binv(nx);
  for (int i = 0; i < nx; ++i) {
    cplx acc = 0.0;
    for (int j = 0; j <= 4 * nk; ++j) {
      acc += std::polar(1.0, (j - 2 * nk) * dk * xs[i]) * spec.b_samples[j];
    }
    binv[i] = acc * flat;
  }

  const double c32 = kSqrt2Pi * kSqrt2Pi * kSqrt2Pi;  // (2 pi)^{3/2}
  const CVec rhs = c32 * (u1.array() * u2.conjugate().array() * u3.array() *
                          binv.array())
                             .matrix();
  return (lhs - rhs).norm() / std::max(lhs.norm(), 1e-300);
}

}  // namespace nlslab
