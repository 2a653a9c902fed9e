#include "nlslab/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <vector>

namespace nlslab {

ScatteringData coefficients(const JostField& J, const Potential& V) {
  const int nk = J.grid.n_k;
  ScatteringData S;
  S.ks = J.grid.ks();
  S.T.resize(nk);
  S.R_plus.resize(nk);
  S.R_minus.resize(nk);

  std::vector<int> zero_nodes;
  for (int j = 0; j < nk; ++j) {
    if (std::abs(S.ks[j]) < 1e-12) {
      zero_nodes.push_back(j);
      continue;
    }
    const cplx A = J.match_A[j], B = J.match_B[j];
    const cplx At = J.match_At[j], Bt = J.match_Bt[j];
    if (std::abs(A) < 1e-12 || std::abs(At) < 1e-12)
      throw NumericalError(
          "scattering: |1/T| < 1e-12 (transmission blow-up, would require a "
          "bound state)");
    S.T[j] = 1.0 / A;
    S.R_minus[j] = B / A;
    S.R_plus[j] = Bt / At;
  }

  const GenericityResult gen = is_generic(J, V);
  S.generic = gen.generic;
  S.generic_value = gen.value;

  // k = 0 node (only present on non-half-shifted user lattices): generic
  // potentials pin T(0) = 0, R(0) = -1; otherwise extend by continuity.
  for (int j : zero_nodes) {
    if (S.generic) {
      S.T[j] = 0.0;
      S.R_plus[j] = -1.0;
      S.R_minus[j] = -1.0;
    } else {
      int src = -1;
      double best = 1e300;
      for (int i = 0; i < nk; ++i) {
        if (std::abs(S.ks[i]) >= 1e-12 && std::abs(S.ks[i]) < best) {
          best = std::abs(S.ks[i]);
          src = i;
        }
      }
      if (src < 0) throw ContractError("scattering: lattice has only k = 0");
      S.T[j] = S.T[src];
      S.R_plus[j] = S.R_plus[src];
      S.R_minus[j] = S.R_minus[src];
    }
  }
  return S;
}

ScatteringData delta_closed_form(double q, const Vec& ks) {
  if (q <= 0.0) throw ContractError("delta_closed_form: q must be > 0");
  ScatteringData S;
  S.ks = ks;
  const int nk = static_cast<int>(ks.size());
  S.T.resize(nk);
  S.R_plus.resize(nk);
  S.R_minus.resize(nk);
  for (int j = 0; j < nk; ++j) {
    const cplx den = 2.0 * kI * ks[j] - q;
    S.T[j] = 2.0 * kI * ks[j] / den;
    S.R_plus[j] = q / den;
    S.R_minus[j] = S.R_plus[j];
  }
  S.generic = true;
  S.generic_value = q;
  return S;
}

GenericityResult is_generic(const JostField& J, const Potential& V) {
  GenericityResult out;
  if (V.is_zero()) return out;  // non-generic, value 0
  const JostColumn col = solve_jost_column(V, J.grid, 0.0, '+');
  // At k = 0 the free flow keeps psi' constant below the support, so
  // -psi'(x_min) = int V(x) m_+(x,0) dx exactly.
  out.value = -col.dx_m[0];
  const double threshold = 1e-8 * V.l1_norm();
  out.generic = std::abs(out.value) > threshold;
  if (threshold > 0.0) {
    const double ratio = std::abs(out.value) / threshold;
    if (ratio > 0.1 && ratio < 10.0)
      std::fprintf(stderr,
                   "warning: genericity integral %.3e within 10x of threshold "
                   "%.3e; classification is borderline\n",
                   std::abs(out.value), threshold);
  }
  return out;
}

LowKExpansion low_k_expansion(ScatteringData& S) {
  if (!S.generic)
    throw ContractError("low_k_expansion: potential classified non-generic");
  const int nk = static_cast<int>(S.ks.size());
  if (nk < 8) throw ContractError("low_k_expansion: need at least 8 k nodes");
  std::vector<int> idx(nk);
  std::iota(idx.begin(), idx.end(), 0);
  std::partial_sort(idx.begin(), idx.begin() + 8, idx.end(),
                    [&](int a, int b) {
                      return std::abs(S.ks[a]) < std::abs(S.ks[b]);
                    });
  double skk = 0.0;
  cplx skT{0.0, 0.0}, skRp{0.0, 0.0}, skRm{0.0, 0.0};
  for (int t = 0; t < 8; ++t) {
    const int j = idx[t];
    const double k = S.ks[j];
    if (std::abs(k) < 1e-12) continue;
    skk += k * k;
    skT += k * S.T[j];
    skRp += k * (1.0 + S.R_plus[j]);
    skRm += k * (1.0 + S.R_minus[j]);
  }
  LowKExpansion L;
  L.alpha = skT / skk;
  L.alpha_plus = skRp / skk;
  L.alpha_minus = skRm / skk;
  S.alpha_slope = L.alpha;
  return L;
}

ScatteringData barrier_transfer_matrix(double height, double half_width,
                                       const Vec& ks) {
  if (height < 0.0 || half_width <= 0.0)
    throw ContractError("barrier_transfer_matrix: need K >= 0, L > 0");
  ScatteringData S;
  S.ks = ks;
  const int nk = static_cast<int>(ks.size());
  S.T.resize(nk);
  S.R_plus.resize(nk);
  S.R_minus.resize(nk);
  const double L = half_width;
  for (int j = 0; j < nk; ++j) {
    const double k = ks[j];
    if (std::abs(k) < 1e-12) {
      S.T[j] = 0.0;
      S.R_plus[j] = -1.0;
      S.R_minus[j] = -1.0;
      continue;
    }
    const cplx kap = std::sqrt(cplx(k * k - height, 0.0));
    const cplx cL = std::cos(2.0 * kap * L);
    const cplx sL =
        (std::abs(kap) < 1e-12) ? cplx(2.0 * L, 0.0) : std::sin(2.0 * kap * L) / kap;
    // psi_+ = e^{ikx} at the right edge, propagated back across the slab.
    const cplx psiR = std::exp(kI * (k * L));
    const cplx dpsiR = kI * k * psiR;
    const cplx psi = cL * psiR - sL * dpsiR;
    const cplx dpsi = kap * kap * sL * psiR + cL * dpsiR;
    const cplx eL = std::exp(kI * (k * L));  // e^{-ik(-L)}
    const cplx den = 2.0 * kI * k;
    const cplx A = eL * (dpsi + kI * k * psi) / den;
    const cplx B = (kI * k * psi - dpsi) / (eL * den);
    S.T[j] = 1.0 / A;
    S.R_minus[j] = B / A;
    S.R_plus[j] = S.R_minus[j];  // even barrier
  }
  S.generic = height > 0.0;
  return S;
}

void save_scattering_csv(const ScatteringData& S, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  out << "k,re_T,im_T,re_Rp,im_Rp,re_Rm,im_Rm\n";
  char line[256];
  for (int j = 0; j < static_cast<int>(S.ks.size()); ++j) {
    std::snprintf(line, sizeof(line),
                  "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", S.ks[j],
                  S.T[j].real(), S.T[j].imag(), S.R_plus[j].real(),
                  S.R_plus[j].imag(), S.R_minus[j].real(), S.R_minus[j].imag());
    out << line;
  }
  if (!out) throw ConfigError("write failed: " + path);
}

}  // namespace nlslab
