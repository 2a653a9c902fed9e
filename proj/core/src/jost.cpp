#include "nlslab/jost.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <utility>
#include <vector>

#include "gl_rule.hpp"

namespace nlslab {
namespace {

// Exact propagator over one constant piece of the staircase: with
// w2 = k^2 - q and u = w2*d^2,
//   [psi; psi'](x+d) = [[C, d*S], [-w2*d*S, C]] [psi; psi'](x),
// where C = cos(sqrt u) and S = sin(sqrt u)/sqrt u continue analytically to
// the hyperbolic branch for u < 0. g = (C - S)/u feeds the k-derivative of
// the off-diagonal entry; all three are entire in u (series near u = 0).
struct CellCoef {
  double C, S, g;
};

CellCoef cell_coef(double u) {
  CellCoef c;
  if (std::abs(u) < 1e-4) {
    c.C = 1.0 + u * (-0.5 + u * (1.0 / 24.0 - u / 720.0));
    c.S = 1.0 + u * (-1.0 / 6.0 + u * (1.0 / 120.0 - u / 5040.0));
    c.g = -1.0 / 3.0 + u * (1.0 / 30.0 - u / 840.0);
  } else if (u > 0.0) {
    const double s = std::sqrt(u);
    c.C = std::cos(s);
    c.S = std::sin(s) / s;
    c.g = (c.C - c.S) / u;
  } else {
    if (u < -4.9e5)
      throw NumericalError("jost cell propagator overflow: |V| dx^2 too large");
    const double s = std::sqrt(-u);
    c.C = std::cosh(s);
    c.S = std::sinh(s) / s;
    c.g = (c.C - c.S) / u;
  }
  return c;
}

// (psi, psi', d_k psi, d_k psi') advanced over a signed width d; the
// derivative block applies dP/dk (exact entries: dC/dk = -S k d^2,
// d(dS)/dk = k d^3 g, d(-w2 d S)/dk = -k d (S + C)).
struct SweepState {
  cplx psi, dpsi, psik, dpsik;
};

void advance4(SweepState& st, double d, double q, double k) {
  const double w2 = k * k - q;
  const CellCoef cc = cell_coef(w2 * d * d);
  const double a = cc.C, b = d * cc.S, c = -w2 * d * cc.S;
  const double da = -cc.S * k * d * d;
  const double db = k * d * d * d * cc.g;
  const double dc = -k * d * (cc.S + cc.C);
  const cplx psi = st.psi, dpsi = st.dpsi;
  const cplx psik = st.psik, dpsik = st.dpsik;
  st.psi = a * psi + b * dpsi;
  st.dpsi = c * psi + a * dpsi;
  st.psik = a * psik + b * dpsik + da * psi + db * dpsi;
  st.dpsik = c * psik + a * dpsik + dc * psi + da * dpsi;
}

void advance2(cplx& psi, cplx& dpsi, double d, double q, double k) {
  const double w2 = k * k - q;
  const CellCoef cc = cell_coef(w2 * d * d);
  const cplx p = psi, dp = dpsi;
  psi = cc.C * p + d * cc.S * dp;
  dpsi = -w2 * d * cc.S * p + cc.C * dp;
}

double stair_q(const Staircase& sc, double x) {
  if (sc.empty() || x <= sc.edges.front() || x >= sc.edges.back()) return 0.0;
  auto it = std::upper_bound(sc.edges.begin(), sc.edges.end(), x);
  int idx = static_cast<int>(it - sc.edges.begin()) - 1;
  idx = std::clamp(idx, 0, static_cast<int>(sc.q.size()) - 1);
  return sc.q[idx];
}

// k-independent decomposition of every grid cell into constant pieces
// (width, q); barrier edges cut cells exactly.
struct CellDecomp {
  std::vector<std::pair<double, double>> pieces;
  std::vector<int> offset;  // cell c owns [offset[c], offset[c+1])
};

CellDecomp decompose(const Vec& xs, const Staircase& sc) {
  const int n = static_cast<int>(xs.size());
  CellDecomp d;
  d.offset.assign(n, 0);
  d.pieces.reserve(n + 4);
  for (int c = 0; c + 1 < n; ++c) {
    const double a = xs[c], b = xs[c + 1];
    double prev = a;
    if (!sc.empty()) {
      auto it = std::upper_bound(sc.edges.begin(), sc.edges.end(), a + 1e-12);
      for (; it != sc.edges.end() && *it < b - 1e-12; ++it) {
        d.pieces.emplace_back(*it - prev, stair_q(sc, 0.5 * (prev + *it)));
        prev = *it;
      }
    }
    d.pieces.emplace_back(b - prev, stair_q(sc, 0.5 * (prev + b)));
    d.offset[c + 1] = static_cast<int>(d.pieces.size());
  }
  return d;
}

struct ColumnRef {
  cplx* m;
  cplx* dkm;
  cplx* dxm;
  cplx* dkdxm = nullptr;  // optional d_k d_x m output
};

// Backward sweep for m_+: exactly 1 right of the support, plane-wave seed
// psi = e^{ikx} at seed_node, cells applied right-to-left (signed -width).
void sweep_plus(const Vec& xs, const CellDecomp& dc, int seed_node, double k,
                ColumnRef out, cplx& A, cplx& B) {
  const int n = static_cast<int>(xs.size());
  for (int i = seed_node; i < n; ++i) {
    out.m[i] = 1.0;
    out.dkm[i] = 0.0;
    out.dxm[i] = 0.0;
    if (out.dkdxm) out.dkdxm[i] = 0.0;
  }
  const double xr = xs[seed_node];
  const cplx e = std::exp(kI * (k * xr));
  SweepState st{e, kI * k * e, kI * xr * e, kI * (1.0 + kI * (k * xr)) * e};
  for (int c = seed_node - 1; c >= 0; --c) {
    for (int p = dc.offset[c + 1] - 1; p >= dc.offset[c]; --p)
      advance4(st, -dc.pieces[p].first, dc.pieces[p].second, k);
    const double x = xs[c];
    const cplx em = std::exp(-kI * (k * x));
    out.m[c] = em * st.psi;
    out.dkm[c] = em * (st.psik - kI * x * st.psi);
    out.dxm[c] = em * (st.dpsi - kI * k * st.psi);
    if (out.dkdxm)
      out.dkdxm[c] = em * (st.dpsik - kI * st.psi - kI * k * st.psik -
                           kI * x * (st.dpsi - kI * k * st.psi));
  }
  if (std::abs(k) >= 1e-9) {
    const cplx E = std::exp(-kI * (k * xs[0]));
    const cplx den = 2.0 * kI * k;
    A = E * (st.dpsi + kI * k * st.psi) / den;
    B = (kI * k * st.psi - st.dpsi) / (E * den);
  } else {
    A = B = cplx(std::nan(""), std::nan(""));
  }
}

// Forward sweep for m_-: exactly 1 left of the support, seed psi = e^{-ikx}.
void sweep_minus(const Vec& xs, const CellDecomp& dc, int seed_node, double k,
                 ColumnRef out, cplx& At, cplx& Bt) {
  const int n = static_cast<int>(xs.size());
  for (int i = 0; i <= seed_node; ++i) {
    out.m[i] = 1.0;
    out.dkm[i] = 0.0;
    out.dxm[i] = 0.0;
    if (out.dkdxm) out.dkdxm[i] = 0.0;
  }
  const double xl = xs[seed_node];
  const cplx e = std::exp(-kI * (k * xl));
  SweepState st{e, -kI * k * e, -kI * xl * e, -kI * (1.0 - kI * (k * xl)) * e};
  for (int c = seed_node; c + 1 < n; ++c) {
    for (int p = dc.offset[c]; p < dc.offset[c + 1]; ++p)
      advance4(st, dc.pieces[p].first, dc.pieces[p].second, k);
    const double x = xs[c + 1];
    const cplx ep = std::exp(kI * (k * x));
    out.m[c + 1] = ep * st.psi;
    out.dkm[c + 1] = ep * (st.psik + kI * x * st.psi);
    out.dxm[c + 1] = ep * (st.dpsi + kI * k * st.psi);
    if (out.dkdxm)
      out.dkdxm[c + 1] = ep * (st.dpsik + kI * st.psi + kI * k * st.psik +
                               kI * x * (st.dpsi + kI * k * st.psi));
  }
  if (std::abs(k) >= 1e-9) {
    const double x1 = xs[n - 1];
    const cplx E = std::exp(kI * (k * x1));
    const cplx den = 2.0 * kI * k;
    At = E * (kI * k * st.psi - st.dpsi) / den;
    Bt = (st.dpsi + kI * k * st.psi) / (E * den);
  } else {
    At = Bt = cplx(std::nan(""), std::nan(""));
  }
}

// Back-substitution residual of the Volterra equation
//   m_+(x) = 1 + int_x^inf D_k(y-x) V(y) m_+(y) dy
// on one k-column, with the cell integrals evaluated by 16-point
// Gauss-Legendre product quadrature of the exact in-cell solution.
double column_residual(const Vec& xs, const CellDecomp& dc, int iL, int iR,
                       double k, const ColumnRef& col) {
  const auto& g = detail::gl_table<16>();
  const int ncell = iR - iL;
  if (ncell <= 0) return 0.0;
  std::vector<cplx> SE(ncell + 1, cplx{0.0, 0.0}), SF(ncell + 1, cplx{0.0, 0.0});
  for (int c = iR - 1; c >= iL; --c) {
    const double xa = xs[c];
    const cplx eik = std::exp(kI * (k * xa));
    cplx psi = eik * col.m[c];
    cplx dpsi = eik * (col.dxm[c] + kI * k * col.m[c]);
    cplx Esum{0.0, 0.0}, Fsum{0.0, 0.0};
    double pl = xa;
    for (int p = dc.offset[c]; p < dc.offset[c + 1]; ++p) {
      const double w = dc.pieces[p].first, q = dc.pieces[p].second;
      if (q != 0.0) {
        const double mid = pl + 0.5 * w, half = 0.5 * w;
        for (int t = 0; t < 16; ++t) {
          const double y = mid + half * g.x[t];
          cplx ps = psi, dps = dpsi;
          advance2(ps, dps, y - pl, q, k);
          const cplx ph = std::exp(kI * (k * y));
          Esum += (g.w[t] * half * q) * ph * ps;
          Fsum += (g.w[t] * half * q) * std::conj(ph) * ps;
        }
      }
      advance2(psi, dpsi, w, q, k);
      pl += w;
    }
    SE[c - iL] = Esum + SE[c - iL + 1];
    SF[c - iL] = Fsum + SF[c - iL + 1];
  }
  const cplx den = 2.0 * kI * k;
  double mr = 0.0;
  for (int i = std::max(0, iL - 3); i <= iR; ++i) {
    const int c = std::max(i - iL, 0);
    const cplx integral =
        (std::exp(-2.0 * kI * (k * xs[i])) * SE[c] - SF[c]) / den;
    mr = std::max(mr, std::abs(col.m[i] - 1.0 - integral));
  }
  return mr;
}

void check_same_grid(const Potential& V, const Grid& grid, const Vec& xs) {
  const int n = grid.n_x;
  if (static_cast<int>(V.xs.size()) != n ||
      std::abs(V.xs[0] - xs[0]) > 1e-9 ||
      std::abs(V.xs[n - 1] - xs[n - 1]) > 1e-9)
    throw ContractError("jost: potential is not sampled on this grid");
}

int support_node_right(const Vec& xs, const Staircase& sc) {
  const int n = static_cast<int>(xs.size());
  for (int i = 0; i < n; ++i)
    if (xs[i] >= sc.edges.back() - 1e-12) return i;
  return n - 1;
}

int support_node_left(const Vec& xs, const Staircase& sc) {
  const int n = static_cast<int>(xs.size());
  for (int i = n - 1; i >= 0; --i)
    if (xs[i] <= sc.edges.front() + 1e-12) return i;
  return 0;
}

}  // namespace

Staircase staircase_model(const Potential& V) {
  Staircase sc;
  if (V.is_zero()) return sc;
  if (V.kind == PotentialKind::barrier) {
    sc.edges = {-V.barrier_half_width, V.barrier_half_width};
    sc.q = {V.barrier_height};
    return sc;
  }
  const int n = static_cast<int>(V.xs.size());
  const int lo = std::max(V.support_lo - 1, 0);
  const int hi = std::min(V.support_hi + 1, n - 1);
  sc.edges.push_back(V.xs[lo]);
  for (int i = lo; i < hi; ++i) {
    sc.q.push_back(0.5 * (V.vs[i] + V.vs[i + 1]));
    sc.edges.push_back(V.xs[i + 1]);
  }
  return sc;
}

JostField solve_jost(const Potential& V, const Grid& grid) {
  const Vec xs = grid.xs();
  check_same_grid(V, grid, xs);
  const Vec ks = grid.ks();
  const int nx = grid.n_x, nk = grid.n_k;

  JostField J;
  J.grid = grid;
  J.potential = V;
  J.m_plus.resize(nx, nk);
  J.m_minus.resize(nx, nk);
  J.dk_m_plus.resize(nx, nk);
  J.dk_m_minus.resize(nx, nk);
  J.dx_m_plus.resize(nx, nk);
  J.dx_m_minus.resize(nx, nk);
  J.match_A.resize(nk);
  J.match_B.resize(nk);
  J.match_At.resize(nk);
  J.match_Bt.resize(nk);

  const Staircase sc = staircase_model(V);
  if (sc.empty()) {
    J.m_plus.setOnes();
    J.m_minus.setOnes();
    J.dk_m_plus.setZero();
    J.dk_m_minus.setZero();
    J.dx_m_plus.setZero();
    J.dx_m_minus.setZero();
    J.match_A.setOnes();
    J.match_B.setZero();
    J.match_At.setOnes();
    J.match_Bt.setZero();
    return J;
  }

  const CellDecomp dc = decompose(xs, sc);
  const int iR = support_node_right(xs, sc);
  const int iL = support_node_left(xs, sc);
  const int stride = std::max(1, nk / 8);

  double maxres = 0.0;
  for (int j = 0; j < nk; ++j) {
    const double k = ks[j];
    ColumnRef cp{&J.m_plus(0, j), &J.dk_m_plus(0, j), &J.dx_m_plus(0, j)};
    sweep_plus(xs, dc, iR, k, cp, J.match_A[j], J.match_B[j]);
    ColumnRef cm{&J.m_minus(0, j), &J.dk_m_minus(0, j), &J.dx_m_minus(0, j)};
    sweep_minus(xs, dc, iL, k, cm, J.match_At[j], J.match_Bt[j]);
    if (j % stride == 0 && std::abs(k) >= 1e-9)
      maxres = std::max(maxres, column_residual(xs, dc, iL, iR, k, cp));
  }
  J.max_residual = maxres;
  if (maxres > 1e-8) {
    char buf[128];
    std::snprintf(buf, sizeof(buf),
                  "jost: Volterra residual %.3e exceeds 1e-8", maxres);
    throw NumericalError(buf);
  }
  return J;
}

JostColumn solve_jost_column(const Potential& V, const Grid& grid, double k,
                             char side) {
  const Vec xs = grid.xs();
  check_same_grid(V, grid, xs);
  const int nx = grid.n_x;
  JostColumn col;
  col.m.resize(nx);
  col.dk_m.resize(nx);
  col.dx_m.resize(nx);
  const Staircase sc = staircase_model(V);
  if (sc.empty()) {
    col.m.setOnes();
    col.dk_m.setZero();
    col.dx_m.setZero();
    col.A = 1.0;
    col.B = 0.0;
    return col;
  }
  const CellDecomp dc = decompose(xs, sc);
  ColumnRef ref{col.m.data(), col.dk_m.data(), col.dx_m.data()};
  if (side == '+') {
    sweep_plus(xs, dc, support_node_right(xs, sc), k, ref, col.A, col.B);
  } else if (side == '-') {
    sweep_minus(xs, dc, support_node_left(xs, sc), k, ref, col.A, col.B);
  } else {
    throw ContractError("solve_jost_column: side must be '+' or '-'");
  }
  return col;
}

CMat jost_symbol(const Potential& V, const Grid& grid, char which, char side) {
  if (which != 'm' && which != 'x' && which != 'k' && which != 'b')
    throw ContractError("jost_symbol: which must be one of 'm','x','k','b'");
  if (side != '+' && side != '-')
    throw ContractError("jost_symbol: side must be '+' or '-'");
  const Vec xs = grid.xs();
  check_same_grid(V, grid, xs);
  const Vec ks = grid.ks();
  const int nx = grid.n_x, nk = grid.n_k;
  CMat out(nx, nk);
  const Staircase sc = staircase_model(V);
  if (sc.empty()) {
    out.setZero();  // m = 1 identically, all derivatives vanish
    return out;
  }
  const CellDecomp dc = decompose(xs, sc);
  const int seed = (side == '+') ? support_node_right(xs, sc)
                                 : support_node_left(xs, sc);
  std::vector<cplx> m(nx), dkm(nx), dxm(nx), dkdxm(nx);
  cplx A, B;
  for (int j = 0; j < nk; ++j) {
    ColumnRef ref{m.data(), dkm.data(), dxm.data(), dkdxm.data()};
    if (side == '+')
      sweep_plus(xs, dc, seed, ks[j], ref, A, B);
    else
      sweep_minus(xs, dc, seed, ks[j], ref, A, B);
    for (int i = 0; i < nx; ++i) {
      switch (which) {
        case 'm': out(i, j) = m[i] - 1.0; break;
        case 'x': out(i, j) = dxm[i]; break;
        case 'k': out(i, j) = dkm[i]; break;
        default: out(i, j) = dkdxm[i]; break;
      }
    }
  }
  return out;
}

CMat eigenfunction(const JostField& J, char side) {
  if (side != '+' && side != '-')
    throw ContractError("eigenfunction: side must be '+' or '-'");
  const Vec xs = J.grid.xs();
  const Vec ks = J.grid.ks();
  const double sgn = (side == '+') ? 1.0 : -1.0;
  const CMat& m = (side == '+') ? J.m_plus : J.m_minus;
  CMat psi(J.grid.n_x, J.grid.n_k);
  for (int j = 0; j < J.grid.n_k; ++j)
    for (int i = 0; i < J.grid.n_x; ++i)
      psi(i, j) = std::exp(kI * (sgn * ks[j] * xs[i])) * m(i, j);
  return psi;
}

JostBoundReport jost_bound_report(const JostField& J, const Potential& V) {
  const Vec xs = J.grid.xs();
  const Vec ks = J.grid.ks();
  const TailWeight W1p = tail_weight(V, 1.0, '+');
  const TailWeight W2p = tail_weight(V, 2.0, '+');
  const TailWeight W1m = tail_weight(V, 1.0, '-');
  const TailWeight W2m = tail_weight(V, 2.0, '-');
  JostBoundReport rep{{0.0, 0.0}, {0.0, 0.0}};
  for (int j = 0; j < J.grid.n_k; ++j) {
    const double br = japanese_bracket(ks[j]);
    for (int i = 0; i < J.grid.n_x; ++i) {
      if (xs[i] >= -1.0) {
        if (W1p.values[i] > 0.0)
          rep.c_plus[0] = std::max(
              rep.c_plus[0], std::abs(J.m_plus(i, j) - 1.0) * br / W1p.values[i]);
        if (W2p.values[i] > 0.0)
          rep.c_plus[1] = std::max(
              rep.c_plus[1], std::abs(J.dk_m_plus(i, j)) * br / W2p.values[i]);
      }
      if (xs[i] <= 1.0) {
        if (W1m.values[i] > 0.0)
          rep.c_minus[0] = std::max(
              rep.c_minus[0],
              std::abs(J.m_minus(i, j) - 1.0) * br / W1m.values[i]);
        if (W2m.values[i] > 0.0)
          rep.c_minus[1] = std::max(
              rep.c_minus[1], std::abs(J.dk_m_minus(i, j)) * br / W2m.values[i]);
      }
    }
  }
  return rep;
}

}  // namespace nlslab
