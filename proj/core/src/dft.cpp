#include "nlslab/dft.hpp"

#include <cmath>

namespace nlslab {
namespace {

void check_lattice_symmetry(const Vec& ks) {
  const int n = static_cast<int>(ks.size());
  for (int j = 0; j < n / 2; ++j)
    if (std::abs(ks[j] + ks[n - 1 - j]) > 1e-12 * std::max(1.0, std::abs(ks[j])))
      throw ContractError("dft: k-lattice is not symmetric about 0");
}

}  // namespace

const CVec& DistortedBasis::a_coeff(char side, char eps) const {
  if (side == '+' && eps == '+') return a_pp;
  if (side == '+' && eps == '-') return a_pm;
  if (side == '-' && eps == '+') return a_mp;
  if (side == '-' && eps == '-') return a_mm;
  throw ContractError("a_coeff: side and eps must each be '+' or '-'");
}

Vec cutoff_bump(const Vec& xs) {
  Vec phi(xs.size());
  for (Eigen::Index i = 0; i < xs.size(); ++i) {
    const double x = xs[i];
    phi[i] = (std::abs(x) < 2.0) ? 0.25 * (1.0 + std::cos(0.5 * kPi * x)) : 0.0;
  }
  return phi;
}

Vec cutoff_chi_plus(const Vec& xs) {
  const Vec phi = cutoff_bump(xs);
  const Eigen::Index n = xs.size();
  Vec chi(n);
  chi[0] = 0.0;
  for (Eigen::Index i = 1; i < n; ++i)
    chi[i] = chi[i - 1] + 0.5 * (phi[i] + phi[i - 1]) * (xs[i] - xs[i - 1]);
  const double total = chi[n - 1];
  if (total <= 0.0)
    throw ContractError("cutoff_chi_plus: grid does not resolve the bump");
  chi /= total;
  return chi;
}

DistortedBasis build_basis(const JostField& J, const ScatteringData& S,
                           const Grid& grid) {
  if (!J.grid.same_as(grid))
    throw ContractError("build_basis: Jost field is on a different grid");
  const Vec ks = grid.ks();
  if (S.ks.size() != ks.size() ||
      (S.ks - ks).cwiseAbs().maxCoeff() > 1e-12)
    throw ContractError("build_basis: scattering data is on a different grid");
  check_lattice_symmetry(ks);

  const Vec xs = grid.xs();
  const int nx = grid.n_x, nk = grid.n_k;

  DistortedBasis B;
  B.grid = grid;
  B.potential = J.potential;
  B.scattering = S;
  B.chi_plus = cutoff_chi_plus(xs);
  B.chi_minus = Vec::Ones(nx) - B.chi_plus;
  B.a_pp.resize(nk);
  B.a_pm.resize(nk);
  B.a_mp.resize(nk);
  B.a_mm.resize(nk);
  B.K.resize(nx, nk);
  B.K_S.resize(nx, nk);
  B.K_R.resize(nx, nk);

  CVec eplus(nx);  // e^{ikx} column scratch
  for (int j = 0; j < nk; ++j) {
    const double k = ks[j];
    const int jm = nk - 1 - j;  // mirror node: ks[jm] = -k exactly
    for (int i = 0; i < nx; ++i) eplus[i] = std::exp(kI * (k * xs[i]));

    if (k >= 0.0) {
      B.a_pp[j] = S.T[j];
      B.a_pm[j] = 0.0;
      B.a_mp[j] = 1.0;
      B.a_mm[j] = S.R_minus[j];
      for (int i = 0; i < nx; ++i) {
        const cplx ep = eplus[i], em = std::conj(ep);
        const cplx KS = B.chi_plus[i] * (S.T[j] * ep) +
                        B.chi_minus[i] * (ep + S.R_minus[j] * em);
        const cplx KR =
            B.chi_plus[i] * (S.T[j] * (J.m_plus(i, j) - 1.0) * ep) +
            B.chi_minus[i] * ((J.m_minus(i, jm) - 1.0) * ep +
                              S.R_minus[j] * (J.m_minus(i, j) - 1.0) * em);
        B.K_S(i, j) = KS;
        B.K_R(i, j) = KR;
        B.K(i, j) = S.T[j] * J.m_plus(i, j) * ep / kSqrt2Pi;
      }
    } else {
      // k < 0: K(x,k) = T(-k) psi_-(x,-k) / sqrt(2pi); the m_- column at -k
      // is the mirror node jm.
      B.a_pp[j] = 1.0;
      B.a_pm[j] = S.R_plus[jm];
      B.a_mp[j] = S.T[jm];
      B.a_mm[j] = 0.0;
      for (int i = 0; i < nx; ++i) {
        const cplx ep = eplus[i], em = std::conj(ep);
        const cplx KS = B.chi_plus[i] * (ep + S.R_plus[jm] * em) +
                        B.chi_minus[i] * (S.T[jm] * ep);
        const cplx KR =
            B.chi_plus[i] * ((J.m_plus(i, j) - 1.0) * ep +
                             S.R_plus[jm] * (J.m_plus(i, jm) - 1.0) * em) +
            B.chi_minus[i] * (S.T[jm] * (J.m_minus(i, jm) - 1.0) * ep);
        B.K_S(i, j) = KS;
        B.K_R(i, j) = KR;
        B.K(i, j) = S.T[jm] * J.m_minus(i, jm) * ep / kSqrt2Pi;
      }
    }
  }
  return B;
}

CVec forward(const DistortedBasis& B, const CVec& f) {
  if (f.size() != B.grid.n_x)
    throw ContractError("forward: input is not on the basis x-grid");
  return B.grid.dx() * (B.K.adjoint() * f);
}

CVec inverse(const DistortedBasis& B, const CVec& g) {
  if (g.size() != B.grid.n_k)
    throw ContractError("inverse: input is not on the basis k-lattice");
  return B.grid.dk() * (B.K * g);
}

CVec multiplier(const DistortedBasis& B, const CVec& m, const CVec& f) {
  if (m.size() != B.grid.n_k)
    throw ContractError("multiplier: symbol is not on the basis k-lattice");
  return inverse(B, m.cwiseProduct(forward(B, f)));
}

CVec component_project(const DistortedBasis& B, const CVec& g, char which) {
  if (g.size() != B.grid.n_k)
    throw ContractError("component_project: input is not on the k-lattice");
  switch (which) {
    case '0':
      return inverse(B, g);
    case 'S':
      return (B.grid.dk() / kSqrt2Pi) * (B.K_S * g);
    case 'R':
      return (B.grid.dk() / kSqrt2Pi) * (B.K_R * g);
    default:
      throw ContractError("component_project: which must be '0', 'S' or 'R'");
  }
}

}  // namespace nlslab
