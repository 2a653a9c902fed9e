#pragma once

#include <functional>

#include "nlslab/common.hpp"
#include "nlslab/dft.hpp"

namespace nlslab {

// Trilinear form over the k-lattice,
//   T_b(f1,f2,f3)(k) = iiint e^{it(-k^2+l^2-m^2+n^2)} f1(l) conj(f2(m)) f3(n)
//                        b(k + e1 l + e2 m + e3 n) dl dm dn,
// with b either a delta at 0, a principal-value kernel zhat(y)/(iy), or a
// smooth sampled symbol. All frequency sums land on the integer lattice
// y = j*dk because the k-lattice is half-shifted symmetric.
enum class BKind { delta, pv, smooth };

struct TrilinearSpec {
  Grid grid;
  int eps[3] = {+1, +1, +1};
  BKind b_kind = BKind::smooth;
  double t = 0.0;
  // Samples on y = (idx - 2 n_k) * dk, idx = 0..4 n_k. For smooth: b itself;
  // for pv: the numerator zhat (the 1/(iy) factor and the symmetric,
  // zero-node-excluded truncation are applied internally); unused for delta.
  CVec b_samples;
};

TrilinearSpec make_trilinear_spec(const Grid& grid, int e1, int e2, int e3,
                                  double t, BKind kind,
                                  const std::function<cplx(double)>& b);

// Evaluate T_b on the lattice (O(n_k^2) via convolution of signed arrays).
CVec trilinear_apply(const TrilinearSpec& spec, const CVec& f1, const CVec& f2,
                     const CVec& f3);

// Even/odd split of the cutoff derivative: d_x phi_+ = zeta^o + zeta with
// zeta even of unit integral and zeta^o odd; varpi = int_{-inf}^x zeta^o.
// Derived from the frozen cutoff (phi_+ = chi_+^4) by 4th-order centered
// differences, so the delta / p.v. / smooth assembly reproduces the discrete
// phi_+ to O(dx^4) + cumulative-trapezoid error.
struct CutoffSplit {
  Vec zeta;   // on xs
  Vec varpi;  // on xs
};
CutoffSplit cutoff_split(const Grid& grid);

// The full measure action, computed the cheap way through the transforms:
// u_j = inverse(e^{itk^2} g_j); returns e^{-itk^2} forward(u1 conj(u2) u3).
CVec trilinear_direct(const DistortedBasis& B, const CVec& g1, const CVec& g2,
                      const CVec& g3, double t);

// Singular action N_side: sum over sign tuples of a-coefficient products
// against the three-part transform of phi_side (delta collapse + symmetric
// p.v. + smooth varpi-hat). side is '+' or '-'.
CVec singular_action(const DistortedBasis& B, const CVec& g1, const CVec& g2,
                     const CVec& g3, double t, char side);

// Oracle route for the same object: physical-space pairing with weight
// phi_side = chi_side^4 and plane-wave kernels a^+ e^{ikx} + a^- e^{-ikx}.
CVec singular_action_physical(const DistortedBasis& B, const CVec& g1,
                              const CVec& g2, const CVec& g3, double t,
                              char side);

// Definitional complement: trilinear_direct - singular_action(+) -
// singular_action(-).
CVec regular_action(const DistortedBasis& B, const CVec& g1, const CVec& g2,
                    const CVec& g3, double t);

// Independent assembly of the regular action for closure certification:
//   independent = [sum of the 15 kernel quadruples with >= 1 regular slot]
//               + [all-singular pairing - both phi_side pairings].
// closure_rel = max|complement - independent| / max|trilinear_direct|.
struct RegularReport {
  CVec complement;
  CVec independent;
  double closure_rel = 0.0;
};
RegularReport regular_action_report(const DistortedBasis& B, const CVec& g1,
                                    const CVec& g2, const CVec& g3, double t);

// Relative sup-norm residual of the commutation identity
//   d_k T_b = -e1 T_b(f1', f2, f3) + e2 T_b(f1, f2', f3)
//             - e3 T_b(f1, f2, f3') - 2it T_{yb}(f1, f2, f3),
// with d_k and the slot derivatives by centered differences.
double commutator_residual(const TrilinearSpec& spec, const CVec& f1,
                           const CVec& f2, const CVec& f3);

// Relative L2 mismatch of the product identity
//   flat_inv[e^{itk^2} T_b](x)
//     = (2 pi)^{3/2} u1(-e1 x) conj(u2(e2 x)) u3(-e3 x) flat_inv[b](x),
// where u_j = e^{-it d_xx} (flat_inv f_j). (The factor and the conjugated
// slot's reflection follow from the direct substitution computation.)
double inverse_fd_map(const TrilinearSpec& spec, const CVec& f1,
                      const CVec& f2, const CVec& f3);

}  // namespace nlslab
