#pragma once

#include <map>
#include <optional>
#include <string>

#include "nlslab/common.hpp"
#include "nlslab/grid.hpp"

namespace nlslab {

enum class PotentialKind { zero, barrier, sampled };

// Sampled real potential plus weighted-L1 metadata and analytic tags.
//
// The V >= 0 guard encodes the standing no-bound-states assumption; signed
// potentials require the explicit allow_signed override (user-asserted).
struct Potential {
  Vec xs;
  Vec vs;
  PotentialKind kind = PotentialKind::zero;
  double barrier_height = 0.0;   // K, barrier kind only
  double barrier_half_width = 0.0;  // L, barrier kind only
  std::map<double, double> gamma_norms;

  // Index range [support_lo, support_hi] of nodes with vs != 0 (empty when
  // support_hi < support_lo). Samples with |v| < 1e-250 are treated as zero:
  // their quadrature contribution is below one ulp of any result.
  int support_lo = 0;
  int support_hi = -1;

  bool is_zero() const { return support_hi < support_lo; }
  double l1_norm() const;  // gamma = 0 weighted norm (cached)
};

// Cumulative tail integral W_pm^s(x) = int over the +/- tail of <y>^s |V(y)|.
struct TailWeight {
  double s = 0.0;
  char direction = '+';
  Vec values;
};

Potential make_barrier(double height, double half_width, const Grid& grid);
Potential make_sampled(const Vec& xs, const Vec& vs, bool allow_signed = false);
Potential make_zero(const Grid& grid);
// Gaussian samples A e^{-x^2/(2 sigma^2)}, exactly truncated to |x| <= cutoff
// when cutoff > 0.
Potential make_gaussian(double amplitude, double sigma, const Grid& grid,
                        double cutoff = 0.0);

// Trapezoid (sampled) or exact (barrier) evaluation of ||<x>^gamma V||_L1;
// the result is cached in V.gamma_norms.
double weighted_l1_norm(Potential& V, double gamma);

TailWeight tail_weight(const Potential& V, double s, char direction);

void save_potential_csv(const Potential& V, const std::string& path);
Potential load_potential_csv(const std::string& path, bool allow_signed = false);

}  // namespace nlslab
