#pragma once

#include "nlslab/common.hpp"

namespace nlslab {

// Paired uniform x- and k-grids; the discrete stage for every field.
//
// x_i = -x_half_width + i*dx, i = 0..n_x-1 (right endpoint excluded: the
// lattice is the standard periodic one, so spectral transforms line up).
// k_j = -k_half_width + (j+1/2)*dk, j = 0..n_k-1 (half-shifted symmetric
// lattice: k = 0 is never a node, conjugation symmetry k -> -k maps the
// lattice to itself).
struct Grid {
  double x_half_width = 0.0;
  int n_x = 0;
  double k_half_width = 0.0;
  int n_k = 0;

  double dx() const { return 2.0 * x_half_width / n_x; }
  double dk() const { return 2.0 * k_half_width / n_k; }

  Vec xs() const {
    Vec v(n_x);
    const double h = dx();
    for (int i = 0; i < n_x; ++i) v[i] = -x_half_width + i * h;
    return v;
  }
  Vec ks() const {
    Vec v(n_k);
    const double h = dk();
    for (int j = 0; j < n_k; ++j) v[j] = -k_half_width + (j + 0.5) * h;
    return v;
  }

  // FFT-ordered flat frequencies 2*pi*fftfreq(n_x, dx).
  Vec ks_fft() const;

  bool same_as(const Grid& o) const {
    return x_half_width == o.x_half_width && n_x == o.n_x &&
           k_half_width == o.k_half_width && n_k == o.n_k;
  }
};

// Default laboratory grid: x in [-40, 40], N = 2048, with the matched
// half-shifted k-lattice dk = pi/X spanning the full spectral range.
Grid default_grid();

// Matched grid for arbitrary box: k-lattice is exactly the half-shifted
// relabeling of the FFT lattice (dk = pi/X, n_k = n_x).
Grid matched_grid(double x_half_width, int n_x);

// Restriction of a matched grid's k-lattice to |k| <= band (used by the
// big-box profile diagnostics).
Grid banded_grid(double x_half_width, int n_x, double band);

}  // namespace nlslab
