#include "nlslab/grid.hpp"

#include <cmath>

namespace nlslab {

Vec Grid::ks_fft() const {
  Vec v(n_x);
  const double base = 2.0 * kPi / (n_x * dx());
  for (int i = 0; i < n_x; ++i) {
    const int m = (i <= n_x / 2 - 1) ? i : i - n_x;
    v[i] = base * m;
  }
  return v;
}

Grid matched_grid(double x_half_width, int n_x) {
  Grid g;
  g.x_half_width = x_half_width;
  g.n_x = n_x;
  g.n_k = n_x;
  g.k_half_width = n_x * kPi / (2.0 * x_half_width);
  return g;
}

Grid default_grid() { return matched_grid(40.0, 2048); }

Grid banded_grid(double x_half_width, int n_x, double band) {
  const double dk = kPi / x_half_width;
  const int n_half = static_cast<int>(std::floor(band / dk - 0.5)) + 1;
  Grid g;
  g.x_half_width = x_half_width;
  g.n_x = n_x;
  g.n_k = 2 * n_half;
  g.k_half_width = n_half * dk;
  return g;
}

}  // namespace nlslab
