#pragma once

#include <cmath>

namespace nlslab {
namespace detail {

// n-point Gauss-Legendre nodes/weights on [-1,1], generated by Newton
// iteration on the Legendre recurrence (deterministic, machine accurate).
inline void gl_rule(int n, double* x, double* w) {
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double t = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
    double p0 = 1.0, p1 = t, dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      p0 = 1.0;
      p1 = t;
      for (int j = 2; j <= n; ++j) {
        double p2 = ((2 * j - 1) * t * p1 - (j - 1) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-16) break;
    }
    x[i] = -t;
    x[n - 1 - i] = t;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
}

template <int N>
struct GlTable {
  double x[N];
  double w[N];
  GlTable() { gl_rule(N, x, w); }
};

template <int N>
const GlTable<N>& gl_table() {
  static const GlTable<N> g;
  return g;
}

}  // namespace detail
}  // namespace nlslab
