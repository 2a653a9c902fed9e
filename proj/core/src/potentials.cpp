#include "nlslab/potentials.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "gl_rule.hpp"

namespace nlslab {
namespace {

constexpr double kDropTol = 1e-250;

// Machine-accurate int_a^b <y>^s dy (64-point Gauss-Legendre).
double bracket_integral(double a, double b, double s) {
  if (b <= a) return 0.0;
  const auto& g = detail::gl_table<64>();
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double acc = 0.0;
  for (int i = 0; i < 64; ++i) {
    const double y = mid + half * g.x[i];
    acc += g.w[i] * std::pow(1.0 + y * y, 0.5 * s);
  }
  return half * acc;
}

void detect_support(Potential& V) {
  const int n = static_cast<int>(V.vs.size());
  int lo = 0, hi = n - 1;
  while (lo < n && std::abs(V.vs[lo]) < kDropTol) ++lo;
  while (hi >= 0 && std::abs(V.vs[hi]) < kDropTol) --hi;
  V.support_lo = lo;
  V.support_hi = hi;
}

void check_uniform(const Vec& xs) {
  const Eigen::Index n = xs.size();
  if (n < 2) throw ContractError("potential grid needs at least two nodes");
  const double h = xs[1] - xs[0];
  if (h <= 0.0) throw ContractError("potential grid must be increasing");
  for (Eigen::Index i = 1; i < n; ++i) {
    if (std::abs((xs[i] - xs[i - 1]) - h) > 1e-9 * std::max(1.0, std::abs(h)))
      throw ContractError("potential grid must be uniform");
  }
}

void check_sign(const Vec& vs, bool allow_signed) {
  if (allow_signed) return;
  for (Eigen::Index i = 0; i < vs.size(); ++i) {
    if (vs[i] < 0.0)
      throw ContractError(
          "negative potential sample violates the no-bound-states guard "
          "(pass allow_signed to override)");
  }
}

const double kGammaSet[] = {0.0, 1.0, 2.0, 2.51, 3.51};

}  // namespace

double Potential::l1_norm() const {
  auto it = gamma_norms.find(0.0);
  return it == gamma_norms.end() ? 0.0 : it->second;
}

Potential make_barrier(double height, double half_width, const Grid& grid) {
  if (height < 0.0)
    throw ContractError("barrier height must be >= 0 (no-bound-states guard)");
  if (half_width <= 0.0) throw ContractError("barrier half-width must be > 0");
  if (half_width >= grid.x_half_width)
    throw ContractError("barrier half-width must be inside the grid box");
  Potential V;
  V.xs = grid.xs();
  V.vs = Vec::Zero(grid.n_x);
  V.kind = PotentialKind::barrier;
  V.barrier_height = height;
  V.barrier_half_width = half_width;
  for (int i = 0; i < grid.n_x; ++i)
    if (std::abs(V.xs[i]) <= half_width) V.vs[i] = height;
  detect_support(V);
  for (double g : kGammaSet)
    V.gamma_norms[g] =
        height * bracket_integral(-half_width, half_width, g);
  return V;
}

Potential make_sampled(const Vec& xs, const Vec& vs, bool allow_signed) {
  if (xs.size() != vs.size())
    throw ContractError("potential sample arrays must have equal length");
  check_uniform(xs);
  check_sign(vs, allow_signed);
  Potential V;
  V.xs = xs;
  V.vs = vs;
  V.kind = PotentialKind::sampled;
  detect_support(V);
  for (double g : kGammaSet) weighted_l1_norm(V, g);
  return V;
}

Potential make_zero(const Grid& grid) {
  Potential V;
  V.xs = grid.xs();
  V.vs = Vec::Zero(grid.n_x);
  V.kind = PotentialKind::zero;
  detect_support(V);
  for (double g : kGammaSet) V.gamma_norms[g] = 0.0;
  return V;
}

Potential make_gaussian(double amplitude, double sigma, const Grid& grid,
                        double cutoff) {
  if (amplitude < 0.0)
    throw ContractError("gaussian amplitude must be >= 0 (guard)");
  Vec xs = grid.xs();
  Vec vs(grid.n_x);
  for (int i = 0; i < grid.n_x; ++i) {
    const double x = xs[i];
    vs[i] = (cutoff > 0.0 && std::abs(x) > cutoff)
                ? 0.0
                : amplitude * std::exp(-x * x / (2.0 * sigma * sigma));
  }
  return make_sampled(xs, vs);
}

double weighted_l1_norm(Potential& V, double gamma) {
  if (gamma < 0.0) throw ContractError("weighted_l1_norm needs gamma >= 0");
  auto it = V.gamma_norms.find(gamma);
  if (it != V.gamma_norms.end()) return it->second;
  double val = 0.0;
  if (V.kind == PotentialKind::barrier) {
    val = V.barrier_height *
          bracket_integral(-V.barrier_half_width, V.barrier_half_width, gamma);
  } else if (!V.is_zero()) {
    Vec f(V.xs.size());
    for (Eigen::Index i = 0; i < V.xs.size(); ++i)
      f[i] = std::pow(1.0 + V.xs[i] * V.xs[i], 0.5 * gamma) * std::abs(V.vs[i]);
    val = trapz(f, V.xs[1] - V.xs[0]);
  }
  V.gamma_norms[gamma] = val;
  return val;
}

TailWeight tail_weight(const Potential& V, double s, char direction) {
  if (s < 0.0) throw ContractError("tail_weight needs s >= 0");
  if (direction != '+' && direction != '-')
    throw ContractError("tail_weight direction must be '+' or '-'");
  const Eigen::Index n = V.xs.size();
  TailWeight W;
  W.s = s;
  W.direction = direction;
  W.values = Vec::Zero(n);
  if (V.kind == PotentialKind::barrier) {
    // Exact tail of the analytic barrier, piecewise in x.
    const double L = V.barrier_half_width, K = V.barrier_height;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double x = V.xs[i];
      if (direction == '+') {
        const double a = std::min(std::max(x, -L), L);
        W.values[i] = K * bracket_integral(a, L, s);
      } else {
        const double b = std::min(std::max(x, -L), L);
        W.values[i] = K * bracket_integral(-L, b, s);
      }
    }
    return W;
  }
  if (V.is_zero()) return W;
  const double dx = V.xs[1] - V.xs[0];
  Vec f(n);
  for (Eigen::Index i = 0; i < n; ++i)
    f[i] = std::pow(1.0 + V.xs[i] * V.xs[i], 0.5 * s) * std::abs(V.vs[i]);
  if (direction == '+') {
    // W(x_i) = trapezoid of f over [x_i, x_max], accumulated right to left.
    for (Eigen::Index i = n - 2; i >= 0; --i)
      W.values[i] = W.values[i + 1] + 0.5 * dx * (f[i] + f[i + 1]);
  } else {
    for (Eigen::Index i = 1; i < n; ++i)
      W.values[i] = W.values[i - 1] + 0.5 * dx * (f[i - 1] + f[i]);
  }
  return W;
}

void save_potential_csv(const Potential& V, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open " + path + " for writing");
  out << "x,v\n";
  char line[80];
  for (Eigen::Index i = 0; i < V.xs.size(); ++i) {
    std::snprintf(line, sizeof(line), "%.17g,%.17g\n", V.xs[i], V.vs[i]);
    out << line;
  }
}

Potential load_potential_csv(const std::string& path, bool allow_signed) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  std::string header;
  std::getline(in, header);
  if (header != "x,v")
    throw ConfigError("potential CSV must start with header 'x,v'");
  std::vector<double> xs, vs;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    double x, v;
    char comma;
    if (!(ss >> x >> comma >> v) || comma != ',')
      throw ConfigError("malformed potential CSV line: " + line);
    xs.push_back(x);
    vs.push_back(v);
  }
  Vec ex = Eigen::Map<Vec>(xs.data(), static_cast<Eigen::Index>(xs.size()));
  Vec ev = Eigen::Map<Vec>(vs.data(), static_cast<Eigen::Index>(vs.size()));
  return make_sampled(ex, ev, allow_signed);
}

}  // namespace nlslab
