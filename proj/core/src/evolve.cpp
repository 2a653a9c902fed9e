#include "nlslab/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <set>

#include "nlslab/fft.hpp"

extern "C" int LAPACKE_dsyevd(int matrix_layout, char jobz, char uplo, int n,
                              double* a, int lda, double* w);
#ifndef LAPACK_COL_MAJOR
#define LAPACK_COL_MAJOR 102
#endif

namespace nlslab {
namespace {

// Dense spectral core: Q diagonalizes the discrete H = C + diag(V), where C
// is the circulant realization of the flat k^2 multiplier (first column =
// Re ifft(k^2)); exactly symmetric, so e^{itH} built from it is unitary to
// roundoff.
struct EigCore {
  Mat Q;
  Vec evals;

  EigCore(const Potential& V, const Grid& grid) {
    const int n = grid.n_x;
    Fft fft(n);
    const Vec kf = grid.ks_fft();
    CVec k2(n);
    for (int i = 0; i < n; ++i) k2[i] = kf[i] * kf[i];
    const CVec c = fft.inverse(k2);
    Q.resize(n, n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) Q(i, j) = c[(i - j + n) % n].real();
    for (int i = 0; i < n; ++i) Q(i, i) += V.vs[i];
    evals.resize(n);
    const int info =
        LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, Q.data(), n, evals.data());
    if (info != 0)
      throw NumericalError("evolve: eigendecomposition of H failed");
  }

  // u <- Q diag(e^{i t evals}) Q^T u, batching real and imaginary parts.
  void apply_phase(CVec& u, const CVec& phase) const {
    const int n = static_cast<int>(u.size());
    Mat W(n, 2);
    for (int i = 0; i < n; ++i) {
      W(i, 0) = u[i].real();
      W(i, 1) = u[i].imag();
    }
    Mat Z(n, 2);
    Z.noalias() = Q.transpose() * W;
    for (int i = 0; i < n; ++i) {
      const cplx w = phase[i] * cplx(Z(i, 0), Z(i, 1));
      Z(i, 0) = w.real();
      Z(i, 1) = w.imag();
    }
    W.noalias() = Q * Z;
    for (int i = 0; i < n; ++i) u[i] = cplx(W(i, 0), W(i, 1));
  }
};

CVec phase_of(const Vec& evals, double t) {
  CVec p(evals.size());
  for (Eigen::Index i = 0; i < evals.size(); ++i)
    p[i] = std::polar(1.0, t * evals[i]);
  return p;
}

struct LinearStepper {
  virtual ~LinearStepper() = default;
  virtual void step(CVec& u) = 0;
};

struct MultiplierStepper : LinearStepper {
  Fft fft;
  CVec phase, buf;

  MultiplierStepper(const Grid& grid, double dt)
      : fft(grid.n_x), phase(grid.n_x), buf(grid.n_x) {
    const Vec kf = grid.ks_fft();
    for (int i = 0; i < grid.n_x; ++i)
      phase[i] = std::polar(1.0, dt * kf[i] * kf[i]);
  }
  void step(CVec& u) override {
    fft.forward(u, buf);
    buf.array() *= phase.array();
    fft.inverse(buf, u);
  }
};

struct EigStepper : LinearStepper {
  std::shared_ptr<const EigCore> core;
  CVec phase;

  EigStepper(std::shared_ptr<const EigCore> c, double dt)
      : core(std::move(c)), phase(phase_of(core->evals, dt)) {}
  void step(CVec& u) override { core->apply_phase(u, phase); }
};

// e^{i dt H} ~ prod_{r in roots} (dt H - conj r)/(dt H - r) with
// r in {sqrt3 - 3i, -sqrt3 - 3i} (the [2/2] Pade denominator roots of
// theta^2 + 6 i theta - 12). Each factor is unimodular on the real
// spectrum, and is applied by fixed-point iteration in the FFT frame:
//   v <- F^{-1}[(dt k^2 - r)^{-1} (F[(dt k^2 - conj r) u] + F[dtV(u - v)])].
struct PadeStepper : LinearStepper {
  Fft fft;
  Vec dtV;
  CVec inv1, mul1, inv2, mul2;
  CVec w, base, vk, scratch, v;
  int iters;

  PadeStepper(const Potential& V, const Grid& grid, double dt, int iterations)
      : fft(grid.n_x), iters(iterations) {
    const int n = grid.n_x;
    const Vec kf = grid.ks_fft();
    const cplx r1{std::sqrt(3.0), -3.0}, r2{-std::sqrt(3.0), -3.0};
    inv1.resize(n);
    mul1.resize(n);
    inv2.resize(n);
    mul2.resize(n);
    for (int i = 0; i < n; ++i) {
      const double a = dt * kf[i] * kf[i];
      inv1[i] = 1.0 / (a - r1);
      mul1[i] = a - std::conj(r1);
      inv2[i] = 1.0 / (a - r2);
      mul2[i] = a - std::conj(r2);
    }
    dtV = dt * V.vs;
    w.resize(n);
    base.resize(n);
    vk.resize(n);
    scratch.resize(n);
    v.resize(n);
    const double q = dtV.cwiseAbs().maxCoeff() / 3.0;
    if (q > 0.5)
      throw ContractError(
          "pade22 linear step: dt*||V||_inf/3 > 0.5, iteration would not "
          "contract; reduce dt");
  }

  void factor(CVec& u, const CVec& inv, const CVec& mul) {
    fft.forward(u, w);
    scratch.array() = dtV.array() * u.array();
    fft.forward(scratch, base);
    base.array() += mul.array() * w.array();
    v = u;
    for (int it = 0; it < iters; ++it) {
      scratch.array() = dtV.array() * v.array();
      fft.forward(scratch, vk);
      vk.array() = inv.array() * (base.array() - vk.array());
      fft.inverse(vk, v);
    }
    u = v;
  }

  void step(CVec& u) override {
    factor(u, inv1, mul1);
    factor(u, inv2, mul2);
  }
};

void gauge_kick(CVec& u, const Vec* a, double sigma, double tau) {
  const Eigen::Index n = u.size();
  if (a) {
    for (Eigen::Index i = 0; i < n; ++i)
      u[i] *= std::polar(1.0, sigma * tau * (*a)[i] * std::norm(u[i]));
  } else {
    for (Eigen::Index i = 0; i < n; ++i)
      u[i] *= std::polar(1.0, sigma * tau * std::norm(u[i]));
  }
}

LinearFlow pick_flow(LinearFlow req, const Potential& V, const Grid& grid) {
  if (req != LinearFlow::automatic) return req;
  if (V.is_zero()) return LinearFlow::multiplier;
  return grid.n_x <= 4096 ? LinearFlow::eig : LinearFlow::pade22;
}

std::unique_ptr<LinearStepper> make_stepper(LinearFlow flow,
                                            const Potential& V,
                                            const Grid& grid, double dt,
                                            int pade_iters) {
  switch (flow) {
    case LinearFlow::multiplier:
      if (!V.is_zero())
        throw ContractError(
            "multiplier linear flow requires V == 0; choose eig or pade22");
      return std::make_unique<MultiplierStepper>(grid, dt);
    case LinearFlow::eig:
      return std::make_unique<EigStepper>(std::make_shared<EigCore>(V, grid),
                                          dt);
    case LinearFlow::pade22:
      return std::make_unique<PadeStepper>(V, grid, dt, pade_iters);
    default:
      throw ContractError("nls_solve: unresolved linear flow");
  }
}

Trajectory march(const Potential& V, const Grid& grid,
                 const DistortedBasis* B, const CVec& u0, double T_end,
                 double dt, Sign sign, const Vec* a_coeff_nl,
                 const SolveOptions& opts) {
  if (dt <= 0.0) throw ContractError("nls_solve: dt must be positive");
  if (T_end < 0.0) throw ContractError("nls_solve: T_end must be >= 0");
  if (u0.size() != grid.n_x)
    throw ContractError("nls_solve: u0 is not on the grid");
  if (a_coeff_nl && a_coeff_nl->size() != grid.n_x)
    throw ContractError("nls_solve: a_coeff_nl is not on the grid");

  const double sigma = sign_sigma(sign);
  auto stepper = make_stepper(pick_flow(opts.flow, V, grid), V, grid, dt,
                              opts.pade_iterations);

  const long long total = std::llround(T_end / dt);
  std::set<long long> snaps{0, total};
  for (double ts : opts.snapshot_ts) {
    const long long s = std::llround(ts / dt);
    if (s >= 0 && s <= total) snaps.insert(s);
  }

  const double u0max = u0.size() ? u0.cwiseAbs().maxCoeff() : 0.0;
  const double guard = opts.blowup_factor * u0max;

  CVec u = u0;
  const bool accum = opts.accumulate_phase && B != nullptr;
  const long long stride = std::max(1, opts.phase_stride);
  Vec iphase, prev_sample;
  double t_prev = 0.0;
  auto phase_sample = [&](double t) -> Vec {
    // |f_tilde|^2 = |forward(u)|^2: the k^2 phase is unimodular.
    const CVec g = forward(*B, u);
    return (g.cwiseAbs2() / (1.0 + t)).eval();
  };
  if (accum) {
    iphase = Vec::Zero(grid.n_k);
    prev_sample = phase_sample(0.0);
  }

  Trajectory traj;
  auto record = [&](long long step) {
    SolutionState st;
    st.t = step * dt;
    st.u = u;
    st.sign = sign;
    if (a_coeff_nl) st.a_coeff_nl = *a_coeff_nl;
    if (B && opts.fill_profile) {
      const Vec ks = B->grid.ks();
      CVec g = forward(*B, u);
      for (int j = 0; j < B->grid.n_k; ++j)
        g[j] *= std::polar(1.0, -st.t * ks[j] * ks[j]);
      st.f_tilde = std::move(g);
    }
    if (accum) st.w_phase = iphase;
    traj.push_back(std::move(st));
  };

  record(0);
  for (long long s = 1; s <= total; ++s) {
    gauge_kick(u, a_coeff_nl, sigma, 0.5 * dt);
    stepper->step(u);
    gauge_kick(u, a_coeff_nl, sigma, 0.5 * dt);
    if (u0max > 0.0 && u.cwiseAbs().maxCoeff() > guard) {
      char buf[128];
      std::snprintf(buf, sizeof(buf),
                    "nls_solve: sup|u| exceeded %.1f x initial at t = %.6g",
                    opts.blowup_factor, s * dt);
      throw NumericalError(buf);
    }
    const bool is_snap = snaps.count(s) > 0;
    if (accum && (s % stride == 0 || is_snap)) {
      const double t = s * dt;
      Vec sample = phase_sample(t);
      iphase += 0.5 * (t - t_prev) * (prev_sample + sample);
      prev_sample = std::move(sample);
      t_prev = t;
    }
    if (is_snap) record(s);
  }
  return traj;
}

}  // namespace

CVec linear_evolve(const DistortedBasis& B, const CVec& f0, double t) {
  const Vec ks = B.grid.ks();
  CVec g = forward(B, f0);
  for (int j = 0; j < B.grid.n_k; ++j)
    g[j] *= std::polar(1.0, t * ks[j] * ks[j]);
  return inverse(B, g);
}

struct LinearPropagator::Impl {
  std::unique_ptr<EigCore> core;  // null when V == 0
  std::unique_ptr<Fft> fft;
  Vec k2;
};

LinearPropagator::LinearPropagator(const Potential& V, const Grid& grid)
    : impl_(std::make_unique<Impl>()) {
  if (V.is_zero()) {
    impl_->fft = std::make_unique<Fft>(grid.n_x);
    const Vec kf = grid.ks_fft();
    impl_->k2 = kf.cwiseProduct(kf);
  } else {
    impl_->core = std::make_unique<EigCore>(V, grid);
  }
}

LinearPropagator::~LinearPropagator() = default;
LinearPropagator::LinearPropagator(LinearPropagator&&) noexcept = default;
LinearPropagator& LinearPropagator::operator=(LinearPropagator&&) noexcept =
    default;

CVec LinearPropagator::apply(const CVec& h, double t) const {
  CVec u = h;
  if (impl_->core) {
    impl_->core->apply_phase(u, phase_of(impl_->core->evals, t));
  } else {
    CVec w = impl_->fft->forward(u);
    for (Eigen::Index i = 0; i < w.size(); ++i)
      w[i] *= std::polar(1.0, t * impl_->k2[i]);
    impl_->fft->inverse(w, u);
  }
  return u;
}

Trajectory nls_solve(const DistortedBasis& B, const CVec& u0, double T_end,
                     double dt, Sign sign, const Vec* a_coeff_nl,
                     const SolveOptions& opts) {
  return march(B.potential, B.grid, &B, u0, T_end, dt, sign, a_coeff_nl, opts);
}

Trajectory nls_solve(const Potential& V, const Grid& grid, const CVec& u0,
                     double T_end, double dt, Sign sign, const Vec* a_coeff_nl,
                     const SolveOptions& opts) {
  return march(V, grid, nullptr, u0, T_end, dt, sign, a_coeff_nl, opts);
}

Invariants invariants_MH(const SolutionState& state, const Potential& V) {
  const CVec& u = state.u;
  const int n = static_cast<int>(u.size());
  Invariants inv;
  if (n < 2) return inv;
  if (static_cast<int>(V.xs.size()) != n)
    throw ContractError("invariants_MH: potential grid mismatch");
  const double dx = V.xs[1] - V.xs[0];
  const double sigma = sign_sigma(state.sign);

  Fft fft(n);
  CVec uh = fft.forward(u);
  const double base = 2.0 * kPi / (n * dx);
  for (int i = 0; i < n; ++i) {
    const int m = (i <= n / 2 - 1) ? i : i - n;
    uh[i] *= kI * (base * m);
  }
  const CVec ux = fft.inverse(uh);

  Vec mass(n), ham(n);
  for (int i = 0; i < n; ++i) {
    const double a2 = std::norm(u[i]);
    mass[i] = a2;
    ham[i] = std::norm(ux[i]) + V.vs[i] * a2 + 0.5 * sigma * a2 * a2;
  }
  inv.M = trapz(mass, dx);
  inv.H = trapz(ham, dx);

  if (inv.M > 0.0) {
    const int edge = std::max(1, n / 20);
    double mb = 0.0;
    for (int i = 0; i < edge; ++i) mb += (mass[i] + mass[n - 1 - i]) * dx;
    if (mb / inv.M > 1e-8)
      std::fprintf(stderr,
                   "[nlslab] warning: %.2e of the mass sits in the outer 5%% "
                   "of the box; spectral derivative may be contaminated\n",
                   mb / inv.M);
  }
  return inv;
}

Profile extract_profile(const DistortedBasis& B, const Trajectory& traj) {
  Profile P;
  const int nt = static_cast<int>(traj.size());
  P.ts.resize(nt);
  P.f_tilde_snapshots.resize(nt, B.grid.n_k);
  const Vec ks = B.grid.ks();
  bool all_phase = nt > 0;
  for (int r = 0; r < nt; ++r) {
    P.ts[r] = traj[r].t;
    CVec g = forward(B, traj[r].u);
    for (int j = 0; j < B.grid.n_k; ++j)
      g[j] *= std::polar(1.0, -traj[r].t * ks[j] * ks[j]);
    P.f_tilde_snapshots.row(r) = g.transpose();
    if (traj[r].w_phase.size() != B.grid.n_k) all_phase = false;
  }
  if (nt > 0) P.sigma = sign_sigma(traj[0].sign);
  if (all_phase) {
    P.has_phase = true;
    P.phase_integral.resize(nt, B.grid.n_k);
    for (int r = 0; r < nt; ++r)
      P.phase_integral.row(r) = traj[r].w_phase.transpose();
  }
  return P;
}

Profile extract_profile_banded(const Potential& V, const Grid& banded,
                               const Trajectory& traj) {
  const int nt = static_cast<int>(traj.size());
  const int nx = banded.n_x, nk = banded.n_k;
  for (const auto& st : traj) {
    if (st.u.size() != nx) {
      throw ContractError(
          "extract_profile_banded: trajectory is not on the banded x-grid");
    }
  }
  Profile P;
  P.ts.resize(nt);
  for (int r = 0; r < nt; ++r) P.ts[r] = traj[r].t;
  if (nt > 0) P.sigma = sign_sigma(traj[0].sign);
  P.f_tilde_snapshots.resize(nt, nk);

  const Vec xs = banded.xs();
  const Vec ks = banded.ks();
  const double dx = banded.dx();
  CVec col(nx);
  for (int j = 0; j < nk; ++j) {
    const double k = ks[j];
    // K(x,k) = T(|k|) m_sgn(x,|k|) e^{ikx} / sqrt(2 pi), T = 1/A.
    const JostColumn jc = (k >= 0.0)
                              ? solve_jost_column(V, banded, k, '+')
                              : solve_jost_column(V, banded, -k, '-');
    const cplx T = 1.0 / jc.A;
    for (int i = 0; i < nx; ++i) {
      col[i] = T * jc.m[i] * std::exp(kI * (k * xs[i])) / kSqrt2Pi;
    }
    for (int r = 0; r < nt; ++r) {
      P.f_tilde_snapshots(r, j) =
          std::polar(1.0, -traj[r].t * k * k) * dx * col.dot(traj[r].u);
    }
  }
  return P;
}

CVec gaussian_data(const Grid& grid, double eta) {
  const Vec xs = grid.xs();
  const double c = eta / std::sqrt(2.25 * kSqrt2Pi);
  CVec u(grid.n_x);
  for (int i = 0; i < grid.n_x; ++i)
    u[i] = c * std::exp(-0.25 * xs[i] * xs[i]);
  return u;
}

CVec odd_gaussian_data(const Grid& grid, double eta) {
  const Vec xs = grid.xs();
  const double c = eta / std::sqrt(4.75 * kSqrt2Pi);
  CVec u(grid.n_x);
  for (int i = 0; i < grid.n_x; ++i)
    u[i] = c * xs[i] * std::exp(-0.25 * xs[i] * xs[i]);
  return u;
}

}  // namespace nlslab
