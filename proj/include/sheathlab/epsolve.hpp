#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <vector>

#include "sheathlab/core.hpp"
#include "sheathlab/errors.hpp"
#include "sheathlab/numerics.hpp"

namespace sheathlab {

enum class FarFieldBC { QuasineutralDirichlet, ReferenceState };
enum class Reconstruction { FirstOrder, MusclMinmod };

struct SolverConfig {
  double cfl = 0.4;
  double newton_tol = 1e-11;
  int newton_max_iter = 25;
  FarFieldBC far_field_bc = FarFieldBC::QuasineutralDirichlet;
  Reconstruction reconstruction = Reconstruction::MusclMinmod;
  double boundary_margin = 1e-3;  // sonic margin at the wall trace
  int observe_every = 0;          // 0: only the final state reaches observers

  void validate() const {
    if (!(cfl > 0.0 && cfl <= 0.5)) throw std::invalid_argument("SolverConfig: cfl outside (0, 0.5]");
    if (!(newton_tol > 0.0 && newton_tol <= 1e-10))
      throw std::invalid_argument("SolverConfig: newton_tol must be <= 1e-10");
    if (newton_max_iter < 1) throw std::invalid_argument("SolverConfig: newton_max_iter < 1");
  }
};

struct PoissonStats {
  int iterations = 0;
  double residual = 0.0;
};

/// Newton solve of eps^2 D2 phi + exp(-phi) = n with phi(0) = phi_b at the
/// wall face and the configured far-face value. Dirichlet faces enter through
/// mirrored ghost centers (2nd order); the Jacobian eps^2 D2 - diag(e^-phi)
/// is tridiagonal and negative definite, so each linear solve is well posed.
inline std::vector<double> newton_poisson(const std::vector<double>& n, double phi_b, double eps,
                                          const Grid1D& grid, const SolverConfig& cfg,
                                          double n_ref_far = 1.0,
                                          const std::vector<double>* warm_start = nullptr,
                                          PoissonStats* stats = nullptr) {
  const std::size_t m = grid.size();
  if (n.size() != m) throw std::invalid_argument("newton_poisson: field size mismatch");
  for (double v : n)
    if (!(v > 0.0)) throw NonPositiveDensity("newton_poisson: non-positive density");

  const double L = grid.length();
  const double phi_far = (cfg.far_field_bc == FarFieldBC::QuasineutralDirichlet)
                             ? -std::log(n.back())
                             : -std::log(n_ref_far);

  std::vector<double> phi(m);
  if (warm_start && warm_start->size() == m) {
    phi = *warm_start;
  } else {
    for (std::size_t i = 0; i < m; ++i) phi[i] = -std::log(n[i]);
    phi.front() = 0.5 * (phi.front() + phi_b);
  }

  const std::vector<double>& xc = grid.cell_centers;
  const double e2 = sq(eps);
  // Center-to-center spacings, with mirrored ghost centers at the two faces.
  std::vector<double> hm(m), hp(m);
  for (std::size_t i = 0; i < m; ++i) {
    hm[i] = (i == 0) ? 2.0 * xc[0] : xc[i] - xc[i - 1];
    hp[i] = (i + 1 == m) ? 2.0 * (L - xc[m - 1]) : xc[i + 1] - xc[i];
  }

  std::vector<double> res(m), sub(m), diag(m), sup(m);
  auto assemble_residual = [&](const std::vector<double>& p) {
    double rmax = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double pl = (i == 0) ? 2.0 * phi_b - p[0] : p[i - 1];
      const double pr = (i + 1 == m) ? 2.0 * phi_far - p[m - 1] : p[i + 1];
      const double lap = 2.0 / (hm[i] + hp[i]) * ((pr - p[i]) / hp[i] - (p[i] - pl) / hm[i]);
      res[i] = e2 * lap + std::exp(-p[i]) - n[i];
      rmax = std::max(rmax, std::abs(res[i]));
    }
    return rmax;
  };

  int iter = 0;
  double rmax = assemble_residual(phi);
  while (rmax >= cfg.newton_tol) {
    if (++iter > cfg.newton_max_iter)
      throw NewtonDivergence("newton_poisson: no convergence within max_iter");
    for (std::size_t i = 0; i < m; ++i) {
      const double w = 2.0 / (hm[i] + hp[i]);
      double dl = (i == 0) ? 0.0 : w / hm[i];
      double dr = (i + 1 == m) ? 0.0 : w / hp[i];
      double dc = -w / hp[i] - w / hm[i];
      if (i == 0) dc -= w / hm[i];          // ghost depends on phi_0
      if (i + 1 == m) dc -= w / hp[i];      // ghost depends on phi_{m-1}
      sub[i] = e2 * dl;
      sup[i] = e2 * dr;
      diag[i] = e2 * dc - std::exp(-phi[i]);
    }
    std::vector<double> neg_res(m);
    for (std::size_t i = 0; i < m; ++i) neg_res[i] = -res[i];
    const std::vector<double> delta = solve_tridiagonal(sub, diag, sup, neg_res);
    for (std::size_t i = 0; i < m; ++i) phi[i] += delta[i];
    rmax = assemble_residual(phi);
  }
  if (stats) {
    stats->iterations = iter;
    stats->residual = rmax;
  }
  return phi;
}

namespace detail {

inline double minmod(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return (std::abs(a) < std::abs(b)) ? a : b;
}

struct Conserved {
  std::vector<double> n, m1, m2, m3;
  explicit Conserved(std::size_t m) : n(m), m1(m), m2(m), m3(m) {}
};

/// One conservative right-hand side evaluation: MUSCL/first-order
/// reconstruction, Rusanov flux, zero-gradient ghost extrapolation at both
/// ends, pressure coefficient P (p = P n, sound speed sqrt(P)).
/// phi may be null (limit system: no electric source). wall_left, when given,
/// replaces the reconstructed left state of the wall face with an externally
/// prescribed primitive ghost state (n, u1, u2, u3).
inline void hyperbolic_rhs(const Grid1D& grid, const PlasmaState& s, double P,
                           const std::vector<double>* phi, double phi_b, double phi_far,
                           const SolverConfig& cfg, Conserved& dudt,
                           const std::array<double, 4>* wall_left = nullptr) {
  const std::size_t m = grid.size();
  const std::vector<double>& xc = grid.cell_centers;
  const std::vector<double>& w = grid.cell_widths;
  const double c = std::sqrt(P);

  // Ghost centers mirror across the faces; ghost values extrapolate linearly
  // from the two nearest interior cells (a copy ghost would zero the MUSCL
  // slope in the wall cell and drop the smooth outflow to first order).
  auto gx = [&](long i) -> double {
    if (i < 0) return -xc[std::min<std::size_t>(-i - 1, m - 1)];
    if (i >= static_cast<long>(m)) {
      const std::size_t k = std::min<std::size_t>(i - m, m - 1);
      return 2.0 * grid.length() - xc[m - 1 - k];
    }
    return xc[i];
  };
  auto gv = [&](const std::vector<double>& q, long i) -> double {
    if (i < 0) {
      if (m < 2) return q.front();
      const double s = (q[1] - q[0]) / (xc[1] - xc[0]);
      return q[0] + s * (gx(i) - xc[0]);
    }
    if (i >= static_cast<long>(m)) {
      if (m < 2) return q.back();
      const double s = (q[m - 1] - q[m - 2]) / (xc[m - 1] - xc[m - 2]);
      return q[m - 1] + s * (gx(i) - xc[m - 1]);
    }
    return q[i];
  };

  const bool muscl = cfg.reconstruction == Reconstruction::MusclMinmod;
  auto slope = [&](const std::vector<double>& q, long i) -> double {
    if (!muscl) return 0.0;
    const double dl = (gv(q, i) - gv(q, i - 1)) / (gx(i) - gx(i - 1));
    const double dr = (gv(q, i + 1) - gv(q, i)) / (gx(i + 1) - gx(i));
    return minmod(dl, dr);
  };

  // Face positions: face f sits between cells f-1 and f, f = 0..m.
  auto face_x = [&](std::size_t f) -> double {
    if (f == 0) return 0.0;
    if (f == m) return grid.length();
    return xc[f - 1] + 0.5 * w[f - 1];
  };

  std::vector<std::array<double, 4>> flux(m + 1);
  for (std::size_t f = 0; f <= m; ++f) {
    const long il = static_cast<long>(f) - 1, ir = static_cast<long>(f);
    const double xf = face_x(f);
    auto rec = [&](const std::vector<double>& q, long i) {
      return gv(q, i) + slope(q, i) * (xf - gx(i));
    };
    const bool override_left = (f == 0 && wall_left != nullptr);
    const double nl = override_left ? (*wall_left)[0] : std::max(rec(s.n, il), 1e-14);
    const double nr = std::max(rec(s.n, ir), 1e-14);
    const double u1l = override_left ? (*wall_left)[1] : rec(s.u1, il);
    const double u1r = rec(s.u1, ir);
    const double u2l = override_left ? (*wall_left)[2] : rec(s.u2, il);
    const double u2r = rec(s.u2, ir);
    const double u3l = override_left ? (*wall_left)[3] : rec(s.u3, il);
    const double u3r = rec(s.u3, ir);
    const double a = std::max(std::abs(u3l), std::abs(u3r)) + c;
    const std::array<double, 4> UL = {nl, nl * u1l, nl * u2l, nl * u3l};
    const std::array<double, 4> UR = {nr, nr * u1r, nr * u2r, nr * u3r};
    const std::array<double, 4> FL = {nl * u3l, nl * u1l * u3l, nl * u2l * u3l,
                                      nl * u3l * u3l + P * nl};
    const std::array<double, 4> FR = {nr * u3r, nr * u1r * u3r, nr * u2r * u3r,
                                      nr * u3r * u3r + P * nr};
    for (int k = 0; k < 4; ++k) flux[f][k] = 0.5 * (FL[k] + FR[k]) - 0.5 * a * (UR[k] - UL[k]);
  }

  for (std::size_t i = 0; i < m; ++i) {
    dudt.n[i] = -(flux[i + 1][0] - flux[i][0]) / w[i];
    dudt.m1[i] = -(flux[i + 1][1] - flux[i][1]) / w[i];
    dudt.m2[i] = -(flux[i + 1][2] - flux[i][2]) / w[i];
    dudt.m3[i] = -(flux[i + 1][3] - flux[i][3]) / w[i];
  }

  if (phi) {
    // Electric source n * d3 phi, centered; Dirichlet face values supply the
    // mirrored ghosts.
    const std::vector<double>& p = *phi;
    for (std::size_t i = 0; i < m; ++i) {
      const double pl = (i == 0) ? 2.0 * phi_b - p[0] : p[i - 1];
      const double pr = (i + 1 == m) ? 2.0 * phi_far - p[m - 1] : p[i + 1];
      const double xl = (i == 0) ? -xc[0] : xc[i - 1];
      const double xr = (i + 1 == m) ? 2.0 * grid.length() - xc[m - 1] : xc[i + 1];
      dudt.m3[i] += s.n[i] * (pr - pl) / (xr - xl);
    }
  }
}

inline PlasmaState conserved_to_state(const Grid1D& grid, const Conserved& U, double time) {
  const std::size_t m = grid.size();
  PlasmaState s;
  s.n.resize(m);
  s.u1.resize(m);
  s.u2.resize(m);
  s.u3.resize(m);
  s.phi.assign(m, 0.0);
  s.time = time;
  for (std::size_t i = 0; i < m; ++i) {
    if (!(U.n[i] > 0.0)) throw NonPositiveDensity("step: density lost positivity");
    s.n[i] = U.n[i];
    s.u1[i] = U.m1[i] / U.n[i];
    s.u2[i] = U.m2[i] / U.n[i];
    s.u3[i] = U.m3[i] / U.n[i];
  }
  return s;
}

inline Conserved state_to_conserved(const PlasmaState& s) {
  const std::size_t m = s.n.size();
  Conserved U(m);
  for (std::size_t i = 0; i < m; ++i) {
    U.n[i] = s.n[i];
    U.m1[i] = s.n[i] * s.u1[i];
    U.m2[i] = s.n[i] * s.u2[i];
    U.m3[i] = s.n[i] * s.u3[i];
  }
  return U;
}

inline double cfl_dt(const Grid1D& grid, const PlasmaState& s, double Ti, double cfl) {
  double umax = 0.0;
  for (double v : s.u3) umax = std::max(umax, std::abs(v));
  double wmin = grid.cell_widths[0];
  for (double v : grid.cell_widths) wmin = std::min(wmin, v);
  return cfl * wmin / (umax + std::sqrt(Ti + 1.0));
}

}  // namespace detail

/// One SSP-RK2 step of the eps > 0 Euler-Poisson system. Supersonic outflow
/// at the wall (ghost extrapolation, no boundary condition); the potential is
/// recomputed by newton_poisson after each stage and feeds the source.
inline PlasmaState ep_step(const Grid1D& grid, const PlasmaState& state, const Parameters& params,
                           const SolverConfig& cfg, PoissonStats* stats = nullptr) {
  const double Ti = params.ion_temperature;
  const double ci = std::sqrt(Ti);
  if (state.u3.front() + ci > -cfg.boundary_margin)
    throw BohmLost("ep_step: wall trace entered the sonic margin");

  const double dt = detail::cfl_dt(grid, state, Ti, cfg.cfl);
  const std::size_t m = grid.size();
  const double phi_b = params.phi_b();

  auto far_phi = [&](const std::vector<double>& n) {
    return (cfg.far_field_bc == FarFieldBC::QuasineutralDirichlet) ? -std::log(n.back())
                                                                   : -std::log(params.n_ref);
  };

  detail::Conserved U0 = detail::state_to_conserved(state);
  detail::Conserved k(m);

  // Stage 1.
  detail::hyperbolic_rhs(grid, state, Ti, &state.phi, phi_b, far_phi(state.n), cfg, k);
  detail::Conserved U1(m);
  for (std::size_t i = 0; i < m; ++i) {
    U1.n[i] = U0.n[i] + dt * k.n[i];
    U1.m1[i] = U0.m1[i] + dt * k.m1[i];
    U1.m2[i] = U0.m2[i] + dt * k.m2[i];
    U1.m3[i] = U0.m3[i] + dt * k.m3[i];
  }
  PlasmaState s1 = detail::conserved_to_state(grid, U1, state.time + dt);
  PoissonStats st1;
  s1.phi = newton_poisson(s1.n, phi_b, params.epsilon, grid, cfg, params.n_ref, &state.phi, &st1);

  // Stage 2.
  detail::hyperbolic_rhs(grid, s1, Ti, &s1.phi, phi_b, far_phi(s1.n), cfg, k);
  detail::Conserved U2(m);
  for (std::size_t i = 0; i < m; ++i) {
    U2.n[i] = 0.5 * (U0.n[i] + U1.n[i] + dt * k.n[i]);
    U2.m1[i] = 0.5 * (U0.m1[i] + U1.m1[i] + dt * k.m1[i]);
    U2.m2[i] = 0.5 * (U0.m2[i] + U1.m2[i] + dt * k.m2[i]);
    U2.m3[i] = 0.5 * (U0.m3[i] + U1.m3[i] + dt * k.m3[i]);
  }
  PlasmaState out = detail::conserved_to_state(grid, U2, state.time + dt);
  PoissonStats st2;
  out.phi = newton_poisson(out.n, phi_b, params.epsilon, grid, cfg, params.n_ref, &s1.phi, &st2);
  if (stats) {
    stats->iterations = std::max(st1.iterations, st2.iterations);
    stats->residual = std::max(st1.residual, st2.residual);
  }
  return out;
}

/// One SSP-RK2 step of the quasineutral limit system (sound speed
/// sqrt(Ti+1), neutrality phi = -ln n). Supersonic: pure outflow.
/// Intermediate: exactly one incoming characteristic; the wall density is
/// pinned to exp(-phi_b) through a characteristic ghost state carrying the
/// outgoing Riemann invariant u - c ln n.
inline PlasmaState euler_limit_step(const Grid1D& grid, const PlasmaState& state,
                                    const Parameters& params, Regime regime,
                                    const SolverConfig& cfg) {
  const double Ti = params.ion_temperature;
  const double c = std::sqrt(Ti + 1.0);
  const double u_trace = state.u3.front();
  if (regime == Regime::Supersonic) {
    if (u_trace + c > -cfg.boundary_margin)
      throw RegimeMismatch("euler_limit_step: trace not supersonic");
  } else if (regime == Regime::Intermediate) {
    if (u_trace + c < cfg.boundary_margin || u_trace + std::sqrt(Ti) > -cfg.boundary_margin)
      throw RegimeMismatch("euler_limit_step: trace left the intermediate band");
  } else {
    throw RegimeMismatch("euler_limit_step: unsupported regime");
  }

  const double dt = detail::cfl_dt(grid, state, Ti, cfg.cfl);
  const std::size_t m = grid.size();

  auto rhs_with_bc = [&](const PlasmaState& s, detail::Conserved& k) {
    if (regime == Regime::Supersonic) {
      detail::hyperbolic_rhs(grid, s, Ti + 1.0, nullptr, 0.0, 0.0, cfg, k);
      return;
    }
    // Intermediate: pin the wall density via a characteristic ghost state,
    // extrapolating the outgoing Riemann invariant u - c ln n.
    const double n_g = std::exp(-params.phi_b());
    const double jm = s.u3.front() - c * std::log(s.n.front());
    const double u_g = jm + c * std::log(n_g);
    const std::array<double, 4> ghost = {n_g, s.u1.front(), s.u2.front(), u_g};
    detail::hyperbolic_rhs(grid, s, Ti + 1.0, nullptr, 0.0, 0.0, cfg, k, &ghost);
  };

  detail::Conserved U0 = detail::state_to_conserved(state);
  detail::Conserved k(m);
  rhs_with_bc(state, k);
  detail::Conserved U1(m);
  for (std::size_t i = 0; i < m; ++i) {
    U1.n[i] = U0.n[i] + dt * k.n[i];
    U1.m1[i] = U0.m1[i] + dt * k.m1[i];
    U1.m2[i] = U0.m2[i] + dt * k.m2[i];
    U1.m3[i] = U0.m3[i] + dt * k.m3[i];
  }
  PlasmaState s1 = detail::conserved_to_state(grid, U1, state.time + dt);
  for (std::size_t i = 0; i < m; ++i) s1.phi[i] = -std::log(s1.n[i]);
  rhs_with_bc(s1, k);
  detail::Conserved U2(m);
  for (std::size_t i = 0; i < m; ++i) {
    U2.n[i] = 0.5 * (U0.n[i] + U1.n[i] + dt * k.n[i]);
    U2.m1[i] = 0.5 * (U0.m1[i] + U1.m1[i] + dt * k.m1[i]);
    U2.m2[i] = 0.5 * (U0.m2[i] + U1.m2[i] + dt * k.m2[i]);
    U2.m3[i] = 0.5 * (U0.m3[i] + U1.m3[i] + dt * k.m3[i]);
  }
  PlasmaState out = detail::conserved_to_state(grid, U2, state.time + dt);
  for (std::size_t i = 0; i < m; ++i) out.phi[i] = -std::log(out.n[i]);
  return out;
}

using Observer = std::function<void(const PlasmaState&)>;

struct RunResult {
  PlasmaState state;
  long steps = 0;
  int max_warm_newton_iters = 0;  // over all steps (warm-started solves)
  int cold_newton_iters = 0;      // the initial potential solve, if performed
};

/// Advances the eps > 0 system to time T. The initial potential always comes
/// from one newton_poisson solve of the initial density (the data prescribes
/// only (n, u)); a caller-provided phi merely warm-starts that solve.
inline RunResult run_ep(const Grid1D& grid, PlasmaState initial, const Parameters& params,
                        const SolverConfig& cfg, double T, const Observer& observer = {}) {
  cfg.validate();
  params.validate();
  initial.validate(grid);
  RunResult rr;
  {
    bool has_phi = false;
    for (double v : initial.phi)
      if (v != 0.0) has_phi = true;
    PoissonStats st;
    initial.phi =
        newton_poisson(initial.n, params.phi_b(), params.epsilon, grid, cfg, params.n_ref,
                       has_phi ? &initial.phi : nullptr, &st);
    rr.cold_newton_iters = st.iterations;
  }
  PlasmaState s = std::move(initial);
  const double t_end = s.time + T;
  const double t_eps = 1e-12 * std::max(1.0, T);
  while (s.time < t_end - t_eps) {
    PoissonStats st;
    PlasmaState next = ep_step(grid, s, params, cfg, &st);
    if (next.time > t_end) {
      // Clip the last step: redo with a scaled CFL so the run lands on T.
      const double dt_full = next.time - s.time;
      const double frac = (t_end - s.time) / dt_full;
      SolverConfig clipped = cfg;
      clipped.cfl = cfg.cfl * frac;
      next = ep_step(grid, s, params, clipped, &st);
    }
    s = std::move(next);
    ++rr.steps;
    rr.max_warm_newton_iters = std::max(rr.max_warm_newton_iters, st.iterations);
    if (observer && cfg.observe_every > 0 && rr.steps % cfg.observe_every == 0) observer(s);
  }
  if (observer) observer(s);
  rr.state = std::move(s);
  return rr;
}

/// Advances the quasineutral limit system to time T.
inline RunResult run_limit(const Grid1D& grid, PlasmaState initial, const Parameters& params,
                           Regime regime, const SolverConfig& cfg, double T,
                           const Observer& observer = {}) {
  cfg.validate();
  params.validate();
  for (std::size_t i = 0; i < initial.n.size(); ++i) initial.phi[i] = -std::log(initial.n[i]);
  initial.validate(grid);
  RunResult rr;
  PlasmaState s = std::move(initial);
  const double t_end = s.time + T;
  const double t_eps = 1e-12 * std::max(1.0, T);
  while (s.time < t_end - t_eps) {
    PlasmaState next = euler_limit_step(grid, s, params, regime, cfg);
    if (next.time > t_end) {
      const double dt_full = next.time - s.time;
      const double frac = (t_end - s.time) / dt_full;
      SolverConfig clipped = cfg;
      clipped.cfl = cfg.cfl * frac;
      next = euler_limit_step(grid, s, params, regime, clipped);
    }
    s = std::move(next);
    ++rr.steps;
    if (observer && cfg.observe_every > 0 && rr.steps % cfg.observe_every == 0) observer(s);
  }
  if (observer) observer(s);
  rr.state = std::move(s);
  return rr;
}

}  // namespace sheathlab
