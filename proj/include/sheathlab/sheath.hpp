#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "sheathlab/core.hpp"
#include "sheathlab/errors.hpp"
#include "sheathlab/numerics.hpp"

namespace sheathlab {

/// Frozen boundary traces entering the layer hierarchy. (t, y) are parameters
/// of the construction, so one context describes one trace state.
struct LayerContext {
  double n0_trace;            // Gamma n^0 > 0
  double u3_trace;            // Gamma u^0_3, supersonic into the wall
  double Ti;                  // ion temperature
  double phi0_boundary_value; // Phi^0(0) = phi_c + ln(n^0(0)/n_ref)

  LayerContext(double n0, double u3, double ti, double phi0_bv)
      : n0_trace(n0), u3_trace(u3), Ti(ti), phi0_boundary_value(phi0_bv) {
    if (!(n0_trace > 0.0)) throw std::invalid_argument("LayerContext: n0_trace <= 0");
    if (!(Ti > 0.0)) throw std::invalid_argument("LayerContext: Ti <= 0");
    if (!(u3_trace < 0.0) || !(sq(u3_trace) > Ti + 1.0))
      throw BohmViolation("LayerContext: trace velocity violates the Bohm condition");
  }

  /// Right end of the monotonicity interval of F; N=1 lies inside it.
  double N_F() const { return std::sqrt(sq(u3_trace) / Ti); }
  double Phi_F() const;  // F(N_F) < 0, lower edge of the invertibility range
};

/// F(N) = u^2/(2 N^2) + Ti ln(N) - u^2/2 with u the velocity trace.
inline double eval_F(const LayerContext& ctx, double N) {
  if (!(N > 0.0)) throw DomainError("eval_F: N <= 0");
  const double u2 = sq(ctx.u3_trace);
  return u2 / (2.0 * sq(N)) + ctx.Ti * std::log(N) - u2 / 2.0;
}

inline double eval_F_prime(const LayerContext& ctx, double N) {
  if (!(N > 0.0)) throw DomainError("eval_F_prime: N <= 0");
  return ctx.Ti / N - sq(ctx.u3_trace) / (N * N * N);
}

inline double LayerContext::Phi_F() const { return eval_F(*this, N_F()); }

/// Inverse of F on (Phi_F, +infinity) -> (0, N_F); strictly decreasing.
/// Bracketed bisection first (F' vanishes at N_F), then Newton polish.
inline double invert_F(const LayerContext& ctx, double Phi) {
  const double nf = ctx.N_F();
  const double phi_f = eval_F(ctx, nf);
  if (!(Phi > phi_f)) throw OutOfRange("invert_F: Phi <= Phi_F, inverse undefined");
  if (Phi == 0.0) return 1.0;  // F(1) = 0 identically

  double hi = nf;
  double lo = std::min(1.0, 0.5 * nf);
  while (eval_F(ctx, lo) < Phi) lo *= 0.5;  // F -> +inf as N -> 0+
  // Bisection to ~1e-6 in N.
  while (hi - lo > 1e-6 * nf) {
    const double mid = 0.5 * (lo + hi);
    if (eval_F(ctx, mid) > Phi)
      lo = mid;
    else
      hi = mid;
  }
  // Newton polish, safeguarded inside the bracket; residual target sits just
  // above the rounding floor of F itself.
  double N = 0.5 * (lo + hi);
  const double scale = std::max({1.0, std::abs(Phi), sq(ctx.u3_trace)});
  for (int it = 0; it < 100; ++it) {
    const double r = eval_F(ctx, N) - Phi;
    if (std::abs(r) <= 2e-16 * scale) break;
    if (r > 0.0)
      lo = N;  // F decreasing: F(N) > Phi means N below the root
    else
      hi = N;
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) {
      N = 0.5 * (lo + hi);
      break;
    }
    const double dp = eval_F_prime(ctx, N);
    double cand = (dp != 0.0) ? N - r / dp : 0.5 * (lo + hi);
    if (!(cand > lo && cand < hi)) cand = 0.5 * (lo + hi);
    N = cand;
  }
  return N;
}

/// X(Phi) = F^{-1}(Phi) - e^{-Phi}, the right-hand side of Phi'' = X(Phi).
/// The paper's layer ODE carries the trace density as a prefactor; pass
/// normalized=true for the unit-prefactor variant used by the decay-rate
/// formula.
inline double eval_X(const LayerContext& ctx, double Phi, bool normalized = false) {
  const double x = invert_F(ctx, Phi) - std::exp(-Phi);
  return normalized ? x : ctx.n0_trace * x;
}

/// Analytic X'(Phi) via (F^{-1})'(Phi) = 1/F'(F^{-1}(Phi)).
inline double eval_X_prime(const LayerContext& ctx, double Phi, bool normalized = false) {
  const double N = invert_F(ctx, Phi);
  const double xp = 1.0 / eval_F_prime(ctx, N) + std::exp(-Phi);
  return normalized ? xp : ctx.n0_trace * xp;
}

namespace detail {

/// Closed form of V = int_0^Phi X obtained by substituting Phi = F(N):
/// int F^{-1} = N*Phi - G(N) + G(1) with G an antiderivative of F.
/// Below |Phi| = 1e-4 the closed form cancels catastrophically (difference of
/// O(1) antiderivative values against an O(Phi^2) result), so a Taylor series
/// of V around 0 takes over there.
/// Used internally as the fast path; eval_V below is the quadrature contract.
inline double V_closed(const LayerContext& ctx, double Phi, bool normalized = false) {
  const double pref = normalized ? 1.0 : ctx.n0_trace;
  if (Phi == 0.0) return 0.0;
  const double u2 = sq(ctx.u3_trace);
  if (std::abs(Phi) < 1e-5) {
    // F^{-1}(Phi) = 1 + a1 Phi + a2 Phi^2 + a3 Phi^3 + ... from inverting the
    // Taylor expansion of F at N = 1.
    const double b1 = ctx.Ti - u2;
    const double b2 = 3.0 * u2 - ctx.Ti;
    const double b3 = 2.0 * ctx.Ti - 12.0 * u2;
    const double a1 = 1.0 / b1;
    const double a2 = -b2 / (2.0 * b1 * b1 * b1);
    const double a3 = b2 * b2 / (2.0 * std::pow(b1, 5)) - b3 / (6.0 * std::pow(b1, 4));
    const double g2 = a1 + 1.0;  // = gamma^2
    const double c3 = (a2 - 0.5) / 3.0;
    const double c4 = (a3 + 1.0 / 6.0) / 4.0;
    return pref * sq(Phi) * (0.5 * g2 + c3 * Phi + c4 * sq(Phi));
  }
  // G(N) - G(1) rearranged so every piece is O((N-1)^2); the naive difference
  // of antiderivative values loses all significance for small Phi.
  const double N = invert_F(ctx, Phi);
  const double d = N - 1.0;
  const double Gd = -u2 * sq(d) / (2.0 * N) + ctx.Ti * ((1.0 + d) * std::log1p(d) - d);
  return pref * (N * Phi - Gd + std::expm1(-Phi));
}

}  // namespace detail

/// V(Phi) = int_0^Phi X by adaptive quadrature (1e-12 absolute).
inline double eval_V(const LayerContext& ctx, double Phi, bool normalized = false) {
  if (Phi == 0.0) return 0.0;
  auto f = [&](double p) { return eval_X(ctx, p, normalized); };
  return adaptive_simpson(f, 0.0, Phi, 1e-12);
}

/// gamma = sqrt(V''(0)) = sqrt((Ti + 1 - u^2) / (Ti - u^2)), normalized form.
/// Marginal Bohm (u^2 = Ti + 1) gives 0.
inline double decay_rate(double Ti, double u3_trace) {
  const double u2 = sq(u3_trace);
  if (u2 < Ti + 1.0) throw BohmViolation("decay_rate: u^2 < Ti + 1");
  return std::sqrt((Ti + 1.0 - u2) / (Ti - u2));
}

/// Largest interval [lo, hi] around 0 on which the connecting orbit and the
/// first-order corrector problem are both well posed: V > 0 away from 0 and
/// X' >= alpha. Determined by a sign scan; the paper keeps delta_0 abstract.
inline std::pair<double, double> admissible_window(const LayerContext& ctx, double alpha = 1e-3) {
  const double phi_f = ctx.Phi_F();
  if (eval_X_prime(ctx, 0.0) < alpha) return {0.0, 0.0};

  const double dphi = 1e-3;
  double lo = 0.0;
  // Downward scan: stop before Phi_F where F^{-1} degenerates.
  for (double p = -dphi; p > phi_f + 16.0 * dphi; p -= dphi) {
    if (eval_X_prime(ctx, p) < alpha) break;
    if (eval_V(ctx, p) <= 0.0) break;
    lo = p;
  }
  double hi = 0.0;
  for (double p = dphi; p < 50.0; p += dphi) {
    if (eval_X_prime(ctx, p) < alpha) break;
    hi = p;
  }
  return {lo, hi};
}

/// Tabulated layer profiles in the stretched variable z = x3 / eps.
/// Beyond tail_start the potential follows the analytic exponential tail;
/// N0 and U03 remain exact functions of Phi0 there.
struct SheathProfile {
  std::vector<double> z_nodes;
  std::vector<double> Phi0;
  std::vector<double> Phi0_prime;
  std::vector<double> N0, U03;
  std::vector<double> Phi1, N1, U13;  // empty unless first order built
  double measured_decay_rate = 0.0;
  double gamma_formula = 0.0;  // Eq. decay-rate value (normalized)
  double dz = 0.0;
  std::size_t tail_start = 0;  // first node governed by the analytic tail
  double tail_rate = 0.0;      // prefactored rate sqrt(n0)*gamma

  std::optional<LayerContext> ctx;

  bool has_first_order() const { return !Phi1.empty(); }

  double eval_Phi0(double z) const {
    if (z_nodes.empty()) return 0.0;
    if (z <= z_nodes.back()) return spline_Phi0_(z);
    return Phi0.back() * std::exp(-tail_rate * (z - z_nodes.back()));
  }
  double eval_N0(double z) const {
    if (z_nodes.empty()) return 0.0;
    if (z <= z_nodes.back()) return spline_N0_(z);
    // Exact pointwise relation N0 = n0 (F^{-1}(Phi0) - 1) in the tail.
    return ctx->n0_trace * (invert_F(*ctx, eval_Phi0(z)) - 1.0);
  }
  double eval_U03(double z) const {
    if (z_nodes.empty()) return 0.0;
    if (z <= z_nodes.back()) return spline_U03_(z);
    const double n0 = ctx->n0_trace, u = ctx->u3_trace;
    return n0 * u / (n0 + eval_N0(z)) - u;
  }
  double eval_Phi1(double z) const {
    if (Phi1.empty()) return 0.0;
    if (z <= z_nodes.back()) return spline_Phi1_(z);
    return Phi1.back() * std::exp(-tail_rate * (z - z_nodes.back()));
  }
  double eval_N1(double z) const {
    if (N1.empty()) return 0.0;
    if (z <= z_nodes.back()) return spline_N1_(z);
    return N1.back() * std::exp(-tail_rate * (z - z_nodes.back()));
  }
  double eval_U13(double z) const {
    if (U13.empty()) return 0.0;
    if (z <= z_nodes.back()) return spline_U13_(z);
    return U13.back() * std::exp(-tail_rate * (z - z_nodes.back()));
  }

  /// Build the monotone cubic samplers once the arrays are final.
  void finalize_samplers() {
    spline_Phi0_ = PchipSpline(z_nodes, Phi0);
    if (!N0.empty()) spline_N0_ = PchipSpline(z_nodes, N0);
    if (!U03.empty()) spline_U03_ = PchipSpline(z_nodes, U03);
    if (!Phi1.empty()) spline_Phi1_ = PchipSpline(z_nodes, Phi1);
    if (!N1.empty()) spline_N1_ = PchipSpline(z_nodes, N1);
    if (!U13.empty()) spline_U13_ = PchipSpline(z_nodes, U13);
  }

 private:
  PchipSpline spline_Phi0_, spline_N0_, spline_U03_, spline_Phi1_, spline_N1_, spline_U13_;
};

/// Fit the tail rate of |Phi| over [zlo, zhi] (log-linear least squares).
inline double measure_decay(const std::vector<double>& z, const std::vector<double>& vals,
                            double zlo, double zhi) {
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (z[i] < zlo || z[i] > zhi) continue;
    const double a = std::abs(vals[i]);
    if (!(a > 0.0)) throw WindowTooNoisy("measure_decay: zero magnitude inside window");
    xs.push_back(z[i]);
    ys.push_back(std::log(a));
  }
  if (xs.size() < 3) throw WindowTooNoisy("measure_decay: too few samples in window");
  const LinearFit fit = fit_line(xs, ys);
  if (fit.rms_residual > 0.1) throw WindowTooNoisy("measure_decay: fit residual > 0.1");
  if (std::abs(fit.slope) * (xs.back() - xs.front()) < 1e-6)
    throw WindowTooNoisy("measure_decay: no decay signal in window");
  return -fit.slope;
}

/// Monotone connecting orbit of Phi'' = X(Phi) from Phi(0)=Phi0 to 0, via the
/// stable-manifold reduction Phi' = -sign(Phi) sqrt(2 V(Phi)). RK4 in z with
/// substeps; once |Phi| < tol the analytic exponential tail takes over (the
/// node z(Phi -> 0) diverges logarithmically, so direct integration cannot
/// reach it).
inline SheathProfile solve_phi0(const LayerContext& ctx, double z_max, double tol = 1e-9,
                                double dz = 0.01) {
  const double gamma_norm = decay_rate(ctx.Ti, ctx.u3_trace);
  const double gamma_pre = std::sqrt(ctx.n0_trace) * gamma_norm;
  if (!(z_max >= 30.0 / gamma_pre))
    throw std::invalid_argument("solve_phi0: z_max below 30/gamma");
  if (!(tol > 0.0) || !(dz > 0.0)) throw std::invalid_argument("solve_phi0: bad tol or dz");

  const double Phi0 = ctx.phi0_boundary_value;
  const auto [wlo, whi] = admissible_window(ctx);
  if (Phi0 < wlo || Phi0 > whi)
    throw InadmissibleBoundaryValue("solve_phi0: Phi0 outside the admissible window");

  const std::size_t n = static_cast<std::size_t>(std::llround(z_max / dz)) + 1;
  SheathProfile prof;
  prof.ctx = ctx;
  prof.dz = dz;
  prof.gamma_formula = gamma_norm;
  prof.tail_rate = gamma_pre;
  prof.z_nodes.resize(n);
  prof.Phi0.assign(n, 0.0);
  prof.Phi0_prime.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) prof.z_nodes[i] = i * dz;

  if (Phi0 == 0.0) {
    prof.tail_start = 0;
    prof.finalize_samplers();
    return prof;
  }

  const double s = (Phi0 > 0.0) ? 1.0 : -1.0;
  auto rhs = [&](double p) -> double {
    if (s * p <= 0.0) return 0.0;  // orbit may not cross the rest point
    const double v = detail::V_closed(ctx, p);
    if (v <= 0.0)
      throw NonPositiveV("solve_phi0: V(Phi) <= 0 between Phi0 and 0, no connecting orbit");
    return -s * std::sqrt(2.0 * v);
  };

  // Substeps keep gamma * h small so RK4 error stays far below the
  // Hamiltonian-identity tolerance.
  const int nsub = std::max(1, static_cast<int>(std::ceil(dz * gamma_pre / 0.05)));
  const double h = dz / nsub;

  double p = Phi0;
  prof.Phi0[0] = p;
  prof.Phi0_prime[0] = rhs(p);
  std::size_t handoff = n;
  for (std::size_t i = 1; i < n; ++i) {
    for (int k = 0; k < nsub; ++k) {
      const double k1 = rhs(p);
      const double k2 = rhs(p + 0.5 * h * k1);
      const double k3 = rhs(p + 0.5 * h * k2);
      const double k4 = rhs(p + h * k3);
      p += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    prof.Phi0[i] = p;
    prof.Phi0_prime[i] = rhs(p);
    if (std::abs(p) < tol) {
      handoff = i;
      break;
    }
  }
  if (handoff == n && std::abs(p) >= tol)
    throw Error("solve_phi0: profile did not reach the tail tolerance before z_max");
  prof.tail_start = handoff;
  const double ph = prof.Phi0[handoff];
  for (std::size_t i = handoff + 1; i < n; ++i) {
    const double t = std::exp(-gamma_pre * (prof.z_nodes[i] - prof.z_nodes[handoff]));
    prof.Phi0[i] = ph * t;
    prof.Phi0_prime[i] = -gamma_pre * prof.Phi0[i];
  }

  const double zlo = 5.0 / gamma_pre, zhi = 15.0 / gamma_pre;
  prof.measured_decay_rate = measure_decay(prof.z_nodes, prof.Phi0, zlo, zhi);
  prof.finalize_samplers();
  return prof;
}

/// N0 = n0 (F^{-1}(Phi0) - 1); U03 from the mass-flux identity
/// (n0 + N0)(u + U03) = n0 u, which then holds nodewise by construction.
inline SheathProfile build_layer_fields(const LayerContext& ctx, SheathProfile prof) {
  const std::size_t n = prof.z_nodes.size();
  prof.N0.resize(n);
  prof.U03.resize(n);
  const double n0 = ctx.n0_trace, u = ctx.u3_trace;
  for (std::size_t i = 0; i < n; ++i) {
    prof.N0[i] = n0 * (invert_F(ctx, prof.Phi0[i]) - 1.0);
    prof.U03[i] = n0 * u / (n0 + prof.N0[i]) - u;
  }
  prof.finalize_samplers();
  return prof;
}

/// Regular-part traces feeding the first-order layer source F6.
struct RegularTraces {
  double n1 = 0.0;      // n^1(t, 0)
  double u13 = 0.0;     // u^1_3(t, 0)
  double phi1 = 0.0;    // phi^1(t, 0)
  double d3n0 = 0.0;    // d/dx3 n^0(t, 0)
  double d3u03 = 0.0;   // d/dx3 u^0_3(t, 0)
  double d3phi0 = 0.0;  // d/dx3 phi^0(t, 0)
};

/// F2, F5, F6 of the first-order cascade, tabulated on the profile grid.
struct LayerSourceTerms {
  std::vector<double> F2, F5, F6;
};

/// Assembles the chain F1 -> F6 in the y-uniform reduction. Time derivatives
/// of the layer quantities come from profiles built at t -/+ dt (centered
/// differences); z-derivatives of the layer fields are analytic through
/// Phi0'. Tail integrals run from z_max downward.
inline LayerSourceTerms assemble_layer_sources(const LayerContext& ctx, const SheathProfile& prof,
                                               const SheathProfile& prof_minus,
                                               const SheathProfile& prof_plus, double dt,
                                               const RegularTraces& tr) {
  const std::size_t n = prof.z_nodes.size();
  if (prof_minus.z_nodes.size() != n || prof_plus.z_nodes.size() != n)
    throw std::invalid_argument("assemble_layer_sources: profile grids differ");
  if (prof.N0.empty() || prof_minus.N0.empty() || prof_plus.N0.empty())
    throw std::invalid_argument("assemble_layer_sources: layer fields not built");
  const double dz = prof.dz;
  const double n0 = ctx.n0_trace, u = ctx.u3_trace, Ti = ctx.Ti;

  std::vector<double> dN0_dt(n), dU03_dt(n);
  for (std::size_t i = 0; i < n; ++i) {
    dN0_dt[i] = (prof_plus.N0[i] - prof_minus.N0[i]) / (2.0 * dt);
    dU03_dt[i] = (prof_plus.U03[i] - prof_minus.U03[i]) / (2.0 * dt);
  }

  // Mass cascade: F1 = -dA/dz - dN0/dt with A = z d3n0 U03 + N0 z d3u03 (the
  // Taylor excess of the regular coefficients inside the layer flux).
  // Momentum: F3 = -dB/dz - Ti dP/dz - dU03/dt with B = z d3u03 U03 and
  // P = z d3n0 (1/(n0+N0) - 1/n0). Tail integrals of the dt terms are
  // numerical; A, B, P integrate exactly since they vanish at infinity.
  std::vector<double> A(n), B(n), P(n);
  const std::vector<double> I_t = tail_integral_uniform(dN0_dt, dz);
  const std::vector<double> I_u = tail_integral_uniform(dU03_dt, dz);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = prof.z_nodes[i];
    const double N0 = prof.N0[i], U03 = prof.U03[i];
    A[i] = z * tr.d3n0 * U03 + N0 * z * tr.d3u03;
    B[i] = z * tr.d3u03 * U03;
    P[i] = z * tr.d3n0 * (1.0 / (n0 + N0) - 1.0 / n0);
  }

  const double tail_scale = std::abs(dN0_dt[n - 1]) + std::abs(dU03_dt[n - 1]) +
                            std::abs(A[n - 1]) + std::abs(B[n - 1]) + std::abs(P[n - 1]);
  if (tail_scale > 1e-8)
    throw QuadratureTail("assemble_layer_sources: layer sources not decayed at z_max");

  LayerSourceTerms out;
  out.F2.resize(n);
  out.F5.resize(n);
  out.F6.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double N0 = prof.N0[i];
    // Both relations integrate d/dz (products) = F from z to infinity, so the
    // tail integral enters each right-hand side with the same orientation.
    const double F2 = -A[i] + I_t[i] + tr.n1 * u + n0 * tr.u13;
    const double F4 = -B[i] - Ti * P[i] + I_u[i] + u * tr.u13 + Ti * tr.n1 / n0;
    // Substituting the integrated mass relation into the momentum relation
    // moves the F2 block to the right-hand side with a minus sign.
    const double F5 = F4 - n0 * u / sq(n0 + N0) * F2;
    const double Nrel = (n0 + N0) / n0;
    const double dF = eval_F_prime(ctx, Nrel);
    const double F6 = n0 * F5 / dF +
                      n0 * (std::exp(-prof.Phi0[i]) - 1.0) * prof.z_nodes[i] * tr.d3phi0 +
                      n0 * std::exp(-prof.Phi0[i]) * tr.phi1;
    out.F2[i] = F2;
    out.F5[i] = F5;
    out.F6[i] = F6;
  }
  return out;
}

inline std::vector<double> assemble_F6(const LayerContext& ctx, const SheathProfile& prof,
                                       const SheathProfile& prof_minus,
                                       const SheathProfile& prof_plus, double dt,
                                       const RegularTraces& tr) {
  return assemble_layer_sources(ctx, prof, prof_minus, prof_plus, dt, tr).F6;
}

/// Linear corrector BVP: -Phi'' + X'(Phi0) Phi = -F6, Phi(0) = bv,
/// Phi(z_max) = 0. Second-order three-point scheme + tridiagonal elimination.
/// Requires X'(Phi0(z)) >= alpha (the coercivity the paper gets from the
/// upper bound in its smallness condition).
inline std::vector<double> solve_phi1(const LayerContext& ctx, const SheathProfile& prof,
                                      const std::vector<double>& F6, double boundary_value,
                                      double alpha = 1e-3) {
  const std::size_t n = prof.z_nodes.size();
  if (F6.size() != n) throw std::invalid_argument("solve_phi1: F6 length mismatch");
  const double dz = prof.dz;

  std::vector<double> c(n);
  for (std::size_t i = 0; i < n; ++i) {
    c[i] = eval_X_prime(ctx, prof.Phi0[i]);
    if (c[i] < alpha) throw CoercivityLoss("solve_phi1: X'(Phi0) below coercivity constant");
  }

  const std::size_t m = n - 2;  // interior unknowns
  std::vector<double> sub(m), diag(m), sup(m), rhs(m);
  const double w = 1.0 / sq(dz);
  for (std::size_t j = 0; j < m; ++j) {
    sub[j] = -w;
    diag[j] = 2.0 * w + c[j + 1];
    sup[j] = -w;
    rhs[j] = -F6[j + 1];
  }
  rhs[0] += w * boundary_value;
  std::vector<double> inner = solve_tridiagonal(sub, diag, sup, rhs);

  std::vector<double> phi1(n);
  phi1[0] = boundary_value;
  phi1[n - 1] = 0.0;
  for (std::size_t j = 0; j < m; ++j) phi1[j + 1] = inner[j];

  // The discrete equation must be satisfied to solver precision.
  double scale = 1.0;
  for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(F6[i]));
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double res = -(phi1[i - 1] - 2.0 * phi1[i] + phi1[i + 1]) * w + c[i] * phi1[i] + F6[i];
    if (std::abs(res) > 1e-10 * scale * w * dz * dz + 1e-8)
      throw Error("solve_phi1: discrete residual above tolerance");
  }
  return phi1;
}

/// N1 and U13 from the first-order relations once Phi1 is known:
/// D(z) (n1 + N1) = Phi1 + F5 with D = Ti/(n0+N0) - (u n0)^2/(n0+N0)^3, then
/// the integrated mass relation yields U13.
inline void attach_first_order(const LayerContext& ctx, SheathProfile& prof,
                               const LayerSourceTerms& src, const std::vector<double>& Phi1,
                               const RegularTraces& tr) {
  const std::size_t n = prof.z_nodes.size();
  prof.Phi1 = Phi1;
  prof.N1.resize(n);
  prof.U13.resize(n);
  const double n0 = ctx.n0_trace, u = ctx.u3_trace, Ti = ctx.Ti;
  for (std::size_t i = 0; i < n; ++i) {
    const double N0 = prof.N0[i], U03 = prof.U03[i];
    const double D = Ti / (n0 + N0) - sq(u * n0) / (n0 + N0) / sq(n0 + N0);
    prof.N1[i] = (Phi1[i] + src.F5[i]) / D - tr.n1;
    prof.U13[i] =
        (src.F2[i] - (tr.n1 + prof.N1[i]) * (u + U03)) / (n0 + N0) - tr.u13;
  }
  prof.finalize_samplers();
}

}  // namespace sheathlab
