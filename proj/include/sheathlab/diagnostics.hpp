#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "sheathlab/core.hpp"
#include "sheathlab/errors.hpp"
#include "sheathlab/numerics.hpp"

namespace sheathlab {

/// Goodman-type weight eta(x3) = exp((delta/mu^2)(1 - e^{-mu x3 / eps})).
/// eta(0) = 1 and eta' = (delta/(mu eps)) e^{-mu x3/eps} eta.
struct WeightFn {
  double delta;
  double mu;
  double eps;

  double eta(double x3) const {
    return std::exp(delta / sq(mu) * (1.0 - std::exp(-mu * x3 / eps)));
  }
  double eta_prime(double x3) const {
    return delta / (mu * eps) * std::exp(-mu * x3 / eps) * eta(x3);
  }
};

inline std::pair<double, double> eval_weight(const WeightFn& w, double x3) {
  if (x3 < 0.0) throw std::invalid_argument("eval_weight: x3 < 0");
  return {w.eta(x3), w.eta_prime(x3)};
}

/// Trace state entering the stability matrices. electron_factor stands for
/// e^{-phi_a} (1 + h(phi)); at leading order it equals the density.
struct TraceState {
  double n;
  double u3;
  double Ti;
  double electron_factor;
};

struct QuadraticFormReport {
  std::string matrix;
  std::vector<double> minors;
  bool positive = false;
  double mu_critical = 0.0;
};

namespace detail {

inline Matrix shift_identity(Matrix m, double amount) {
  for (std::size_t i = 0; i < m.size(); ++i) m[i][i] -= amount;
  return m;
}

inline bool minors_positive(const Matrix& m) {
  for (double d : leading_minors(m))
    if (!(d > 0.0)) return false;
  return true;
}

/// Largest mu >= 0 such that M - mu C I stays positive (bisection on the
/// Sylvester test; the paper leaves the constant C(C_a, M) abstract).
inline double critical_mu(const Matrix& m, double C) {
  if (!minors_positive(m)) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (minors_positive(shift_identity(m, hi * C)) && hi < 1e12) hi *= 2.0;
  for (int it = 0; it < 200 && (hi - lo) > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (minors_positive(shift_identity(m, mid * C)))
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

inline QuadraticFormReport report_for(std::string name, const Matrix& unshifted, double mu,
                                      double C) {
  QuadraticFormReport rep;
  rep.matrix = std::move(name);
  const Matrix shifted = shift_identity(unshifted, mu * C);
  rep.minors = leading_minors(shifted);
  rep.positive = true;
  for (double d : rep.minors)
    if (!(d > 0.0)) rep.positive = false;
  rep.mu_critical = critical_mu(unshifted, C);
  return rep;
}

}  // namespace detail

/// The 5x5 matrix of Estimate A in the variables (n, u1, u2, u3, phi), before
/// the mu C identity shift.
inline Matrix matrix_MA(const TraceState& t) {
  const double au = std::abs(t.u3);
  Matrix m(5, std::vector<double>(5, 0.0));
  m[0][0] = t.Ti * au / t.n;
  m[0][3] = m[3][0] = -t.Ti;
  m[1][1] = m[2][2] = m[3][3] = t.n * au;
  m[3][4] = m[4][3] = t.n;
  m[4][4] = t.electron_factor * au;
  return m;
}

/// Q^0 of the boundary/convection estimate, 4x4 in (n, u1, u2, u3).
inline Matrix matrix_Q0(const TraceState& t) {
  const double au = std::abs(t.u3);
  Matrix m(4, std::vector<double>(4, 0.0));
  m[0][0] = t.Ti * au / t.n;
  m[0][3] = m[3][0] = -t.Ti;
  m[1][1] = m[2][2] = m[3][3] = t.n * au;
  return m;
}

/// M_1^B: the velocity block loses one rank-one piece along e3.
inline Matrix matrix_M1B(const TraceState& t) {
  const double au = std::abs(t.u3);
  Matrix m(4, std::vector<double>(4, 0.0));
  m[0][0] = t.Ti * au / t.n;
  m[0][3] = m[3][0] = -t.Ti;
  m[1][1] = m[2][2] = t.n * au;
  m[3][3] = t.n * (au - 1.0 / au);
  return m;
}

/// M_2^B with e^{phi_a}/(1 + h(phi)) expressed through the electron factor.
inline Matrix matrix_M2B(const TraceState& t) {
  const double au = std::abs(t.u3);
  const double inv_ef = 1.0 / t.electron_factor;
  Matrix m(4, std::vector<double>(4, 0.0));
  m[0][0] = t.n * au * inv_ef;
  m[0][3] = m[3][0] = -t.Ti * inv_ef;
  m[1][1] = m[2][2] = m[3][3] = t.Ti * au * inv_ef / t.n;
  return m;
}

/// M_C, 6x6 block matrix in (eps grad n, eps grad u3).
inline Matrix matrix_MC(const TraceState& t) {
  const double au = std::abs(t.u3);
  Matrix m(6, std::vector<double>(6, 0.0));
  for (int i = 0; i < 3; ++i) {
    m[i][i] = t.Ti * au / sq(t.n);
    m[i][i + 3] = m[i + 3][i] = -t.Ti / t.n;
    m[i + 3][i + 3] = au;
  }
  return m;
}

/// Leading principal minors of M^A - mu C I by fraction-free elimination,
/// plus the critical mu at which positivity is lost.
inline QuadraticFormReport minors_MA(const TraceState& t, double mu, double C = 1.0) {
  if (!(t.n > 0.0) || !(t.u3 < 0.0))
    throw std::invalid_argument("minors_MA: need n > 0 and u3 < 0");
  return detail::report_for("M_A", matrix_MA(t), mu, C);
}

/// Reports for Q^0, M_1^B, M_2^B and M_C at the same trace.
inline std::vector<QuadraticFormReport> minors_other(const TraceState& t, double mu,
                                                     double C = 1.0) {
  if (!(t.n > 0.0) || !(t.u3 < 0.0))
    throw std::invalid_argument("minors_other: need n > 0 and u3 < 0");
  std::vector<QuadraticFormReport> reps;
  reps.push_back(detail::report_for("Q_0", matrix_Q0(t), mu, C));
  reps.push_back(detail::report_for("M_1B", matrix_M1B(t), mu, C));
  reps.push_back(detail::report_for("M_2B", matrix_M2B(t), mu, C));
  reps.push_back(detail::report_for("M_C", matrix_MC(t), mu, C));
  return reps;
}

enum class HChoice { h0, h1 };

/// h0(phi) = -(e^{-phi} - 1 + phi)/phi with the removable singularity at 0
/// handled by a 4-term Taylor series below |phi| = 1e-6; h1 = e^{-phi} - 1.
inline double eval_h(HChoice which, double phi) {
  if (which == HChoice::h1) return std::expm1(-phi);
  if (std::abs(phi) < 1e-6)
    return phi * (-0.5 + phi * (1.0 / 6.0 + phi * (-1.0 / 24.0 + phi / 120.0)));
  return -(std::expm1(-phi) + phi) / phi;
}

/// Weighted physical energy of Estimate A:
/// int eta [ (n_a+n)|du|^2/2 + Ti dn^2/(2(n_a+n)) + eps^2 |d3 dphi|^2 / 2
///           + e^{-phi_a}(1+h(phi)) dphi^2 / 2 ]  (midpoint quadrature).
inline double weighted_energy_A(const Grid1D& grid, const PlasmaState& perturbation,
                                const PlasmaState& background, const Parameters& params,
                                const WeightFn& w, HChoice h_choice) {
  const std::size_t m = grid.size();
  if (perturbation.n.size() != m || background.n.size() != m)
    throw std::invalid_argument("weighted_energy_A: size mismatch");
  const double eps = params.epsilon;
  const double Ti = params.ion_temperature;

  // d3 of the potential perturbation, centered on the nonuniform grid.
  std::vector<double> dphi(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t il = (i == 0) ? 0 : i - 1;
    const std::size_t ir = (i + 1 == m) ? i : i + 1;
    dphi[i] = (perturbation.phi[ir] - perturbation.phi[il]) /
              (grid.cell_centers[ir] - grid.cell_centers[il]);
  }

  double total = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double nt = background.n[i] + perturbation.n[i];
    if (!(nt > 0.0)) throw NonPositiveDensity("weighted_energy_A: total density <= 0");
    const double sym =
        std::exp(-background.phi[i]) * (1.0 + eval_h(h_choice, perturbation.phi[i]));
    if (!(sym > 0.0))
      throw NonPositiveSymmetrizer("weighted_energy_A: electron symmetrizer lost positivity");
    const double uu =
        sq(perturbation.u1[i]) + sq(perturbation.u2[i]) + sq(perturbation.u3[i]);
    const double density = nt * uu / 2.0 + Ti * sq(perturbation.n[i]) / (2.0 * nt) +
                           sq(eps) * sq(dphi[i]) / 2.0 + sym * sq(perturbation.phi[i]) / 2.0;
    total += w.eta(grid.cell_centers[i]) * density * grid.cell_widths[i];
  }
  return total;
}

/// H^m_eps norm on a uniform grid: sum_{k<=m} eps^k || d3^k f ||_L2, with
/// derivatives by 2nd-order centered differences (one-sided at the ends).
inline double hm_eps_norm(const std::vector<double>& f, double dx, double eps, int m) {
  if (m < 0 || m > 3) throw std::invalid_argument("hm_eps_norm: m must be in [0, 3]");
  if (f.size() < 5) throw std::invalid_argument("hm_eps_norm: field too short");
  std::vector<double> cur = f;
  const std::vector<double> w(f.size(), dx);
  double total = l2_norm_cells(cur, w);
  double ek = 1.0;
  for (int k = 1; k <= m; ++k) {
    std::vector<double> der(cur.size());
    const std::size_t n = cur.size();
    der[0] = (-3.0 * cur[0] + 4.0 * cur[1] - cur[2]) / (2.0 * dx);
    der[n - 1] = (3.0 * cur[n - 1] - 4.0 * cur[n - 2] + cur[n - 3]) / (2.0 * dx);
    for (std::size_t i = 1; i + 1 < n; ++i) der[i] = (cur[i + 1] - cur[i - 1]) / (2.0 * dx);
    cur = std::move(der);
    ek *= eps;
    total += ek * l2_norm_cells(cur, w);
  }
  return total;
}

}  // namespace sheathlab
