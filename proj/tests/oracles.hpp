// Test-side oracles, kept independent of the implementation paths they check.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracle {

// Pure bisection inverse of F(N) = u^2/(2N^2) + Ti ln N - u^2/2 on (0, N_F).
inline double invert_F_bisect(double Ti, double u, double Phi) {
  auto F = [&](double N) { return u * u / (2.0 * N * N) + Ti * std::log(N) - u * u / 2.0; };
  const double NF = std::sqrt(u * u / Ti);
  double lo = NF;
  while (F(lo) < Phi) lo *= 0.5;
  double hi = NF;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (F(mid) > Phi)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Closed-form antiderivative route for V = int_0^Phi (F^{-1} - e^{-s}) ds,
// via int F^{-1} = N Phi - G(N) + G(1), G' = F. Independent reimplementation.
inline double V_closed_form(double Ti, double u, double Phi) {
  if (Phi == 0.0) return 0.0;
  const double u2 = u * u;
  const double N = invert_F_bisect(Ti, u, Phi);
  auto G = [&](double s) { return -u2 / (2.0 * s) + Ti * (s * std::log(s) - s) - u2 * s / 2.0; };
  return (N * Phi - G(N) + G(1.0)) - (1.0 - std::exp(-Phi));
}

// Richardson-extrapolated second derivative (5-point, two step sizes).
inline double second_derivative(const std::function<double(double)>& f, double x, double h) {
  auto d2 = [&](double hh) { return (f(x + hh) - 2.0 * f(x) + f(x - hh)) / (hh * hh); };
  const double a = d2(h), b = d2(h / 2.0);
  return (4.0 * b - a) / 3.0;
}

// 4th-order centered first derivative of tabulated values on a uniform grid.
inline double fd4(const std::vector<double>& f, std::size_t i, double dx) {
  return (-f[i + 2] + 8.0 * f[i + 1] - 8.0 * f[i - 1] + f[i - 2]) / (12.0 * dx);
}

// Cyclic Jacobi eigenvalues of a small symmetric matrix.
inline std::vector<double> symmetric_eigenvalues(std::vector<std::vector<double>> a) {
  const std::size_t n = a.size();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-28) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = ((theta >= 0) ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a[i][i];
  return ev;
}

inline double min_eigenvalue(const std::vector<std::vector<double>>& a) {
  double m = std::numeric_limits<double>::infinity();
  for (double v : symmetric_eigenvalues(a)) m = std::min(m, v);
  return m;
}

// Independent least-squares slope (sum-form normal equations).
inline double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// Deterministic xorshift64* generator for reproducible random traces.
struct Rng {
  std::uint64_t state;
  explicit Rng(std::uint64_t seed) : state(seed ? seed : 0x9e3779b97f4a7c15ull) {}
  double uniform(double lo, double hi) {
    state ^= state >> 12;
    state ^= state << 25;
    state ^= state >> 27;
    const std::uint64_t z = state * 0x2545F4914F6CDD1Dull;
    const double u = static_cast<double>(z >> 11) / 9007199254740992.0;
    return lo + (hi - lo) * u;
  }
};

}  // namespace oracle
