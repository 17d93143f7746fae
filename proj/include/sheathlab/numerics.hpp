#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "sheathlab/errors.hpp"

namespace sheathlab {

inline double sq(double v) { return v * v; }

inline int sgn(double v) { return (v > 0.0) - (v < 0.0); }

/// Thomas elimination for a tridiagonal system.
/// sub[i] multiplies x[i-1] in row i (sub[0] unused), sup[i] multiplies x[i+1]
/// (sup[n-1] unused). Overwrites nothing; returns the solution.
inline std::vector<double> solve_tridiagonal(const std::vector<double>& sub,
                                             const std::vector<double>& diag,
                                             const std::vector<double>& sup,
                                             const std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  std::vector<double> c(n), d(n), x(n);
  double beta = diag[0];
  if (beta == 0.0) throw Error("solve_tridiagonal: zero pivot in row 0");
  c[0] = sup[0] / beta;
  d[0] = rhs[0] / beta;
  for (std::size_t i = 1; i < n; ++i) {
    beta = diag[i] - sub[i] * c[i - 1];
    if (beta == 0.0) throw Error("solve_tridiagonal: zero pivot");
    c[i] = (i + 1 < n) ? sup[i] / beta : 0.0;
    d[i] = (rhs[i] - sub[i] * d[i - 1]) / beta;
  }
  x[n - 1] = d[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - c[i] * x[i + 1];
  return x;
}

namespace detail {

inline double adaptive_simpson_rec(const std::function<double(double)>& f, double a, double b,
                                   double fa, double fm, double fb, double whole, double tol,
                                   int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature with absolute tolerance.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                               double abs_tol = 1e-12, int max_depth = 48) {
  if (a == b) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, abs_tol, max_depth);
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
  double r2 = 1.0;
  double rms_residual = 0.0;
};

inline LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw FitFailure("fit_line: need at least two samples");
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw FitFailure("fit_line: degenerate abscissae");
  LinearFit out;
  out.slope = sxy / sxx;
  out.intercept = my - out.slope * mx;
  double ss_res = 0;
  for (std::size_t i = 0; i < n; ++i) ss_res += sq(y[i] - out.intercept - out.slope * x[i]);
  out.rms_residual = std::sqrt(ss_res / n);
  out.r2 = (syy > 0.0) ? 1.0 - ss_res / syy : 1.0;
  out.slope_stderr = (n > 2) ? std::sqrt(ss_res / (n - 2) / sxx) : 0.0;
  return out;
}

/// Monotone cubic (Fritsch-Carlson) interpolant on strictly increasing nodes.
class PchipSpline {
 public:
  PchipSpline() = default;
  PchipSpline(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n < 2 || y_.size() != n) throw Error("PchipSpline: need >= 2 nodes");
    m_.assign(n, 0.0);
    std::vector<double> d(n - 1), h(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      h[i] = x_[i + 1] - x_[i];
      if (h[i] <= 0.0) throw Error("PchipSpline: nodes not increasing");
      d[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    if (n == 2) {
      m_[0] = m_[1] = d[0];
    } else {
      for (std::size_t i = 1; i + 1 < n; ++i) {
        if (d[i - 1] * d[i] <= 0.0) {
          m_[i] = 0.0;
        } else {
          const double w1 = 2.0 * h[i] + h[i - 1];
          const double w2 = h[i] + 2.0 * h[i - 1];
          m_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
        }
      }
      m_[0] = edge_slope(h[0], h[1], d[0], d[1]);
      m_[n - 1] = edge_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
    }
  }

  double operator()(double xq) const {
    const std::size_t n = x_.size();
    if (xq <= x_.front()) return extrapolate(0, xq);
    if (xq >= x_.back()) return extrapolate(n - 1, xq);
    std::size_t i = std::upper_bound(x_.begin(), x_.end(), xq) - x_.begin() - 1;
    const double h = x_[i + 1] - x_[i];
    const double s = (xq - x_[i]) / h;
    const double h00 = (1 + 2 * s) * sq(1 - s);
    const double h10 = s * sq(1 - s);
    const double h01 = sq(s) * (3 - 2 * s);
    const double h11 = sq(s) * (s - 1);
    return h00 * y_[i] + h10 * h * m_[i] + h01 * y_[i + 1] + h11 * h * m_[i + 1];
  }

  const std::vector<double>& nodes() const { return x_; }

 private:
  static double edge_slope(double h0, double h1, double d0, double d1) {
    double m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (m * d0 <= 0.0) return 0.0;
    if (d0 * d1 < 0.0 && std::abs(m) > 3.0 * std::abs(d0)) return 3.0 * d0;
    return m;
  }
  double extrapolate(std::size_t i, double xq) const { return y_[i] + m_[i] * (xq - x_[i]); }

  std::vector<double> x_, y_, m_;
};

using Matrix = std::vector<std::vector<double>>;

namespace detail {

/// Determinant of the leading k x k block via LU with partial pivoting.
inline double leading_det_pivoted(const Matrix& m, std::size_t k) {
  Matrix a(k, std::vector<double>(k));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < k; ++j) a[i][j] = m[i][j];
  double det = 1.0;
  for (std::size_t c = 0; c < k; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < k; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    if (a[piv][c] == 0.0) return 0.0;
    if (piv != c) {
      std::swap(a[piv], a[c]);
      det = -det;
    }
    det *= a[c][c];
    for (std::size_t r = c + 1; r < k; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t j = c; j < k; ++j) a[r][j] -= f * a[c][j];
    }
  }
  return det;
}

}  // namespace detail

/// Leading principal minors by fraction-free (Bareiss) elimination.
/// Falls back to pivoted determinants if a pivot degenerates.
inline std::vector<double> leading_minors(const Matrix& m) {
  const std::size_t n = m.size();
  std::vector<double> minors(n, 0.0);
  Matrix a = m;
  double prev = 1.0;
  bool ok = true;
  for (std::size_t k = 0; k < n && ok; ++k) {
    minors[k] = a[k][k];
    if (k + 1 == n) break;
    if (a[k][k] == 0.0) {
      ok = false;
      break;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j)
        a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
    prev = a[k][k];
  }
  if (!ok) {
    for (std::size_t k = 1; k <= n; ++k) minors[k - 1] = detail::leading_det_pivoted(m, k);
  }
  return minors;
}

/// Sum of cell values weighted by cell widths (midpoint rule).
inline double integrate_cells(const std::vector<double>& values,
                              const std::vector<double>& widths) {
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) s += values[i] * widths[i];
  return s;
}

inline double l2_norm_cells(const std::vector<double>& values, const std::vector<double>& widths) {
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) s += sq(values[i]) * widths[i];
  return std::sqrt(s);
}

inline double linf_norm(const std::vector<double>& values) {
  double s = 0.0;
  for (double v : values) s = std::max(s, std::abs(v));
  return s;
}

/// Trapezoid tail integrals on a uniform grid: out[i] = integral from z[i] to z_max of f.
inline std::vector<double> tail_integral_uniform(const std::vector<double>& f, double dz) {
  const std::size_t n = f.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = n - 1; i-- > 0;) out[i] = out[i + 1] + 0.5 * dz * (f[i] + f[i + 1]);
  return out;
}

}  // namespace sheathlab
