#pragma once

#include <cmath>
#include <memory>

#include "sheathlab/errors.hpp"
#include "sheathlab/numerics.hpp"

namespace sheathlab {

/// Time-dependent regular part (n^0, u^0) of the expansion; an exact solution
/// of the quasineutral limit system with phi^0 = -ln n^0 and zero tangential
/// velocity. Exact x-derivatives are part of the interface because the layer
/// sources need boundary traces of them.
class Background {
 public:
  virtual ~Background() = default;
  virtual double n(double t, double x) const = 0;
  virtual double u3(double t, double x) const = 0;
  virtual double dn_dx(double t, double x) const = 0;
  virtual double du3_dx(double t, double x) const = 0;

  double phi(double t, double x) const { return -std::log(n(t, x)); }
  double dphi_dx(double t, double x) const { return -dn_dx(t, x) / n(t, x); }
};

class UniformBackground final : public Background {
 public:
  UniformBackground(double n0, double u0) : n0_(n0), u0_(u0) {}
  double n(double, double) const override { return n0_; }
  double u3(double, double) const override { return u0_; }
  double dn_dx(double, double) const override { return 0.0; }
  double du3_dx(double, double) const override { return 0.0; }

 private:
  double n0_, u0_;
};

/// Exact smooth solution of the isothermal limit Euler system with sound
/// speed c = sqrt(Ti + 1): a simple wave of the minus family. The Riemann
/// invariant u + c ln n is uniform, states ride characteristics dx/dt = u - c,
/// and the velocity profile solves w = U0(x - (w - c) t) (Newton; pre-shock
/// this is uniquely solvable). A Gaussian bump rides toward the wall.
class SimpleWaveBackground final : public Background {
 public:
  SimpleWaveBackground(double Ti, double base_n, double base_u, double amp, double center,
                       double width)
      : c_(std::sqrt(Ti + 1.0)),
        base_n_(base_n),
        base_u_(base_u),
        amp_(amp),
        center_(center),
        width_(width),
        jplus_(base_u + std::sqrt(Ti + 1.0) * std::log(base_n)) {
    if (!(base_n > 0.0) || !(width > 0.0))
      throw std::invalid_argument("SimpleWaveBackground: bad base_n or width");
  }

  double n(double t, double x) const override {
    return std::exp((jplus_ - w(t, x)) / c_);
  }
  double u3(double t, double x) const override { return w(t, x); }
  double dn_dx(double t, double x) const override {
    return -n(t, x) / c_ * dw_dx(t, x);
  }
  double du3_dx(double t, double x) const override { return dw_dx(t, x); }

 private:
  double profile(double xi) const { return base_u_ + amp_ * std::exp(-sq((xi - center_) / width_)); }
  double profile_prime(double xi) const {
    const double s = (xi - center_) / width_;
    return amp_ * (-2.0 * s / width_) * std::exp(-sq(s));
  }

  double w(double t, double x) const {
    double v = profile(x - (base_u_ - c_) * t);  // good initial guess
    for (int it = 0; it < 100; ++it) {
      const double xi = x - (v - c_) * t;
      const double g = v - profile(xi);
      const double gp = 1.0 + t * profile_prime(xi);
      if (gp <= 0.0) throw Error("SimpleWaveBackground: characteristics crossed (shock)");
      const double step = g / gp;
      v -= step;
      if (std::abs(step) < 1e-15 * (1.0 + std::abs(v))) break;
    }
    return v;
  }
  double dw_dx(double t, double x) const {
    const double v = w(t, x);
    const double up = profile_prime(x - (v - c_) * t);
    return up / (1.0 + t * up);
  }

  double c_, base_n_, base_u_, amp_, center_, width_, jplus_;
};

}  // namespace sheathlab
