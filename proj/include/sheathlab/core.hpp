#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "sheathlab/errors.hpp"
#include "sheathlab/numerics.hpp"

namespace sheathlab {

/// Physical and asymptotic constants shared by every module.
/// phi_ref = -ln(n_ref) and phi_b = phi_c + phi_ref are derived, not stored.
struct Parameters {
  double ion_temperature = 1.0;   // T^i
  double epsilon = 0.01;          // scaled Debye length
  double n_ref = 1.0;             // reference density
  double w_ref = -2.0;            // reference normal velocity, < 0
  double phi_c = 0.0;             // boundary potential perturbation (y-uniform scalar)
  double bl_amplitude = 0.05;     // delta, boundary-layer amplitude scale
  double weight_mu = 0.75;        // mu, Goodman-weight decay parameter
  double gamma0 = 0.8;            // uniform tail rate lower bound
  int expansion_order = 0;        // K in {0, 1}
  double final_time = 0.1;        // T

  double phi_ref() const { return -std::log(n_ref); }
  double phi_b() const { return phi_c + phi_ref(); }

  void validate() const {
    if (!(ion_temperature > 0.0)) throw std::invalid_argument("Parameters: ion_temperature <= 0");
    if (!(epsilon > 0.0 && epsilon <= 1.0))
      throw std::invalid_argument("Parameters: epsilon outside (0, 1]");
    if (!(n_ref > 0.0)) throw std::invalid_argument("Parameters: n_ref <= 0");
    if (!(w_ref < 0.0)) throw std::invalid_argument("Parameters: w_ref >= 0");
    if (!std::isfinite(phi_b())) throw std::invalid_argument("Parameters: phi_b not finite");
    if (!(bl_amplitude >= 0.0)) throw std::invalid_argument("Parameters: bl_amplitude < 0");
    if (!(weight_mu > 0.0)) throw std::invalid_argument("Parameters: weight_mu <= 0");
    if (!(gamma0 > 0.0)) throw std::invalid_argument("Parameters: gamma0 <= 0");
    if (expansion_order != 0 && expansion_order != 1)
      throw std::invalid_argument("Parameters: expansion_order not in {0, 1}");
    if (!(final_time > 0.0)) throw std::invalid_argument("Parameters: final_time <= 0");
    // Weight admissibility: keeps 1/2 <= eta <= 2 with a wide margin.
    if (bl_amplitude / sq(weight_mu) > 0.1 + 1e-15)
      throw std::invalid_argument("Parameters: bl_amplitude / weight_mu^2 > 0.1");
  }
};

/// Half-line mesh on [0, L] with an epsilon-resolved zone against the wall.
struct Grid1D {
  std::vector<double> cell_centers;
  std::vector<double> cell_widths;
  double layer_resolution = 0.0;  // max width inside the fine zone

  std::size_t size() const { return cell_centers.size(); }
  double length() const {
    double L = 0.0;
    for (double w : cell_widths) L += w;
    return L;
  }
};

/// Two-zone mesh: a uniform fine zone of width >= 10*eps/gamma0 (cell width
/// <= eps/10), then bulk cells of width <= bulk_dx. Pass fine_dx/zone_factor
/// to refine beyond the defaults.
inline Grid1D build_grid(double L, double eps, double gamma0, double bulk_dx, double fine_dx = -1.0,
                         double zone_factor = 1.0) {
  if (!(L > 0.0) || !(eps > 0.0) || !(gamma0 > 0.0) || !(bulk_dx > 0.0))
    throw std::invalid_argument("build_grid: arguments must be positive");
  if (fine_dx <= 0.0) fine_dx = eps / 10.0;
  fine_dx = std::min(fine_dx, eps / 10.0);
  if (zone_factor < 1.0) zone_factor = 1.0;
  const double zone = zone_factor * 10.0 * eps / gamma0;
  // The layer tail must sit well below truncation tolerance before the far end.
  if (L < 3.0 * 10.0 * eps / gamma0)
    throw InvalidMesh("build_grid: L too small for the boundary-layer zone");
  const std::size_t n_fine = static_cast<std::size_t>(std::ceil(zone / fine_dx));
  const double dxf = zone / static_cast<double>(n_fine);
  const std::size_t n_bulk = static_cast<std::size_t>(std::ceil((L - zone) / bulk_dx));
  if (n_bulk < 2) throw InvalidMesh("build_grid: no room for bulk cells");
  const double dxb = (L - zone) / static_cast<double>(n_bulk);

  Grid1D g;
  g.cell_centers.reserve(n_fine + n_bulk);
  g.cell_widths.reserve(n_fine + n_bulk);
  double x = 0.0;
  for (std::size_t i = 0; i < n_fine; ++i) {
    g.cell_centers.push_back(x + 0.5 * dxf);
    g.cell_widths.push_back(dxf);
    x += dxf;
  }
  for (std::size_t i = 0; i < n_bulk; ++i) {
    g.cell_centers.push_back(x + 0.5 * dxb);
    g.cell_widths.push_back(dxb);
    x += dxb;
  }
  g.layer_resolution = dxf;
  return g;
}

/// Fields of the Euler-Poisson state at one time, one value per grid cell.
struct PlasmaState {
  std::vector<double> n;
  std::vector<double> u1, u2, u3;
  std::vector<double> phi;
  double time = 0.0;

  void validate(const Grid1D& grid) const {
    const std::size_t m = grid.size();
    if (n.size() != m || u1.size() != m || u2.size() != m || u3.size() != m || phi.size() != m)
      throw std::invalid_argument("PlasmaState: field length mismatch with grid");
    for (std::size_t i = 0; i < m; ++i) {
      if (!(n[i] > 0.0)) throw std::invalid_argument("PlasmaState: non-positive density");
      if (!std::isfinite(n[i]) || !std::isfinite(u1[i]) || !std::isfinite(u2[i]) ||
          !std::isfinite(u3[i]) || !std::isfinite(phi[i]))
        throw std::invalid_argument("PlasmaState: non-finite field value");
    }
  }
};

enum class Regime { Supersonic, Intermediate, SubsonicOrCharacteristic };

inline std::string regime_name(Regime r) {
  switch (r) {
    case Regime::Supersonic:
      return "supersonic";
    case Regime::Intermediate:
      return "intermediate";
    default:
      return "subsonic_or_characteristic";
  }
}

/// Classification against explicit sonic speeds; all comparisons carry a
/// quantitative margin since the paper-side inequalities are strict.
inline Regime classify_regime_speeds(double trace_u3, double c_slow, double c_fast,
                                     double margin) {
  if (!(margin > 0.0)) throw std::invalid_argument("classify_regime: margin <= 0");
  if (!(0.0 < c_slow && c_slow < c_fast))
    throw std::invalid_argument("classify_regime: need 0 < c_slow < c_fast");
  if (std::abs(trace_u3 + c_fast) < margin || std::abs(trace_u3 + c_slow) < margin)
    throw MarginViolation("classify_regime: trace velocity within margin of a sonic threshold");
  if (trace_u3 + c_fast <= -margin) return Regime::Supersonic;
  if (trace_u3 >= -c_fast + margin && trace_u3 <= -c_slow - margin) return Regime::Intermediate;
  return Regime::SubsonicOrCharacteristic;
}

inline Regime classify_regime(double trace_u3, double Ti, double margin) {
  if (!(Ti > 0.0)) throw std::invalid_argument("classify_regime: Ti <= 0");
  return classify_regime_speeds(trace_u3, std::sqrt(Ti), std::sqrt(Ti + 1.0), margin);
}

}  // namespace sheathlab
