#include "sheathlab/core.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "oracles.hpp"

using namespace sheathlab;

TEST(Parameters, ValidatesInvariants) {
  Parameters p;
  EXPECT_NO_THROW(p.validate());
  EXPECT_DOUBLE_EQ(p.phi_ref(), 0.0);
  p.n_ref = std::exp(1.0);
  EXPECT_DOUBLE_EQ(p.phi_ref(), -1.0);
  EXPECT_DOUBLE_EQ(p.phi_b(), p.phi_c - 1.0);

  Parameters bad = Parameters{};
  bad.epsilon = 1.5;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = Parameters{};
  bad.w_ref = 0.5;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = Parameters{};
  bad.bl_amplitude = 0.2;
  bad.weight_mu = 0.3;  // delta / mu^2 > 0.1
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = Parameters{};
  bad.expansion_order = 2;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(ClassifyRegime, SpecExamples) {
  EXPECT_EQ(classify_regime(-2.0, 1.0, 0.05), Regime::Supersonic);
  EXPECT_EQ(classify_regime(-1.2, 1.0, 0.05), Regime::Intermediate);
  EXPECT_THROW(classify_regime(-1.4142, 1.0, 0.05), MarginViolation);
  EXPECT_EQ(classify_regime(-0.5, 1.0, 0.05), Regime::SubsonicOrCharacteristic);
  EXPECT_EQ(classify_regime(0.3, 1.0, 0.05), Regime::SubsonicOrCharacteristic);
  EXPECT_THROW(classify_regime(-2.0, 1.0, 0.0), std::invalid_argument);
}

TEST(ClassifyRegime, InvariantUnderCommonRescaling) {
  oracle::Rng rng(20240901ull);
  for (int k = 0; k < 200; ++k) {
    const double c_slow = rng.uniform(0.3, 2.0);
    const double c_fast = c_slow + rng.uniform(0.2, 1.5);
    const double u = -rng.uniform(0.0, 2.0 * c_fast);
    const double margin = rng.uniform(1e-4, 0.02);
    const double s = rng.uniform(0.1, 10.0);
    Regime base;
    try {
      base = classify_regime_speeds(u, c_slow, c_fast, margin);
    } catch (const MarginViolation&) {
      EXPECT_THROW(classify_regime_speeds(s * u, s * c_slow, s * c_fast, s * margin),
                   MarginViolation);
      continue;
    }
    EXPECT_EQ(base, classify_regime_speeds(s * u, s * c_slow, s * c_fast, s * margin));
  }
}

TEST(BuildGrid, TwoZoneLayout) {
  const Grid1D g = build_grid(1.0, 0.01, 1.0, 0.01);
  EXPECT_LE(g.layer_resolution, 0.001 + 1e-15);
  // Fine zone covers [0, 0.1] with fine cells.
  double x = 0.0;
  std::size_t i = 0;
  while (x < 0.1 - 1e-12) {
    EXPECT_LE(g.cell_widths[i], 0.001 + 1e-15);
    x += g.cell_widths[i];
    ++i;
  }
  EXPECT_NEAR(x, 0.1, 1e-12);
  // Strictly increasing centers, positive widths, total length L.
  for (std::size_t k = 1; k < g.size(); ++k)
    EXPECT_GT(g.cell_centers[k], g.cell_centers[k - 1]);
  for (double w : g.cell_widths) EXPECT_GT(w, 0.0);
  EXPECT_NEAR(g.length(), 1.0, 1e-12);
}

TEST(BuildGrid, RejectsDomainsTooSmallForTheLayer) {
  EXPECT_THROW(build_grid(1.0, 1.0, 1.0, 0.01), InvalidMesh);
}

TEST(BuildGrid, FineZoneLengthScalesWithEpsOverGamma) {
  const Grid1D g = build_grid(2.0, 0.005, 0.8165, 0.02);
  double fine_len = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.cell_widths[i] <= 0.005 / 10.0 + 1e-15 && g.cell_centers[i] < 0.2)
      fine_len += g.cell_widths[i];
  EXPECT_GE(fine_len, 10.0 * 0.005 / 0.8165 - 1e-12);
}

TEST(BuildGrid, WidthsSumToLengthForManyShapes) {
  oracle::Rng rng(77ull);
  for (int k = 0; k < 50; ++k) {
    const double L = rng.uniform(0.5, 3.0);
    const double gamma0 = rng.uniform(0.5, 1.2);
    const double eps = rng.uniform(1e-3, L * gamma0 / 40.0);
    const double bulk = rng.uniform(0.005, 0.05);
    const Grid1D g = build_grid(L, eps, gamma0, bulk);
    double sum = 0.0;
    for (double w : g.cell_widths) sum += w;
    EXPECT_NEAR(sum, L, 1e-12 * L);
  }
}

TEST(PlasmaState, ValidationCatchesBrokenFields) {
  const Grid1D g = build_grid(1.0, 0.01, 1.0, 0.01);
  PlasmaState s;
  s.n.assign(g.size(), 1.0);
  s.u1.assign(g.size(), 0.0);
  s.u2.assign(g.size(), 0.0);
  s.u3.assign(g.size(), -2.0);
  s.phi.assign(g.size(), 0.0);
  EXPECT_NO_THROW(s.validate(g));
  s.n[3] = -1.0;
  EXPECT_THROW(s.validate(g), std::invalid_argument);
  s.n[3] = 1.0;
  s.phi[0] = std::nan("");
  EXPECT_THROW(s.validate(g), std::invalid_argument);
  s.phi[0] = 0.0;
  s.u3.pop_back();
  EXPECT_THROW(s.validate(g), std::invalid_argument);
}
