#include "sheathlab/sheath.hpp"

#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"

using namespace sheathlab;

namespace {
LayerContext canonical(double phi0 = 0.1) { return LayerContext(1.0, -2.0, 1.0, phi0); }
}  // namespace

TEST(LayerContext, RejectsNonBohmTraces) {
  EXPECT_THROW(LayerContext(1.0, -1.2, 1.0, 0.0), BohmViolation);
  EXPECT_THROW(LayerContext(1.0, 2.0, 1.0, 0.0), BohmViolation);
  EXPECT_THROW(LayerContext(-1.0, -2.0, 1.0, 0.0), std::invalid_argument);
}

TEST(EvalF, MatchesDirectEvaluation) {
  const LayerContext ctx = canonical();
  EXPECT_DOUBLE_EQ(eval_F(ctx, 1.0), 0.0);
  // 2/4 + ln 2 - 2 and 2/0.25 + ln 0.5 - 2, evaluated to full precision.
  EXPECT_NEAR(eval_F(ctx, 2.0), -0.80685281944005469, 1e-14);
  EXPECT_NEAR(eval_F(ctx, 0.5), 5.3068528194400547, 1e-13);
  EXPECT_THROW(eval_F(ctx, 0.0), DomainError);
  EXPECT_THROW(eval_F(ctx, -1.0), DomainError);
}

TEST(InvertF, RoundTripAndMonotone) {
  const LayerContext ctx = canonical();
  EXPECT_NEAR(invert_F(ctx, 0.0), 1.0, 1e-12);
  EXPECT_NEAR(invert_F(ctx, 5.3068528194400547), 0.5, 1e-10);
  //

  double prev = invert_F(ctx, ctx.Phi_F() + 0.05);
  for (int k = 1; k <= 100; ++k) {
    const double Phi = ctx.Phi_F() + 0.05 + 0.06 * k;
    const double N = invert_F(ctx, Phi);
    EXPECT_LT(N, prev);  // strictly decreasing
    EXPECT_NEAR(eval_F(ctx, N), Phi, 1e-10 * std::max(1.0, std::abs(Phi)));
    EXPECT_NEAR(N, oracle::invert_F_bisect(1.0, -2.0, Phi), 1e-11);
    prev = N;
  }
  EXPECT_THROW(invert_F(ctx, ctx.Phi_F()), OutOfRange);
  EXPECT_THROW(invert_F(ctx, ctx.Phi_F() - 0.5), OutOfRange);
}

TEST(EvalX, FixedPointAndValue) {
  const LayerContext ctx = canonical();
  EXPECT_NEAR(eval_X(ctx, 0.0, true), 0.0, 1e-14);
  const double expected = oracle::invert_F_bisect(1.0, -2.0, 0.1) - std::exp(-0.1);
  EXPECT_NEAR(eval_X(ctx, 0.1, true), expected, 1e-11);
  // First-order estimate from the linearization, within a few percent.
  EXPECT_NEAR(eval_X(ctx, 0.1, true), 0.0618, 0.05 * 0.0618 + 2e-3);
  // Prefactored variant scales by the density trace.
  const LayerContext ctx2(2.0, -2.0, 1.0, 0.1);
  EXPECT_NEAR(eval_X(ctx2, 0.1, false), 2.0 * eval_X(ctx2, 0.1, true), 1e-13);
}

TEST(EvalX, DerivativeAtZeroIsGammaSquared) {
  const LayerContext ctx = canonical();
  const double h = 1e-5;
  const double fd = (eval_X(ctx, h, true) - eval_X(ctx, -h, true)) / (2.0 * h);
  EXPECT_NEAR(fd, 2.0 / 3.0, 1e-7);
  EXPECT_NEAR(eval_X_prime(ctx, 0.0, true), 2.0 / 3.0, 1e-12);
}

TEST(EvalV, QuadratureAgainstClosedFormOracle) {
  const LayerContext ctx = canonical();
  EXPECT_DOUBLE_EQ(eval_V(ctx, 0.0), 0.0);
  for (double Phi : {-0.3, -0.1, -0.02, 0.02, 0.1, 0.3, 1.0}) {
    const double quad = eval_V(ctx, Phi, true);
    const double closed = oracle::V_closed_form(1.0, -2.0, Phi);
    EXPECT_NEAR(quad, closed, 1e-10) << "Phi = " << Phi;
  }
}

TEST(EvalV, SecondDerivativeAtZeroIsGammaSquared) {
  const LayerContext ctx = canonical();
  auto V = [&](double p) { return eval_V(ctx, p, true); };
  const double d2 = oracle::second_derivative(V, 0.0, 1e-2);
  EXPECT_NEAR(d2, 2.0 / 3.0, 1e-6);
}

TEST(EvalV, PositiveAwayFromRestPoint) {
  const LayerContext ctx = canonical();
  const auto [lo, hi] = admissible_window(ctx);
  for (double Phi = lo; Phi < 1.0; Phi += 0.01) {
    if (std::abs(Phi) < 1e-9) continue;
    EXPECT_GT(eval_V(ctx, Phi, true), 0.0) << "Phi = " << Phi;
  }
}

TEST(DecayRate, FormulaValues) {
  EXPECT_NEAR(decay_rate(1.0, -2.0), 0.81649658092772603, 1e-15);
  EXPECT_NEAR(decay_rate(1.0, -3.0), 0.93541434669348533, 1e-15);
  // Marginal Bohm: exactly representable case, and the nearly exact sqrt(2).
  EXPECT_DOUBLE_EQ(decay_rate(3.0, -2.0), 0.0);
  EXPECT_NEAR(decay_rate(1.0, -std::sqrt(2.0)), 0.0, 1e-7);
  EXPECT_THROW(decay_rate(1.0, -1.2), BohmViolation);
}

TEST(AdmissibleWindow, BracketsZeroAndCoercive) {
  const LayerContext ctx = canonical();
  const auto [lo, hi] = admissible_window(ctx);
  EXPECT_LT(lo, 0.0);
  EXPECT_GT(hi, 0.0);
  EXPECT_LT(hi, 50.0);  // X' < 0 for large Phi forces a finite upper edge
  // Finite-difference scan of X' across the window.
  for (double Phi = lo; Phi <= hi; Phi += (hi - lo) / 64.0) {
    const double h = 1e-6;
    const double xp = (eval_X(ctx, Phi + h) - eval_X(ctx, Phi - h)) / (2.0 * h);
    EXPECT_GE(xp, 1e-3 - 1e-6) << "Phi = " << Phi;
  }
}

TEST(AdmissibleWindow, CollapsesAtMarginalBohm) {
  // u^2 barely above Ti + 1: X'(0) ~ gamma^2 drops below alpha.
  const LayerContext ctx(1.0, -std::sqrt(2.0005), 1.0, 0.0);
  const auto [lo, hi] = admissible_window(ctx);
  EXPECT_EQ(lo, 0.0);
  EXPECT_EQ(hi, 0.0);
}

TEST(SolvePhi0, ZeroBoundaryValueGivesZeroProfile) {
  const LayerContext ctx = canonical(0.0);
  const SheathProfile p = solve_phi0(ctx, 40.0, 1e-9, 0.01);
  for (double v : p.Phi0) EXPECT_EQ(v, 0.0);
}

TEST(SolvePhi0, MonotoneProfileWithFormulaDecayRate) {
  const LayerContext ctx = canonical(0.1);
  const SheathProfile p = solve_phi0(ctx, 40.0, 1e-9, 0.01);
  EXPECT_DOUBLE_EQ(p.Phi0.front(), 0.1);
  for (std::size_t i = 1; i < p.Phi0.size(); ++i) EXPECT_LE(p.Phi0[i], p.Phi0[i - 1] + 1e-15);
  EXPECT_LT(std::abs(p.Phi0.back()), 1e-9);
  EXPECT_NEAR(p.gamma_formula, 0.81649658092772603, 1e-15);
  EXPECT_NEAR(p.measured_decay_rate, p.gamma_formula, 0.03 * p.gamma_formula);
}

TEST(SolvePhi0, HamiltonianIdentityNodewise) {
  const LayerContext ctx = canonical(0.1);
  const SheathProfile p = solve_phi0(ctx, 40.0, 1e-9, 0.01);
  for (std::size_t i = 2; i + 2 < p.Phi0.size(); ++i) {
    if (std::abs(p.Phi0[i]) < 1e-12) break;
    const double dphi = oracle::fd4(p.Phi0, i, p.dz);
    const double lhs = dphi * dphi;
    const double vtol = std::max(1e-16, 1e-10 * sq(p.Phi0[i]));
    const double rhs = 2.0 * adaptive_simpson([&](double s) { return eval_X(ctx, s); }, 0.0,
                                              p.Phi0[i], vtol);
    // The quadrature oracle carries the inversion's absolute rounding floor
    // (~3e-16 per unit of Phi), dominant once Phi drops below ~1e-7.
    EXPECT_NEAR(lhs, rhs, 1e-8 * std::max(lhs, rhs) + 6e-16 * std::abs(p.Phi0[i]))
        << "node " << i;
  }
}

TEST(SolvePhi0, PrefactoredDecayRateScalesWithDensityTrace) {
  const LayerContext ctx(2.0, -2.0, 1.0, 0.1);
  const double gamma_pre = std::sqrt(2.0) * decay_rate(1.0, -2.0);
  const SheathProfile p = solve_phi0(ctx, 40.0, 1e-9, 0.01);
  EXPECT_NEAR(p.measured_decay_rate, gamma_pre, 0.03 * gamma_pre);
}

TEST(SolvePhi0, RejectsBoundaryValueBelowInversionRange) {
  const LayerContext ctx = canonical();
  const LayerContext bad(1.0, -2.0, 1.0, ctx.Phi_F() - 0.1);
  EXPECT_THROW(solve_phi0(bad, 40.0, 1e-9, 0.01), InadmissibleBoundaryValue);
}

TEST(BuildLayerFields, ZeroProfileGivesZeroFields) {
  const LayerContext ctx = canonical(0.0);
  const SheathProfile p = build_layer_fields(ctx, solve_phi0(ctx, 40.0, 1e-9, 0.02));
  for (double v : p.N0) EXPECT_EQ(v, 0.0);
  for (double v : p.U03) EXPECT_EQ(v, 0.0);
}

TEST(BuildLayerFields, WallDensityAndFluxIdentity) {
  const LayerContext ctx = canonical(0.1);
  const SheathProfile p = build_layer_fields(ctx, solve_phi0(ctx, 40.0, 1e-9, 0.01));
  const double N0_wall_expected = oracle::invert_F_bisect(1.0, -2.0, 0.1) - 1.0;
  EXPECT_NEAR(p.N0.front(), N0_wall_expected, 1e-10);
  // First-order estimate -Phi0/(u^2 - Ti) = -0.0333; the quadratic term of
  // the inversion shifts the exact value to -0.03144.
  EXPECT_NEAR(p.N0.front(), -0.0333, 0.10 * 0.0333);
  for (std::size_t i = 0; i < p.z_nodes.size(); ++i) {
    const double flux = (1.0 + p.N0[i]) * (-2.0 + p.U03[i]);
    EXPECT_NEAR(flux, -2.0, 1e-10 * 2.0) << "node " << i;
  }
}

TEST(SolvePhi1, ZeroSourceZeroBoundaryGivesZero) {
  const LayerContext ctx = canonical(0.1);
  const SheathProfile p = build_layer_fields(ctx, solve_phi0(ctx, 40.0, 1e-9, 0.02));
  const std::vector<double> F6(p.z_nodes.size(), 0.0);
  const std::vector<double> phi1 = solve_phi1(ctx, p, F6, 0.0);
  for (double v : phi1) EXPECT_NEAR(v, 0.0, 1e-14);
}

TEST(SolvePhi1, ManufacturedSolutionSecondOrder) {
  const LayerContext ctx = canonical(0.1);
  auto exact = [](double z) { return std::exp(-sq(z - 3.0)); };
  auto exact_dd = [](double z) {
    return (4.0 * sq(z - 3.0) - 2.0) * std::exp(-sq(z - 3.0));
  };
  std::vector<double> errs, dzs;
  for (double dz : {0.08, 0.04, 0.02}) {
    const SheathProfile p = build_layer_fields(ctx, solve_phi0(ctx, 40.0, 1e-9, dz));
    std::vector<double> F6(p.z_nodes.size());
    for (std::size_t i = 0; i < p.z_nodes.size(); ++i) {
      const double z = p.z_nodes[i];
      F6[i] = exact_dd(z) - eval_X_prime(ctx, p.Phi0[i]) * exact(z);
    }
    const std::vector<double> phi1 = solve_phi1(ctx, p, F6, exact(0.0));
    double err = 0.0;
    for (std::size_t i = 0; i < phi1.size(); ++i)
      err = std::max(err, std::abs(phi1[i] - exact(p.z_nodes[i])));
    errs.push_back(err);
    dzs.push_back(dz);
  }
  const double order1 = std::log2(errs[0] / errs[1]);
  const double order2 = std::log2(errs[1] / errs[2]);
  EXPECT_NEAR(order1, 2.0, 0.2);
  EXPECT_NEAR(order2, 2.0, 0.2);
}

TEST(SolvePhi1, CoercivityLossForLargePhi0) {
  const LayerContext ctx = canonical(0.1);
  SheathProfile p = build_layer_fields(ctx, solve_phi0(ctx, 40.0, 1e-9, 0.05));
  const auto [lo, hi] = admissible_window(ctx);
  for (double& v : p.Phi0) v = 1.5 * hi;  // push beyond the coercive range
  const std::vector<double> F6(p.z_nodes.size(), 0.0);
  EXPECT_THROW(solve_phi1(ctx, p, F6, 0.0), CoercivityLoss);
}

TEST(AssembleF6, SteadyZeroCorrectorZeroLayerGivesZero) {
  const LayerContext ctx = canonical(0.0);
  const SheathProfile p = build_layer_fields(ctx, solve_phi0(ctx, 40.0, 1e-9, 0.05));
  RegularTraces tr;
  tr.d3n0 = 0.4;  // nonzero regular slopes; every term carries a layer factor
  tr.d3u03 = -0.2;
  tr.d3phi0 = -0.4;
  const std::vector<double> F6 = assemble_F6(ctx, p, p, p, 1e-4, tr);
  for (double v : F6) EXPECT_NEAR(v, 0.0, 1e-14);
}

TEST(AssembleF6, TimeFrozenMassChainMatchesQuadratureOfF1) {
  const LayerContext ctx = canonical(0.1);
  const SheathProfile p = build_layer_fields(ctx, solve_phi0(ctx, 50.0, 1e-9, 0.01));
  RegularTraces tr;
  tr.d3n0 = 0.3;
  tr.d3u03 = 0.2;
  tr.d3phi0 = -0.3;
  const LayerSourceTerms src = assemble_layer_sources(ctx, p, p, p, 1e-4, tr);
  // Independent route: F1 = -d/dz [ z d3n0 U03 + N0 z d3u03 ] by 4th-order
  // differences of the tabulated product, then a tail quadrature.
  const std::size_t n = p.z_nodes.size();
  std::vector<double> A(n);
  for (std::size_t i = 0; i < n; ++i)
    A[i] = p.z_nodes[i] * tr.d3n0 * p.U03[i] + p.N0[i] * p.z_nodes[i] * tr.d3u03;
  std::vector<double> F1(n, 0.0);
  for (std::size_t i = 2; i + 2 < n; ++i) F1[i] = -oracle::fd4(A, i, p.dz);
  std::vector<double> F2_ref = tail_integral_uniform(F1, p.dz);
  for (std::size_t i = 4; i + 4 < n; ++i) {
    EXPECT_NEAR(src.F2[i], -F2_ref[i], 3e-6) << "node " << i;
  }
}

TEST(AssembleF6, DecaysBelowTolAtFortyOverGamma) {
  const LayerContext ctx = canonical(0.1);
  const double gamma = decay_rate(1.0, -2.0);
  const double zmax = 40.0 / gamma;
  const SheathProfile p = build_layer_fields(ctx, solve_phi0(ctx, zmax, 1e-9, 0.02));
  RegularTraces tr;
  tr.d3n0 = 0.3;
  tr.d3u03 = 0.2;
  tr.d3phi0 = -0.3;
  const std::vector<double> F6 = assemble_F6(ctx, p, p, p, 1e-4, tr);
  EXPECT_LT(std::abs(F6.back()), 1e-8);
}

TEST(AttachFirstOrder, FirstOrderFieldsDecay) {
  const LayerContext ctx = canonical(0.1);
  SheathProfile p = build_layer_fields(ctx, solve_phi0(ctx, 50.0, 1e-9, 0.02));
  RegularTraces tr;
  tr.d3n0 = 0.3;
  tr.d3u03 = 0.2;
  tr.d3phi0 = -0.3;
  const LayerSourceTerms src = assemble_layer_sources(ctx, p, p, p, 1e-4, tr);
  const std::vector<double> phi1 = solve_phi1(ctx, p, src.F6, 0.0);
  attach_first_order(ctx, p, src, phi1, tr);
  ASSERT_TRUE(p.has_first_order());
  EXPECT_LT(std::abs(p.Phi1.back()), 1e-8);
  EXPECT_LT(std::abs(p.N1.back()), 1e-6);
  EXPECT_LT(std::abs(p.U13.back()), 1e-6);
}

TEST(MeasureDecay, SyntheticExponentials) {
  std::vector<double> z, pure, tempered, flat;
  for (int i = 0; i <= 4000; ++i) {
    const double zz = 0.01 * i;
    z.push_back(zz);
    pure.push_back(std::exp(-0.5 * zz));
    tempered.push_back((1.0 + zz) * std::exp(-0.5 * zz));
    flat.push_back(2.0);
  }
  EXPECT_NEAR(measure_decay(z, pure, 0.0, 40.0), 0.5, 1e-10);
  // The fitted oracle slope over [20, 40]; the polynomial tempering biases it
  // by about mean(1/(1+z)) on the window.
  std::vector<double> zi, li;
  for (std::size_t i = 0; i < z.size(); ++i)
    if (z[i] >= 20.0 && z[i] <= 40.0) {
      zi.push_back(z[i]);
      li.push_back(std::log(tempered[i]));
    }
  const double expected = -oracle::ls_slope(zi, li);
  const double measured = measure_decay(z, tempered, 20.0, 40.0);
  EXPECT_NEAR(measured, expected, 1e-12);
  EXPECT_NEAR(measured, 0.5, 0.05);
  EXPECT_THROW(measure_decay(z, flat, 20.0, 40.0), WindowTooNoisy);
}
