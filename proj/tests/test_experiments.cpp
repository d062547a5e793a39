#include <gtest/gtest.h>

#include <cmath>

#include "bubblelab/errors.hpp"
#include "bubblelab/experiments.hpp"
#include "bubblelab/interaction.hpp"

using namespace bl;

namespace {

DiscPtr radial(int n) { return Discretization::make(DomainModel::ball(n), GridSpec::radial()); }

}  // namespace

TEST(Regimes, TableIsTotal) {
  // Every input either maps to a row with a sane exponent or is refused with a reason.
  int rows = 0;
  for (int n = 3; n <= 9; ++n)
    for (int nu = 1; nu <= 3; ++nu)
      for (bool u0 : {false, true})
        for (auto bd : {BoundaryRegime::Interior, BoundaryRegime::NearBoundary})
          for (auto k : {ProjectionKind::PU1, ProjectionKind::PU2}) {
            RegimeInputs r{n, nu, u0, bd, k};
            try {
              auto z = zeta_reference(r);
              EXPECT_GT(z.expected_exponent, 0);
              EXPECT_LE(z.expected_exponent, 1);
              EXPECT_FALSE(z.row.empty());
              ++rows;
            } catch (const RegimeRefusal& e) {
              EXPECT_NE(std::string(e.what()).find("refused"), std::string::npos);
            }
          }
  EXPECT_GT(rows, 0);
  // exactly one mandated projection per interior (n, u0) for a single bubble, plus the n = 5 variant
  for (int n = 3; n <= 9; ++n)
    for (bool u0 : {false, true}) {
      int ok = 0;
      for (auto k : {ProjectionKind::PU1, ProjectionKind::PU2}) {
        try {
          zeta_reference({n, 1, u0, BoundaryRegime::Interior, k});
          ++ok;
        } catch (const RegimeRefusal&) {
        }
      }
      EXPECT_EQ(ok, (n == 5 && !u0) ? 2 : 1) << n << " " << u0;
    }
}

TEST(Regimes, KnownRows) {
  auto z = [](const std::string& s) { return zeta_reference(parse_regime(s)); };
  EXPECT_DOUBLE_EQ(z("n3-interior-u0zero-pu2").expected_exponent, 1);
  EXPECT_DOUBLE_EQ(z("n5-interior-u0zero-pu1").expected_exponent, 0.75);
  EXPECT_DOUBLE_EQ(z("n5-interior-u0zero-pu2").expected_exponent, 1);
  EXPECT_DOUBLE_EQ(z("n5-interior-u0pos-pu1").expected_exponent, 1);
  EXPECT_DOUBLE_EQ(z("n6-interior-u0zero-pu1").expected_log_power, 0.5);
  EXPECT_DOUBLE_EQ(z("n7-interior-u0zero-pu1").expected_exponent, 1);
  EXPECT_DOUBLE_EQ(z("n7-interior-u0zero-pu1-nu2").expected_exponent, 9.0 / 10);
  EXPECT_DOUBLE_EQ(z("n4-boundary-u0pos-pu1").expected_exponent, 2.0 / 3);
  EXPECT_DOUBLE_EQ(z("n5-boundary-u0pos-pu1").expected_exponent, 3.0 / 4);
  EXPECT_DOUBLE_EQ(z("n4-boundary-u0pos-pu2").expected_exponent, 1);
  EXPECT_DOUBLE_EQ(z("n7-boundary-u0zero-pu1").expected_exponent, 9.0 / 12);
  EXPECT_DOUBLE_EQ(z("n6-boundary-u0pos-pu1").expected_log_power, 0.5);
  EXPECT_THROW(z("n3-interior-u0zero-pu1"), RegimeRefusal);
  EXPECT_THROW(z("n6-boundary-u0zero-pu1-nu2"), RegimeRefusal);
  EXPECT_THROW(z("n3-boundary-u0zero-pu1"), RegimeRefusal);
}

TEST(Regimes, NameRoundTrip) {
  for (std::string s : {"n3-interior-u0zero-pu2", "n7-boundary-u0pos-pu1", "n4-interior-u0zero-pu2-nu3"})
    EXPECT_EQ(regime_name(parse_regime(s)), s);
  for (std::string bad : {"", "n3", "x3-interior-u0zero-pu2", "n3-inside-u0zero-pu2", "n3-interior-u0-pu2",
                          "n3-interior-u0zero-pu9", "n3-interior-u0zero-pu2-nu", "n3a-interior-u0zero-pu2"})
    EXPECT_THROW(parse_regime(bad), ConfigError) << bad;
}

TEST(Experiments, Case1Epsilon) {
  EXPECT_DOUBLE_EQ(case1_epsilon(3, 1, false, 0.1), 0.1);
  EXPECT_NEAR(case1_epsilon(4, 1, false, 0.1), 0.01 * std::log(10.0), 1e-15);
  EXPECT_NEAR(case1_epsilon(5, 1, true, 0.04), std::pow(0.04, 1.5), 1e-15);
  EXPECT_DOUBLE_EQ(case1_epsilon(7, 1, false, 0.1), 0.01);
  EXPECT_THROW(case1_epsilon(5, 1, false, 0.1), RegimeRefusal);
  EXPECT_THROW(case1_epsilon(7, 2, false, 0.1), RegimeRefusal);
  EXPECT_THROW(case1_epsilon(3, 1, false, 1.5), ConfigError);
}

TEST(Experiments, Case1ConstructionIsOrthogonalAndRecovered) {
  auto d = radial(3);
  const double lam = 0.1 * unit_ball_lambda1(3);
  auto r = build_case1_example(d, std::nullopt, ProjectionKind::PU2, lam, {BubbleParams::centered(3, 0.1)}, 3.0);
  EXPECT_LT(r.phi_ortho, 1e-10);
  EXPECT_NEAR(r.record.epsilon, 0.3, 1e-15);
  // the fit lands back on the construction, so d_* equals eps ||phi|| = eps
  EXPECT_NEAR(r.record.distance, r.record.epsilon, 1e-6 * r.record.epsilon);
  EXPECT_GT(r.record.gamma, 0);
  EXPECT_THROW(build_case1_example(d, std::nullopt, ProjectionKind::PU1, lam, {BubbleParams::centered(3, 0.1)}),
               RegimeRefusal);
}

TEST(Experiments, ProjectedProblemSatisfiesConstraint) {
  auto d = radial(5);
  auto r = solve_projected_problem(d, ProjectionKind::PU1, 0.5 * unit_ball_lambda1(5), 0.0125);
  EXPECT_LT(r.ortho_residual, 1e-8);
  EXPECT_TRUE(std::isfinite(r.multiplier));
  EXPECT_GT(r.record.gamma, 0);
  EXPECT_GE(r.u_star.values().minCoeff(), 0.0);
  EXPECT_THROW(solve_projected_problem(radial(3), ProjectionKind::PU1, 1.0, 0.05), ConfigError);
}

TEST(Experiments, ExpansionDefectShrinks) {
  auto d = radial(3);
  double prev = expansion_defect(d, ProjectionKind::PU1, 0, 0.2);
  for (double delta : {0.1, 0.05}) {
    double v = expansion_defect(d, ProjectionKind::PU1, 0, delta);
    EXPECT_LT(v, prev / 4);
    prev = v;
  }
  EXPECT_THROW(expansion_defect(radial(4), ProjectionKind::PU2, 1.0, 0.1), ConfigError);
}

TEST(Experiments, InteriorProjectionApproachesPrediction) {
  auto r = interior_projection_sweep(5, ProjectionKind::PU2, 0.5 * unit_ball_lambda1(5), {0.05, 0.025});
  ASSERT_EQ(r.size(), 2u);
  EXPECT_LT(std::abs(r[1].ratio() - 1), std::abs(r[0].ratio() - 1));
  EXPECT_LT(std::abs(r[1].ratio() - 1), 0.25);
}

TEST(Experiments, BalanceRadiusSolvesBalance) {
  const int n = 6;
  const double lam = 0.5 * unit_ball_lambda1(n), delta = 0.05;
  double r = balance_radius(n, lam, delta);
  auto sc = structural_constants(n);
  double lhs = sc.b.value * lam * delta * delta;
  double rhs = sc.c.value * std::pow(1 - r * r, 2.0 - n) * std::pow(delta, n - 2.0);
  EXPECT_NEAR(lhs, rhs, 1e-6 * lhs);
  // smaller scales push the balance point towards the boundary
  EXPECT_GT(balance_radius(n, lam, 0.02), r);
  EXPECT_THROW(balance_radius(4, lam, delta), RegimeRefusal);
}

TEST(Experiments, InterpolationIsExactOnLinearProfiles) {
  auto src = radial(3);
  Field f = Field::sample(src, [](std::span<const double> x) {
    double r = 0;
    for (double v : x) r += v * v;
    return 1 - std::sqrt(r);
  });
  auto dst = Discretization::make(DomainModel::ball(3), GridSpec::tensor(16));
  Field g = interpolate_radial(f, dst);
  for (size_t i = 0; i < dst->size(); ++i) {
    double r = 0;
    for (double v : dst->node(i)) r += v * v;
    EXPECT_NEAR(g[i], 1 - std::sqrt(r), 1e-12);
  }
}

TEST(Experiments, SweepRefusesBeforeSolving) {
  SweepConfig c;
  c.regime = parse_regime("n3-interior-u0zero-pu1");
  EXPECT_THROW(exponent_sweep(c), RegimeRefusal);
  c.regime = parse_regime("n3-interior-u0zero-pu2");
  c.lambda_fraction = 1.2;
  EXPECT_THROW(exponent_sweep(c), ConfigError);
  c.lambda_fraction = 0.1;
  c.deltas = {0.1, 0.05};
  EXPECT_THROW(exponent_sweep(c), ConfigError);
}

TEST(Experiments, BoundarySweepRecords) {
  auto recs = boundary_sweep(6, ProjectionKind::PU1, 0.5 * unit_ball_lambda1(6), {0.1, 0.05}, 2);
  ASSERT_EQ(recs.size(), 2u);
  for (auto& r : recs) {
    EXPECT_NEAR(r.deltas[0], r.dist_boundary * r.dist_boundary, 1e-15);
    EXPECT_NEAR(r.meas_dil / r.pred_dil, 1, 0.1);
  }
  EXPECT_THROW(boundary_sweep(3, ProjectionKind::PU1, 1.0, {0.1}, 2), ConfigError);
}
