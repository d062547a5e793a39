#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <random>
#include <sstream>

#include "bubblelab/decomposition.hpp"
#include "bubblelab/errors.hpp"
#include "bubblelab/interaction.hpp"

using namespace bl;

namespace {

DiscPtr radial3() {
  static DiscPtr d = Discretization::make(DomainModel::ball(3), GridSpec::radial());
  return d;
}

DiscPtr grid3(int m) { return Discretization::make(DomainModel::ball(3), GridSpec::tensor(m)); }

Field sum_of_projections(const DiscPtr& d, ProjectionKind kind, double lam, const std::vector<BubbleParams>& bs) {
  Projector P(d, kind, lam);
  Field s(d);
  for (auto& b : bs) s = s + P.bubble(b);
  return s;
}

}  // namespace

TEST(Decomposition, RadialZeroResidualRoundTrip) {
  auto d = radial3();
  const double lam = 0.2 * unit_ball_lambda1(3);
  for (auto kind : {ProjectionKind::PU1, ProjectionKind::PU2}) {
    Field u = sum_of_projections(d, kind, lam, {BubbleParams::centered(3, 0.1)});
    auto s = fit(u, std::nullopt, {BubbleParams::centered(3, 0.13)}, kind, lam);
    EXPECT_TRUE(s.converged);
    EXPECT_NEAR(s.bubbles[0].delta, 0.1, 1e-8);
    EXPECT_LT(s.distance, 1e-8);
  }
}

TEST(Decomposition, ResidualIsOrthogonalAfterFit) {
  auto d = radial3();
  const double lam = 0.3 * unit_ball_lambda1(3);
  // u = PU + smooth bump, so the residual is nonzero
  Field bump = Field::sample(d, [](std::span<const double> x) { return 0.05 * (1 - x[0] * x[0]); });
  Field u = sum_of_projections(d, ProjectionKind::PU2, lam, {BubbleParams::centered(3, 0.08)}) + bump;
  auto s = fit(u, std::nullopt, {BubbleParams::centered(3, 0.1)}, ProjectionKind::PU2, lam);
  EXPECT_TRUE(s.converged);
  EXPECT_GT(s.distance, 0);
  EXPECT_LE(s.ortho_max(), 1e-6);
  // u = sigma + rho exactly
  EXPECT_LT((s.sigma.values() + s.rho.values() - u.values()).lpNorm<Eigen::Infinity>(), 1e-12);
}

TEST(Decomposition, ErrorFieldIdentity) {
  // |w+rho|^{p-1}(w+rho) = |u0|^{p-1}u0 + sum |PU_i|^{p-1}PU_i + p|w|^{p-1}rho + I0 + I1 + I2
  auto d = grid3(16);
  const double lam = 0.4 * unit_ball_lambda1(3);
  std::vector<BubbleParams> bs{BubbleParams(3, 0.2, {-0.3, 0, 0}), BubbleParams(3, 0.15, {0.3, 0.1, 0})};
  Field u0 = Field::sample(d, [](std::span<const double> x) { return 0.3 * (1 - x[0] * x[0] - x[1] * x[1] - x[2] * x[2]); });
  Field rho = Field::sample(d, [](std::span<const double> x) { return 0.02 * std::sin(3 * x[0]) * (1 - x[0] * x[0]); });
  Field sigma = sum_of_projections(d, ProjectionKind::PU1, lam, bs);
  Field u = u0 + sigma + rho;
  auto s = evaluate_configuration(u, u0, bs, ProjectionKind::PU1, lam);
  EXPECT_LT((s.rho.values() - rho.values()).lpNorm<Eigen::Infinity>(), 1e-12);
  auto e = assemble_error_fields(s, lam);
  const double p = critical_exponent(3);
  Projector P(d, ProjectionKind::PU1, lam);
  std::vector<Field> pu;
  for (auto& b : bs) pu.push_back(P.bubble(b));
  auto sp = [p](double v) { return std::copysign(std::pow(std::abs(v), p), v); };
  for (size_t i = 0; i < d->size(); ++i) {
    double w = u0[i] + sigma[i];
    double lhs = sp(w + rho[i]);
    double rhs = sp(u0[i]) + sp(pu[0][i]) + sp(pu[1][i]) + p * std::pow(std::abs(w), p - 1) * rho[i] + e.I0[i] +
                 e.I1[i] + e.I2[i];
    EXPECT_NEAR(lhs, rhs, 1e-10 * (1 + std::abs(lhs)));
  }
}

TEST(Decomposition, SingleBubbleWithoutU0HasNoInteractionTerms) {
  auto d = radial3();
  Field u = sum_of_projections(d, ProjectionKind::PU1, 0.0, {BubbleParams::centered(3, 0.1)});
  auto s = evaluate_configuration(u, std::nullopt, {BubbleParams::centered(3, 0.1)}, ProjectionKind::PU1, 0.0);
  auto e = assemble_error_fields(s, 0.0);
  EXPECT_EQ(e.I1.values().lpNorm<Eigen::Infinity>(), 0.0);
  EXPECT_LT(e.I2.values().lpNorm<Eigen::Infinity>(), 1e-9 * std::pow(u.values().maxCoeff(), 5));
  EXPECT_LT(e.I0.values().lpNorm<Eigen::Infinity>(), 1e-6);
}

TEST(Decomposition, PermutationInvariance) {
  auto d = grid3(20);
  const double lam = 0.5 * unit_ball_lambda1(3);
  std::vector<BubbleParams> bs{BubbleParams(3, 0.2, {-0.35, 0, 0}), BubbleParams(3, 0.15, {0.35, 0, 0})};
  Field u = sum_of_projections(d, ProjectionKind::PU2, lam, bs) +
            Field::sample(d, [](std::span<const double> x) { return 0.01 * (1 - x[0] * x[0] - x[1] * x[1] - x[2] * x[2]); });
  auto a = evaluate_configuration(u, std::nullopt, bs, ProjectionKind::PU2, lam);
  std::vector<BubbleParams> rev{bs[1], bs[0]};
  auto b = evaluate_configuration(u, std::nullopt, rev, ProjectionKind::PU2, lam);
  EXPECT_NEAR(a.distance, b.distance, 1e-12 * a.distance);
  EXPECT_NEAR(a.ortho_residuals[0][0], b.ortho_residuals[1][0], 1e-12);
  canonical_order(rev);
  EXPECT_EQ(rev[0].delta, 0.15);
}

TEST(Decomposition, GridFitRecoversTwoBubbles) {
  auto d = grid3(24);
  const double lam = 0.5 * unit_ball_lambda1(3);
  std::vector<BubbleParams> truth{BubbleParams(3, 0.2, {-0.35, 0, 0}), BubbleParams(3, 0.2, {0.35, 0, 0})};
  Field u = sum_of_projections(d, ProjectionKind::PU2, lam, truth);
  std::vector<BubbleParams> init{BubbleParams(3, 0.22, {-0.32, 0.02, 0}), BubbleParams(3, 0.18, {0.37, 0, -0.02})};
  auto s = fit(u, std::nullopt, init, ProjectionKind::PU2, lam);
  ASSERT_TRUE(s.converged);
  canonical_order(s.bubbles);
  for (size_t i = 0; i < 2; ++i) {
    auto& b = s.bubbles[i];
    auto& t = b.xi[0] < 0 ? truth[0] : truth[1];
    EXPECT_NEAR(b.delta, t.delta, 1e-6);
    for (size_t k = 0; k < 3; ++k) EXPECT_NEAR(b.xi[k], t.xi[k], 1e-6);
  }
}

TEST(Decomposition, PreconditionsAreEnforced) {
  auto d = radial3();
  Field u = sum_of_projections(d, ProjectionKind::PU1, 0.0, {BubbleParams::centered(3, 0.1)});
  EXPECT_THROW(fit(u, std::nullopt, {BubbleParams::centered(3, 0.4)}, ProjectionKind::PU1, 0.0), ConfigError);
  EXPECT_THROW(fit(u, std::nullopt, {}, ProjectionKind::PU1, 0.0), ConfigError);
  EXPECT_THROW(fit(u, std::nullopt, {BubbleParams::centered(3, 0.1), BubbleParams::centered(3, 0.1)},
                   ProjectionKind::PU1, 0.0),
               ConfigError);
  auto g = grid3(16);
  Field v(g);
  // q > 1/2 is impossible in n = 3 (q <= 2^{-1/2}); use nearly coincident bubbles
  EXPECT_THROW(fit(v + sum_of_projections(g, ProjectionKind::PU1, 0.0, {BubbleParams(3, 0.1, {0, 0, 0})}),
                   std::nullopt, {BubbleParams(3, 0.1, {0, 0, 0}), BubbleParams(3, 0.1, {0.01, 0, 0})},
                   ProjectionKind::PU1, 0.0),
               ConfigError);
}

TEST(Decomposition, MultistartGridIsDeterministic) {
  auto d = grid3(16);
  auto a = multistart_grid(*d, 2, 6, 42), b = multistart_grid(*d, 2, 6, 42), c = multistart_grid(*d, 2, 6, 43);
  ASSERT_EQ(a.size(), 6u);
  bool differs = false;
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < 2; ++j) {
      EXPECT_EQ(a[i][j].delta, b[i][j].delta);
      EXPECT_EQ(a[i][j].xi, b[i][j].xi);
      differs = differs || a[i][j].xi != c[i][j].xi || a[i][j].delta != c[i][j].delta;
      EXPECT_LE(a[i][j].delta, 0.5 * d->domain().distance_to_boundary(a[i][j].xi));
    }
  EXPECT_TRUE(differs);
  for (auto& s : a) EXPECT_LE(pair_quantities(s[0], s[1]).q, 0.5);
  EXPECT_THROW(multistart_grid(*d, 4, 6, 1), ConfigError);
}

TEST(Decomposition, MultistartIndependentOfThreadCount) {
  auto d = radial3();
  const double lam = 0.2 * unit_ball_lambda1(3);
  Field u = sum_of_projections(d, ProjectionKind::PU2, lam, {BubbleParams::centered(3, 0.07)});
  setenv("BUBBLELAB_THREADS", "1", 1);
  auto a = fit_multistart(u, std::nullopt, 1, ProjectionKind::PU2, lam, 3, 5);
  setenv("BUBBLELAB_THREADS", "4", 1);
  auto b = fit_multistart(u, std::nullopt, 1, ProjectionKind::PU2, lam, 3, 5);
  unsetenv("BUBBLELAB_THREADS");
  ASSERT_EQ(a.starts.size(), b.starts.size());
  EXPECT_EQ(a.best, b.best);
  for (size_t i = 0; i < a.starts.size(); ++i) {
    EXPECT_EQ(a.starts[i].distance, b.starts[i].distance);
    EXPECT_EQ(a.starts[i].bubbles[0].delta, b.starts[i].bubbles[0].delta);
  }
  std::ostringstream x, y;
  write_fit_report_csv(x, a);
  write_fit_report_csv(y, b);
  EXPECT_EQ(x.str(), y.str());
  EXPECT_EQ(x.str().rfind("start,converged,distance,delta_1,xi_1_1,xi_1_2,xi_1_3,ortho_max\n", 0), 0u);
  EXPECT_NEAR(a.starts[a.best].bubbles[0].delta, 0.07, 1e-7);
}

TEST(Decomposition, DistanceFunctionalIsZeroOnTheManifold) {
  auto d = radial3();
  Field u = sum_of_projections(d, ProjectionKind::PU1, 0.0, {BubbleParams::centered(3, 0.12)});
  EXPECT_LT(distance_functional(u, std::nullopt, 1, ProjectionKind::PU1, 0.0, 3, 1), 1e-8);
}
