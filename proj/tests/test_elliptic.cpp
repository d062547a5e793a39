#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "bubblelab/elliptic.hpp"
#include "bubblelab/errors.hpp"
#include "bubblelab/experiments.hpp"

using namespace bl;

namespace {

DiscPtr radial(int n) { return Discretization::make(DomainModel::ball(n), GridSpec::radial()); }

// First zeros of J_{n/2-1}, tabulated.
double bessel_zero(int n) {
  switch (n) {
    case 3: return std::numbers::pi;
    case 4: return 3.8317059702075123;
    case 5: return 4.4934094579090642;
    case 6: return 5.1356223018406826;
    default: return 0;
  }
}

}  // namespace

TEST(Elliptic, BallEigenvalueOracle) {
  for (int n = 3; n <= 6; ++n) {
    double j = bessel_zero(n);
    EXPECT_NEAR(unit_ball_lambda1(n), j * j, 1e-10);
    EXPECT_NEAR(continuous_lambda1(DomainModel::ball(n, 2.0)), j * j / 4, 1e-10);
  }
  auto box = DomainModel::box({{0, 1}, {0, 2}, {-1, 1}});
  double pi2 = std::numbers::pi * std::numbers::pi;
  EXPECT_NEAR(continuous_lambda1(box), pi2 * (1 + 0.25 + 0.25), 1e-10);
}

TEST(Elliptic, DiscreteEigenvalueConverges) {
  for (int n : {3, 5}) {
    double l = discrete_lambda1(radial(n));
    EXPECT_NEAR(l / unit_ball_lambda1(n), 1.0, 1e-4) << n;
  }
  double l3 = discrete_lambda1(Discretization::make(DomainModel::ball(3), GridSpec::tensor(24)));
  EXPECT_NEAR(l3 / unit_ball_lambda1(3), 1.0, 0.05);
}

TEST(Elliptic, ManufacturedSolutionRadial) {
  // -Delta (1 - r^2) = 2n on the unit ball
  for (int n : {3, 4, 5}) {
    auto d = radial(n);
    Field rhs = Field::sample(d, [&](std::span<const double>) { return 2.0 * n; });
    Field u = solve_dirichlet(OperatorSpec::laplace(), rhs);
    double err = 0;
    for (size_t i = 0; i < d->size(); ++i) {
      double r = d->node(i)[0];
      err = std::max(err, std::abs(u[i] - (1 - r * r)));
    }
    EXPECT_LT(err, 1e-5) << n;
  }
}

TEST(Elliptic, ProjectionKindParsing) {
  EXPECT_EQ(parse_projection_kind("pu1"), ProjectionKind::PU1);
  EXPECT_EQ(parse_projection_kind("pu2"), ProjectionKind::PU2);
  EXPECT_STREQ(to_string(ProjectionKind::PU2), "pu2");
  EXPECT_THROW(parse_projection_kind("pu3"), ConfigError);
}

TEST(Elliptic, CentreProjectionExact) {
  for (int n : {3, 4, 5})
    for (double delta : {0.2, 0.05}) EXPECT_LT(centre_projection_error(radial(n), delta), 1e-12);
}

TEST(Elliptic, ProjectionStaysBetweenZeroAndBubble) {
  for (int n : {3, 5}) {
    auto d = radial(n);
    for (auto kind : {ProjectionKind::PU1, ProjectionKind::PU2}) {
      double lam = kind == ProjectionKind::PU1 ? 0.0 : 0.1 * unit_ball_lambda1(n);
      Projector P(d, kind, lam);
      auto b = BubbleParams::centered(n, 0.1);
      Field pu = P.bubble(b);
      EXPECT_EQ(P.last_postcondition_slack(), 0.0);
      for (size_t i = 0; i < d->size(); ++i) {
        double U = eval_bubble(b, d->node(i));
        EXPECT_GE(pu[i], 0.0);
        if (kind == ProjectionKind::PU1) EXPECT_LE(pu[i], U * (1 + 1e-12));
      }
    }
  }
}

TEST(Elliptic, DerivativeIsExactDerivativeOfProjection) {
  // Discrete PZ^0 is the delta-derivative of the discrete PU.
  auto d = radial(3);
  const double lam = 0.2 * unit_ball_lambda1(3);
  for (auto kind : {ProjectionKind::PU1, ProjectionKind::PU2}) {
    Projector P(d, kind, lam);
    auto b = BubbleParams::centered(3, 0.1);
    const double h = 1e-5;
    auto bp = b, bm = b;
    bp.delta *= 1 + h;
    bm.delta *= 1 - h;
    Eigen::VectorXd fd = (P.bubble(bp).values() - P.bubble(bm).values()) / (2 * h);
    Eigen::VectorXd z = P.derivative(b, 0).values();
    EXPECT_LT((fd - z).lpNorm<Eigen::Infinity>(), 1e-7 * z.lpNorm<Eigen::Infinity>());
  }
}

TEST(Elliptic, TranslationDerivativeOnGrid) {
  auto d = Discretization::make(DomainModel::ball(3), GridSpec::tensor(16));
  Projector P(d, ProjectionKind::PU1, 0.0);
  BubbleParams b(3, 0.2, {0.1, -0.05, 0.0});
  const double h = 1e-5;
  for (int k = 1; k <= 3; ++k) {
    auto bp = b, bm = b;
    bp.xi[static_cast<size_t>(k - 1)] += h * b.delta;
    bm.xi[static_cast<size_t>(k - 1)] -= h * b.delta;
    Eigen::VectorXd fd = (P.bubble(bp).values() - P.bubble(bm).values()) / (2 * h);
    Eigen::VectorXd z = P.derivative(b, k).values();
    EXPECT_LT((fd - z).lpNorm<Eigen::Infinity>(), 1e-6 * z.lpNorm<Eigen::Infinity>()) << k;
  }
}

TEST(Elliptic, ShiftedProjectionNeedsLambdaBelowEigenvalue) {
  auto d = radial(3);
  EXPECT_THROW(Projector(d, ProjectionKind::PU2, 1.1 * unit_ball_lambda1(3)), ConfigError);
  EXPECT_THROW(Projector(d, ProjectionKind::PU2, -1.0), ConfigError);
}

TEST(Elliptic, EnergyInnerIsSymmetric) {
  auto d = radial(4);
  Eigen::VectorXd u = Eigen::VectorXd::Random(static_cast<long>(d->size()));
  Eigen::VectorXd v = Eigen::VectorXd::Random(static_cast<long>(d->size()));
  double lam = 0.3 * unit_ball_lambda1(4);
  double a = energy_inner(*d, lam, u, v), b = energy_inner(*d, lam, v, u);
  EXPECT_NEAR(a, b, 1e-10 * std::abs(a));
  EXPECT_GT(energy_inner(*d, lam, u, u), 0.0);
}
