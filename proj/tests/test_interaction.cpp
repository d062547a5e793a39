#include <gtest/gtest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <random>
#include <sstream>

#include "bubblelab/errors.hpp"
#include "bubblelab/interaction.hpp"

using namespace bl;

namespace {

// |S^{n-1}| int_0^inf f(r) r^{n-1} dr by tanh-sinh, independent of the library quadrature.
double whole_space(int n, const std::function<double(double)>& f) {
  boost::math::quadrature::tanh_sinh<double> ts;
  return sphere_area(n) * ts.integrate(
                              [&](double r) {
                                double v = f(r) * std::pow(r, n - 1);
                                return std::isfinite(v) ? v : 0.0;
                              },
                              0.0, std::numeric_limits<double>::infinity());
}

double U(int n, double r) { return dimensional_constant(n) * std::pow(1 + r * r, -0.5 * (n - 2)); }
// delta dU/ddelta at delta = 1
double Z0(int n, double r) {
  return dimensional_constant(n) * 0.5 * (n - 2) * (r * r - 1) * std::pow(1 + r * r, -0.5 * n);
}

}  // namespace

TEST(Interaction, StructuralConstantOracles) {
  for (int n = 3; n <= 7; ++n) {
    const double p = critical_exponent(n);
    double iz = whole_space(n, [&](double r) { return std::pow(U(n, r), p - 1) * Z0(n, r); });
    auto s = structural_constants(n);
    EXPECT_NEAR(s.int_up_z0.value, iz, 1e-9 * std::abs(iz)) << n;
    EXPECT_NEAR(s.a.value, p * iz, 1e-9 * std::abs(iz)) << n;
    EXPECT_NEAR(s.c.value, dimensional_constant(n) * s.a.value, 1e-9 * s.c.value);
    if (n >= 5) {
      double b = whole_space(n, [&](double r) { return U(n, r) * Z0(n, r); });
      EXPECT_NEAR(s.b.value, b, 1e-8 * b) << n;
      EXPECT_NEAR(constant_b(n), b, 1e-8 * b);
    }
  }
  EXPECT_THROW(constant_b(4), RegimeRefusal);
  EXPECT_THROW(constant_b(3), RegimeRefusal);
}

TEST(Interaction, ConstantsAreDefinedWhereExpected) {
  EXPECT_TRUE(structural_constants(3).b3.defined);
  EXPECT_FALSE(structural_constants(3).b.defined);
  EXPECT_TRUE(structural_constants(4).b4.defined);
  EXPECT_TRUE(structural_constants(5).bbar5.defined);
  for (int n = 3; n <= 7; ++n) {
    auto s = structural_constants(n);
    EXPECT_GT(s.a.value - 3 * s.a.error, 0);
    EXPECT_GT(s.e.value - 3 * s.e.error, 0);
  }
}

TEST(Interaction, PairQuantitiesProperties) {
  std::mt19937_64 g(9);
  std::uniform_real_distribution<double> u(-0.5, 0.5), s(0.01, 0.4);
  for (int n = 3; n <= 6; ++n)
    for (int t = 0; t < 50; ++t) {
      BubbleParams a(n, s(g), std::vector<double>(static_cast<size_t>(n))),
          b(n, s(g), std::vector<double>(static_cast<size_t>(n)));
      for (auto& v : a.xi) v = u(g);
      for (auto& v : b.xi) v = u(g);
      auto ab = pair_quantities(a, b), ba = pair_quantities(b, a);
      EXPECT_NEAR(ab.q, ba.q, 1e-14);
      EXPECT_NEAR(ab.R, ba.R, 1e-12 * ab.R);
      // q <= 2^{-(n-2)/2}, equality for coincident bubbles
      EXPECT_LE(ab.q, std::pow(2.0, -0.5 * (n - 2)) * (1 + 1e-14));
      EXPECT_GE(ab.R, 1.0);
    }
  auto c = pair_quantities(BubbleParams(3, 0.1, {0, 0, 0}), BubbleParams(3, 0.1, {0, 0, 0}));
  EXPECT_NEAR(c.q, std::pow(2.0, -0.5), 1e-15);
  auto far = pair_quantities(BubbleParams(3, 0.1, {0, 0, 0}), BubbleParams(3, 0.1, {0.9, 0, 0}));
  EXPECT_EQ(far.regime, PairRegime::DistanceDominated);
  EXPECT_THROW(pair_quantities(BubbleParams(3, 0.1, {0, 0, 0}), BubbleParams(4, 0.1, {0, 0, 0, 0})), ConfigError);
}

TEST(Interaction, BubbleLpNormWholeSpace) {
  for (int n : {3, 5}) {
    double s = critical_exponent(n) + 1;
    auto r = bubble_lp_norm(BubbleParams::centered(n, 0.3), nullptr, s);
    double S = sobolev_constant_closed_form(n);
    EXPECT_NEAR(r.value, std::pow(S, n / 2.0), 1e-8 * r.value);
  }
}

TEST(Interaction, MonteCarloIsDeterministicAndUnbiased) {
  // int_{R^3} U^6 = S^{3/2}
  const int n = 3;
  FnN f = [&](std::span<const double> x) {
    double r2 = 0;
    for (double v : x) r2 += v * v;
    return std::pow(U(n, std::sqrt(r2)), 6);
  };
  std::vector<Proposal> mix{{{0, 0, 0}, 1.0}};
  auto a = mc_integrate(n, f, mix, 40000, 17), b = mc_integrate(n, f, mix, 40000, 17);
  EXPECT_EQ(a.value, b.value);
  double exact = std::pow(sobolev_constant_closed_form(3), 1.5);
  EXPECT_LT(std::abs(a.value - exact), 5 * a.stderr_ + 1e-12);
  EXPECT_GT(a.stderr_, 0);
}

TEST(Interaction, ConstantsCsvHasHeader) {
  std::ostringstream os;
  write_constants_csv(os, {5});
  EXPECT_EQ(os.str().rfind("constant,n,value,stderr,method\n", 0), 0u);
}

TEST(Interaction, ProjectionPredictionRefusesOutsideHypotheses) {
  ProjectionConfig c;
  c.n = 3;
  c.kind = ProjectionKind::PU1;
  c.lambda = 0.5 * unit_ball_lambda1(3);
  c.xi = {0, 0, 0};
  EXPECT_THROW(projection_prediction(c), RegimeRefusal);
}
