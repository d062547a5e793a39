#include <gtest/gtest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <numbers>
#include <random>

#include "bubblelab/bubbles.hpp"
#include "bubblelab/errors.hpp"

using namespace bl;

namespace {

// Whole-space integral of a radial function, computed with Boost's tanh-sinh rule.
double radial_integral(int n, const std::function<double(double)>& f) {
  boost::math::quadrature::tanh_sinh<double> ts;
  double area = 2 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
  return area * ts.integrate(
                     [&](double r) {
                       double v = f(r) * std::pow(r, n - 1);
                       return std::isfinite(v) ? v : 0.0;
                     },
                     0.0, std::numeric_limits<double>::infinity());
}

std::vector<double> random_point(std::mt19937_64& g, int n, double scale) {
  std::uniform_real_distribution<double> u(-scale, scale);
  std::vector<double> x(static_cast<size_t>(n));
  for (auto& v : x) v = u(g);
  return x;
}

}  // namespace

TEST(Bubbles, DimensionalConstantsMatchClosedForms) {
  for (int n = 3; n <= 8; ++n) {
    EXPECT_DOUBLE_EQ(critical_exponent(n), (n + 2.0) / (n - 2.0));
    EXPECT_NEAR(dimensional_constant(n), std::pow(n * (n - 2.0), (n - 2.0) / 4.0), 1e-13);
    EXPECT_NEAR(sphere_area(n), 2 * std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0), 1e-12);
  }
  EXPECT_THROW(dimensional_constant(2), ConfigError);
}

TEST(Bubbles, SobolevConstantOracle) {
  // S = pi n (n-2) (Gamma(n/2) / Gamma(n))^{2/n}
  for (int n = 3; n <= 7; ++n) {
    double S = std::numbers::pi * n * (n - 2) * std::pow(std::tgamma(n / 2.0) / std::tgamma(n), 2.0 / n);
    EXPECT_NEAR(sobolev_constant_closed_form(n), S, 1e-12 * S);
    auto e = sobolev_energy(n);
    EXPECT_NEAR(e.S0, S, 1e-9 * S) << "n=" << n;
    EXPECT_LT(e.consistency, 1e-9);
    // Euler-Lagrange: int |grad U|^2 = int U^{2^*} = S^{n/2}
    EXPECT_NEAR(e.grad_sq, e.crit_norm, 1e-8 * e.crit_norm);
    double oracle = radial_integral(n, [&](double r) {
      return std::pow(bubble_radial(n, 1.0, r), critical_exponent(n) + 1);
    });
    EXPECT_NEAR(e.crit_norm, oracle, 1e-9 * oracle);
    EXPECT_NEAR(oracle, std::pow(S, n / 2.0), 1e-9 * oracle);
  }
}

TEST(Bubbles, SolvesTheCriticalEquation) {
  std::mt19937_64 g(11);
  for (int n = 3; n <= 6; ++n) {
    BubbleParams b(n, 0.3, random_point(g, n, 0.5));
    SampleSet s;
    for (int i = 0; i < 200; ++i) s.push_back(random_point(g, n, 2.0));
    double scale = std::pow(eval_bubble(b, b.xi), critical_exponent(n));
    EXPECT_LT(bubble_pde_residual(b, s), 1e-10 * scale);
    for (int k = 0; k <= n; ++k) EXPECT_LT(nondegeneracy_residual(b, k, s), 1e-9 * scale) << n << " " << k;
  }
}

TEST(Bubbles, ParameterDerivativesMatchFiniteDifferences) {
  std::mt19937_64 g(5);
  const double h = 1e-5;
  for (int n = 3; n <= 6; ++n)
    for (int trial = 0; trial < 20; ++trial) {
      BubbleParams b(n, 0.05 + 0.3 * std::uniform_real_distribution<double>(0, 1)(g), random_point(g, n, 0.5));
      auto x = random_point(g, n, 1.0);
      auto plus = b, minus = b;
      plus.delta *= 1 + h;
      minus.delta *= 1 - h;
      double fd0 = (eval_bubble(plus, x) - eval_bubble(minus, x)) / (2 * h);
      double ref = std::abs(eval_bubble(b, x)) + 1e-12;
      EXPECT_NEAR(eval_param_derivative(b, 0, x), fd0, 1e-6 * ref);
      for (int k = 1; k <= n; ++k) {
        plus = b;
        minus = b;
        plus.xi[static_cast<size_t>(k - 1)] += h * b.delta;
        minus.xi[static_cast<size_t>(k - 1)] -= h * b.delta;
        double fd = (eval_bubble(plus, x) - eval_bubble(minus, x)) / (2 * h);
        EXPECT_NEAR(eval_param_derivative(b, k, x), fd, 1e-6 * ref);
      }
    }
}

TEST(Bubbles, LaplacianMatchesFiniteDifferences) {
  std::mt19937_64 g(3);
  for (int n = 3; n <= 5; ++n) {
    BubbleParams b(n, 0.4, random_point(g, n, 0.3));
    auto x = random_point(g, n, 1.0);
    const double h = 1e-4;
    double lap = 0;
    for (int k = 0; k < n; ++k) {
      auto xp = x, xm = x;
      xp[static_cast<size_t>(k)] += h;
      xm[static_cast<size_t>(k)] -= h;
      lap += (eval_bubble(b, xp) - 2 * eval_bubble(b, x) + eval_bubble(b, xm)) / (h * h);
    }
    EXPECT_NEAR(bubble_laplacian(b, x), lap, 1e-5 * std::abs(lap) + 1e-6);
  }
}

TEST(Bubbles, RadialFormsAgreeWithGeneral) {
  for (int n = 3; n <= 6; ++n)
    for (double r : {0.0, 0.01, 0.3, 1.0}) {
      auto b = BubbleParams::centered(n, 0.2);
      std::vector<double> x(static_cast<size_t>(n), 0.0);
      x[0] = r;
      EXPECT_NEAR(bubble_radial(n, 0.2, r), eval_bubble(b, x), 1e-13 * eval_bubble(b, x));
      EXPECT_NEAR(dilation_radial(n, 0.2, r), eval_param_derivative(b, 0, x), 1e-12 * eval_bubble(b, x));
    }
}

TEST(Bubbles, RejectsBadParameters) {
  EXPECT_THROW(BubbleParams(3, -1.0, {0, 0, 0}), ConfigError);
  EXPECT_THROW(BubbleParams(3, 0.1, {0, 0}), ConfigError);
}
