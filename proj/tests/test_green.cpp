#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bubblelab/bubbles.hpp"
#include "bubblelab/domain.hpp"
#include "bubblelab/elliptic.hpp"
#include "bubblelab/errors.hpp"
#include "bubblelab/green.hpp"

using namespace bl;

namespace {

// Radial Laplacian by central differences.
double radial_laplacian(int n, const std::function<double(double)>& f, double r, double h) {
  double d2 = (f(r + h) - 2 * f(r) + f(r - h)) / (h * h);
  double d1 = (f(r + h) - f(r - h)) / (2 * h);
  return d2 + (n - 1) / r * d1;
}

}  // namespace

TEST(Green, ShiftedGreenFunctionBallThreeSolvesOde) {
  // G(r) = 1/r - lambda r / 2 - H(r) solves (Delta + lambda) G = 0 for r > 0 and G(1) = 0.
  for (double frac : {0.1, 0.25, 0.6}) {
    double lam = frac * unit_ball_lambda1(3);
    auto G = [&](double r) { return 1 / r - 0.5 * lam * r - shifted_regular_part_ball3(lam, r); };
    EXPECT_NEAR(G(1.0), 0.0, 1e-12);
    for (double r : {0.2, 0.5, 0.8}) {
      double res = radial_laplacian(3, G, r, 1e-4) + lam * G(r);
      EXPECT_NEAR(res, 0.0, 1e-5 * (1 / r));
    }
    EXPECT_NEAR(robin_shifted_center(3, lam), shifted_regular_part_ball3(lam, 0.0), 1e-12);
  }
}

TEST(Green, CentreRobinVanishesAtQuarterEigenvalue) {
  double l1 = unit_ball_lambda1(3);
  EXPECT_NEAR(robin_shifted_center(3, 0.25 * l1), 0.0, 1e-12);
  EXPECT_GT(robin_shifted_center(3, 0.2 * l1), 0.0);
  EXPECT_LT(robin_shifted_center(3, 0.3 * l1), 0.0);
}

TEST(Green, CentreRobinLimits) {
  // As lambda -> 0 the shifted value tends to the Laplace value 1.
  for (int n : {3, 4, 5}) EXPECT_NEAR(robin_shifted_center(n, 1e-8), 1.0, 1e-4) << n;
  EXPECT_THROW(robin_shifted_center(3, unit_ball_lambda1(3)), ConfigError);
  EXPECT_THROW(robin_shifted_center(6, 1.0), ConfigError);
}

TEST(Green, CentreRobinFiveMatchesBoundaryValueProblem) {
  // With G = r^{-3} + (lambda/2) r^{-1} - H, the regular part solves
  // (r^4 H')' + lambda r^4 H = (lambda^2 / 2) r^3, H'(0) = 0, H(1) = 1 + lambda/2.
  // Finite volumes on a uniform grid, tridiagonal solve.
  for (double frac : {0.2, 0.6}) {
    const double lam = frac * unit_ball_lambda1(5);
    const int N = 20000;
    const double h = 1.0 / N;
    std::vector<double> lo(N), di(N), up(N), rhs(N);
    auto r4 = [](double r) { return r * r * r * r; };
    for (int i = 0; i < N; ++i) {
      double r = i * h;
      double rm = std::max(0.0, r - h / 2), rp = r + h / 2;
      double vol = (std::pow(rp, 5) - std::pow(rm, 5)) / 5;
      double src = lam * lam / 2 * (r4(rp) - r4(rm)) / 4;  // int r^3
      lo[i] = i > 0 ? r4(rm) / h : 0;
      up[i] = r4(rp) / h;
      di[i] = -(lo[i] + up[i]) + lam * vol;
      rhs[i] = src;
    }
    rhs[N - 1] -= up[N - 1] * (1 + lam / 2);
    for (int i = 1; i < N; ++i) {
      double m = lo[i] / di[i - 1];
      di[i] -= m * up[i - 1];
      rhs[i] -= m * rhs[i - 1];
    }
    std::vector<double> H(N);
    H[N - 1] = rhs[N - 1] / di[N - 1];
    for (int i = N - 2; i >= 0; --i) H[i] = (rhs[i] - up[i] * H[i + 1]) / di[i];
    EXPECT_NEAR(H[0], robin_shifted_center(5, lam), 1e-3 * std::abs(H[0])) << frac;
  }
}

TEST(Green, HelmholtzRobinOnGridMatchesCentreValue) {
  double lam = 0.5 * unit_ball_lambda1(3);
  std::vector<double> y{0.0, 0.0, 0.0};
  auto h = robin_shifted_ball3(lam, y, 32);
  EXPECT_NEAR(h.value, robin_shifted_center(3, lam), 2e-2);
  EXPECT_NEAR(h.laplace, 1.0, 1e-12);
}

TEST(Green, DnProfileMatchesClosedForm) {
  for (double lam : {1.0, 5.0}) {
    DnProfile D(3, lam);
    for (double z : {1e-3, 0.1, 1.0, 10.0, 100.0}) {
      double exact = dn3_closed_form(lam, z);
      EXPECT_NEAR(D(z), exact, 1e-6 * std::abs(exact) + 1e-9) << z;
    }
  }
}

TEST(Green, Dn3ClosedFormSolvesItsEquation) {
  // -Delta D = lambda a_3 ((1+z^2)^{-1/2} - 1/z)
  const double lam = 2.0, a = dimensional_constant(3);
  auto D = [&](double z) { return dn3_closed_form(lam, z); };
  for (double z : {0.05, 0.5, 2.0, 20.0}) {
    double lhs = -radial_laplacian(3, D, z, 1e-3 * z);
    double rhs = lam * a * (1 / std::sqrt(1 + z * z) - 1 / z);
    EXPECT_NEAR(lhs, rhs, 1e-5 * std::abs(rhs)) << z;
  }
  // no jump at the series switch-over: the difference quotient there is the slope lambda a / 2
  double q = (dn3_closed_form(lam, 1.01e-4) - dn3_closed_form(lam, 0.99e-4)) / 2e-6;
  EXPECT_NEAR(q, 0.5 * lam * a, 1e-3 * lam * a);
}

TEST(Green, DnProfileDecays) {
  for (int n : {4, 5}) {
    DnProfile D(n, 3.0);
    EXPECT_LT(std::abs(D(1e4)), 1e-2 * std::abs(D(1.0)));
  }
  EXPECT_THROW(DnProfile(6, 1.0), ConfigError);
}

TEST(Green, BallHarmonicExtensionProperties) {
  std::mt19937_64 g(2);
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  for (int n : {3, 4, 5}) {
    for (int t = 0; t < 10; ++t) {
      std::vector<double> x(static_cast<size_t>(n)), y(static_cast<size_t>(n));
      for (auto& v : x) v = u(g);
      for (auto& v : y) v = u(g);
      // symmetry
      double hxy = ball_harmonic_extension_H(n, y, x), hyx = ball_harmonic_extension_H(n, x, y);
      EXPECT_NEAR(hxy, hyx, 1e-12 * hxy);
      // harmonic in x
      const double h = 1e-3;
      double lap = 0;
      for (int k = 0; k < n; ++k) {
        auto xp = x, xm = x;
        xp[static_cast<size_t>(k)] += h;
        xm[static_cast<size_t>(k)] -= h;
        lap += (ball_harmonic_extension_H(n, y, xp) - 2 * hxy + ball_harmonic_extension_H(n, y, xm)) / (h * h);
      }
      EXPECT_NEAR(lap, 0.0, 1e-4 * hxy);
      // boundary values equal |x - y|^{2-n}
      std::vector<double> s = x;
      double nx = 0;
      for (double v : s) nx += v * v;
      nx = std::sqrt(nx);
      for (auto& v : s) v /= nx;
      double d2 = 0;
      for (int k = 0; k < n; ++k) d2 += (s[static_cast<size_t>(k)] - y[static_cast<size_t>(k)]) *
                                        (s[static_cast<size_t>(k)] - y[static_cast<size_t>(k)]);
      EXPECT_NEAR(ball_harmonic_extension_H(n, y, s), std::pow(d2, 0.5 * (2 - n)), 1e-10);
    }
    std::vector<double> x(static_cast<size_t>(n), 0.0);
    x[0] = 0.7;
    EXPECT_NEAR(robin_laplace_ball(n, x), std::pow(1 - 0.49, 2.0 - n), 1e-12);
  }
}
