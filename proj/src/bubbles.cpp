#include "bubblelab/bubbles.hpp"

#include <cmath>
#include <numbers>

#include "bubblelab/errors.hpp"
#include "bubblelab/quadrature.hpp"

namespace bl {

namespace {

void check_dim(int n) {
  if (n < 3) throw ConfigError("dimension must be at least 3");
}

double sq_dist(const BubbleParams& b, std::span<const double> x) {
  if (static_cast<int>(x.size()) != b.n) throw ConfigError("point dimension does not match bubble");
  double s = 0;
  for (int i = 0; i < b.n; ++i) {
    double d = x[i] - b.xi[i];
    s += d * d;
  }
  return s;
}

}  // namespace

double critical_exponent(int n) {
  check_dim(n);
  return (n + 2.0) / (n - 2.0);
}

double dimensional_constant(int n) {
  check_dim(n);
  return std::pow(n * (n - 2.0), (n - 2.0) / 4.0);
}

double sphere_area(int n) {
  return 2.0 * std::pow(std::numbers::pi, n / 2.0) / std::tgamma(n / 2.0);
}

double sobolev_constant_closed_form(int n) {
  check_dim(n);
  return n * (n - 2.0) / 4.0 * std::pow(sphere_area(n + 1), 2.0 / n);
}

BubbleParams::BubbleParams(int n_, double delta_, std::vector<double> xi_)
    : n(n_), delta(delta_), xi(std::move(xi_)) {
  check_dim(n);
  if (!(delta > 0) || !std::isfinite(delta)) throw ConfigError("bubble scale must be positive");
  if (static_cast<int>(xi.size()) != n) throw ConfigError("bubble centre has wrong dimension");
  for (double v : xi)
    if (!std::isfinite(v)) throw ConfigError("bubble centre must be finite");
}

BubbleParams BubbleParams::centered(int n, double delta) {
  return BubbleParams(n, delta, std::vector<double>(n, 0.0));
}

double bubble_radial(int n, double delta, double r) {
  return dimensional_constant(n) * std::pow(delta / (delta * delta + r * r), (n - 2) / 2.0);
}

double dilation_radial(int n, double delta, double r) {
  // factored form avoids cancellation near r = delta
  double s = delta * delta + r * r;
  return 0.5 * (n - 2) * bubble_radial(n, delta, r) * (r - delta) * (r + delta) / s;
}

double eval_bubble(const BubbleParams& b, std::span<const double> x) {
  return bubble_radial(b.n, b.delta, std::sqrt(sq_dist(b, x)));
}

double eval_param_derivative(const BubbleParams& b, int k, std::span<const double> x) {
  if (k < 0 || k > b.n) throw ConfigError("derivative index out of range");
  double r2 = sq_dist(b, x);
  double s = b.delta * b.delta + r2;
  double U = dimensional_constant(b.n) * std::pow(b.delta / s, (b.n - 2) / 2.0);
  if (k == 0) {
    double r = std::sqrt(r2);
    return 0.5 * (b.n - 2) * U * (r - b.delta) * (r + b.delta) / s;
  }
  return (b.n - 2) * U * b.delta * (x[k - 1] - b.xi[k - 1]) / s;
}

// With m = (n-2)/2, s = delta^2 + rho^2:
// Delta U = a delta^m [-2 m n s^{-m-1} + 4 m (m+1) rho^2 s^{-m-2}]
double bubble_laplacian(const BubbleParams& b, std::span<const double> x) {
  double rho2 = sq_dist(b, x);
  double m = (b.n - 2) / 2.0;
  double s = b.delta * b.delta + rho2;
  double a = dimensional_constant(b.n) * std::pow(b.delta, m);
  return a * (-2 * m * b.n * std::pow(s, -m - 1) + 4 * m * (m + 1) * rho2 * std::pow(s, -m - 2));
}

double param_derivative_laplacian(const BubbleParams& b, int k, std::span<const double> x) {
  if (k < 0 || k > b.n) throw ConfigError("derivative index out of range");
  double rho2 = sq_dist(b, x);
  double m = (b.n - 2) / 2.0;
  double d2 = b.delta * b.delta;
  double s = d2 + rho2;
  double n = b.n;
  double a = dimensional_constant(b.n) * std::pow(b.delta, m);
  if (k == 0) {
    // delta d/ddelta of the expression above
    double base = -2 * m * n * std::pow(s, -m - 1) + 4 * m * (m + 1) * rho2 * std::pow(s, -m - 2);
    double ds = 2 * m * n * (m + 1) * std::pow(s, -m - 2) * 2 * d2 -
                4 * m * (m + 1) * (m + 2) * rho2 * std::pow(s, -m - 3) * 2 * d2;
    return a * (m * base + ds);
  }
  double y = x[k - 1] - b.xi[k - 1];
  // d/dxi_k of s and rho^2 is -2y
  double t1 = -2 * m * n * (-(m + 1)) * std::pow(s, -m - 2) * (-2 * y);
  double t2 = 4 * m * (m + 1) * ((-2 * y) * std::pow(s, -m - 2) +
                                 rho2 * (-(m + 2)) * std::pow(s, -m - 3) * (-2 * y));
  return b.delta * a * (t1 + t2);
}

double bubble_pde_residual(const BubbleParams& b, const SampleSet& samples) {
  double p = critical_exponent(b.n);
  double worst = 0;
  for (const auto& x : samples) {
    double U = eval_bubble(b, x);
    worst = std::max(worst, std::abs(bubble_laplacian(b, x) + std::pow(U, p)));
  }
  return worst;
}

double nondegeneracy_residual(const BubbleParams& b, int k, const SampleSet& samples) {
  double p = critical_exponent(b.n);
  double worst = 0;
  for (const auto& x : samples) {
    double U = eval_bubble(b, x);
    double Z = eval_param_derivative(b, k, x);
    double r = param_derivative_laplacian(b, k, x) + p * std::pow(U, p - 1) * Z;
    worst = std::max(worst, std::abs(r));
  }
  return worst;
}

SobolevEnergy sobolev_energy(int n) {
  check_dim(n);
  double p = critical_exponent(n);
  auto dU = [n](double r) {
    // U'(r) for delta = 1
    double s = 1 + r * r;
    return -(n - 2.0) * dimensional_constant(n) * r * std::pow(s, -n / 2.0);
  };
  auto grad = [&](double r) { double g = dU(r); return g * g; };
  auto crit = [&](double r) { return std::pow(bubble_radial(n, 1.0, r), p + 1); };
  auto run = [&](double tol) {
    double G = radial_wholespace(n, grad, 1.0, tol).value;
    double C = radial_wholespace(n, crit, 1.0, tol).value;
    return std::pair{G, C};
  };
  auto [G1, C1] = run(1e-9);
  auto [G2, C2] = run(1e-13);
  SobolevEnergy e;
  e.grad_sq = G2;
  e.crit_norm = C2;
  e.S0 = G2 / std::pow(C2, 2.0 / (p + 1));
  e.J = 0.5 * G2 - C2 / (p + 1);
  e.consistency = std::abs(e.J - std::pow(e.S0, n / 2.0) / n) / e.J;
  e.quad_error = std::max(std::abs(G1 - G2) / G2, std::abs(C1 - C2) / C2);
  if (e.quad_error > 1e-7) throw SolverError("Sobolev energy quadrature did not settle");
  return e;
}

}  // namespace bl
