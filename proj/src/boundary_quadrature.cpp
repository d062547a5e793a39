#include "bubblelab/boundary_quadrature.hpp"

#include <cmath>
#include <numbers>

#include "bubblelab/bubbles.hpp"
#include "bubblelab/domain.hpp"
#include "bubblelab/elliptic.hpp"
#include "bubblelab/errors.hpp"
#include "bubblelab/interaction.hpp"
#include "bubblelab/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace bl {

namespace {

// Gauss-Kronrod without the convergence throw; the error estimate is accumulated instead.
template <class F>
double gk(F f, double a, double b, double tol, double& err) {
  double e = 0;
  double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 20, tol, &e);
  if (!std::isfinite(v)) throw SolverError("boundary quadrature produced a non-finite value");
  err += e;
  return v;
}

}  // namespace

BoundaryProjection boundary_projection(int n, double lambda, double d, double delta, double tol) {
  if (n < 3) throw ConfigError("n must be >= 3");
  if (!(d > 0 && d < 1)) throw ConfigError("boundary distance must be in (0, 1)");
  if (!(delta > 0)) throw ConfigError("delta must be positive");
  const double a = dimensional_constant(n), m = 0.5 * (n - 2), p = critical_exponent(n);
  const double x0 = 1 - d;
  BubbleParams b(n, delta, [&] {
    std::vector<double> v(n, 0.0);
    v[0] = x0;
    return v;
  }());
  const double Sperp = sphere_area(n - 1);  // |S^{n-2}|
  const double cm = a * std::pow(delta, m), cz = a * std::pow(delta, 0.5 * n);
  std::vector<double> x(n, 0.0);

  ProjectionConfig pc;
  pc.n = n;
  pc.kind = ProjectionKind::PU1;
  pc.lambda = lambda;
  pc.delta = delta;
  pc.xi = b.xi;
  auto pred = projection_prediction(pc);

  // pair (int I3 PZ0, int I3 PZ1) along one ray, then over angles
  double inner_err = 0;
  long rays = 0;
  auto ray = [&](double th, bool dil) {
    ++rays;
    double c = std::cos(th), s = std::sin(th);
    double proj = x0 * c;
    double R = -proj + std::sqrt(proj * proj + 1 - x0 * x0);
    auto f = [&](double r) {
      x[0] = x0 + r * c;
      x[1] = r * s;
      double U = eval_bubble(b, x);
      double H = ball_harmonic_extension_H(n, b.xi, x);
      double corr = cm * H;
      double PU = U - corr;
      // PU^p - U^p without cancellation; the sign-preserving power keeps the
      // integrand C^1 where the approximation dips below zero at the boundary
      double diff = corr < U ? std::pow(U, p) * std::expm1(p * std::log1p(-corr / U))
                             : -std::pow(-PU, p) - std::pow(U, p);
      double I3 = diff + lambda * PU;
      double PZ = dil ? eval_param_derivative(b, 0, x) - m * cm * H
                      : eval_param_derivative(b, 1, x) - cz * ball_harmonic_extension_dH_dy(n, 1, b.xi, x);
      return I3 * PZ * std::pow(r, n - 1);
    };
    double total = 0, lo = 0, hi = std::min(R, delta / 8);
    while (true) {
      total += gk(f, lo, hi, tol, inner_err);
      if (hi >= R) break;
      lo = hi;
      hi = std::min(R, hi * 4);
    }
    return total * std::pow(s, n - 2);
  };
  auto angular = [&](bool dil, double& err) {
    // refine near theta = 0 where the ray hits the nearby boundary
    double total = 0;
    inner_err = 0;
    rays = 0;
    double cuts[] = {0, 0.05, 0.2, 0.6, 1.2, std::numbers::pi};
    for (int i = 0; i + 1 < 6; ++i)
      total += gk([&](double th) { return ray(th, dil); }, cuts[i], cuts[i + 1], tol, err);
    // inner errors enter with the mean angular weight
    err = Sperp * (err + std::numbers::pi * inner_err / std::max<long>(rays, 1));
    return Sperp * total;
  };
  BoundaryProjection out;
  out.d = d;
  out.delta = delta;
  out.kappa = delta / d;
  out.measured_dilation = angular(true, out.dilation_error);
  out.measured_translation = angular(false, out.translation_error);
  out.predicted_dilation = pred.dilation;
  out.predicted_translation = pred.translation[0];
  return out;
}

std::vector<BoundaryProjection> boundary_schedule(const BoundarySchedule& s) {
  double lam = s.lambda_fraction * unit_ball_lambda1(s.n);
  std::vector<BoundaryProjection> out;
  for (double d : s.distances) out.push_back(boundary_projection(s.n, lam, d, std::pow(d, s.delta_power)));
  return out;
}

}  // namespace bl
