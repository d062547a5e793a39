#pragma once
#include <functional>

namespace bl {

struct QuadResult {
  double value = 0;
  double error = 0;  // estimated absolute error
};

using Fn1 = std::function<double(double)>;

// Adaptive Gauss-Kronrod (31 point) on a finite interval. Throws SolverError
// when the estimated error stays above max(tol*|I|, abs_floor).
QuadResult integrate(const Fn1& f, double a, double b, double tol = 1e-12,
                     unsigned max_depth = 20, double abs_floor = 0.0);

// int_0^inf f(r) dr with r = scale * tan(theta).
QuadResult integrate_halfline(const Fn1& f, double scale = 1.0, double tol = 1e-12,
                              unsigned max_depth = 20);

// |S^{n-1}| int_0^inf f(r) r^{n-1} dr, i.e. the whole-space integral of a radial function.
QuadResult radial_wholespace(int n, const Fn1& f, double scale = 1.0, double tol = 1e-12);

// |S^{n-1}| int_0^R f(r) r^{n-1} dr, split at the concentration scale.
QuadResult radial_ball(int n, const Fn1& f, double R, double scale, double tol = 1e-12);

}  // namespace bl
