#include "bubblelab/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <sstream>

#include "bubblelab/bubbles.hpp"
#include "bubblelab/errors.hpp"

namespace bl {

QuadResult integrate(const Fn1& f, double a, double b, double tol, unsigned max_depth,
                     double abs_floor) {
  if (a == b) return {0.0, 0.0};
  // Global bisection of the worst panel on single-panel Kronrod rules. Boost
  // (1.74) reports the panel error on the reference interval [-1, 1] without the
  // half-width factor, so it is rescaled here and Boost's recursion is not used.
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  struct Panel {
    double a, b, v, err, l1;
    bool operator<(const Panel& o) const { return err < o.err; }
  };
  auto eval = [&](double lo, double hi) {
    Panel p{lo, hi, 0, 0, 0};
    p.v = GK::integrate(f, lo, hi, 0, tol, &p.err, &p.l1);
    p.err *= 0.5 * (hi - lo);
    if (!std::isfinite(p.v)) throw SolverError("quadrature produced a non-finite value");
    return p;
  };
  std::priority_queue<Panel> q;
  q.push(eval(a, b));
  double v = q.top().v, err = q.top().err, l1 = q.top().l1;
  const size_t max_panels = size_t{1} << std::min(max_depth, 16u);
  for (;;) {
    // Loose acceptance: the Kronrod estimate is pessimistic by orders of magnitude
    // for smooth integrands, so only reject clear failures.
    double target = std::max({1e3 * tol * std::max(std::abs(v), l1 * 1e-3), abs_floor, 1e-300});
    if (err <= target) return {v, err};
    Panel w = q.top();
    if (q.size() >= max_panels || w.b - w.a <= 4 * std::numeric_limits<double>::epsilon() * std::abs(w.a)) {
      std::ostringstream m;
      m << "adaptive quadrature did not converge on [" << a << ", " << b << "]: error " << err << " for value " << v;
      throw SolverError(m.str());
    }
    q.pop();
    double mid = 0.5 * (w.a + w.b);
    Panel l = eval(w.a, mid), r = eval(mid, w.b);
    v += l.v + r.v - w.v;
    err += l.err + r.err - w.err;
    l1 += l.l1 + r.l1 - w.l1;
    q.push(l);
    q.push(r);
  }
}

QuadResult integrate_halfline(const Fn1& f, double scale, double tol, unsigned max_depth) {
  const double half_pi = std::numbers::pi / 2;
  auto g = [&](double th) {
    double c = std::cos(th);
    if (c <= 0) return 0.0;
    double r = scale * std::tan(th);
    double val = f(r) * scale / (c * c);
    return std::isfinite(val) ? val : 0.0;
  };
  // Split at pi/4 (r = scale) so both halves are resolved.
  QuadResult a = integrate(g, 0.0, half_pi / 2, tol, max_depth);
  QuadResult b = integrate(g, half_pi / 2, half_pi, tol, max_depth);
  return {a.value + b.value, a.error + b.error};
}

QuadResult radial_wholespace(int n, const Fn1& f, double scale, double tol) {
  const double S = sphere_area(n);
  auto g = [&](double r) { return r == 0.0 ? 0.0 : S * f(r) * std::pow(r, n - 1); };
  return integrate_halfline(g, scale, tol);
}

QuadResult radial_ball(int n, const Fn1& f, double R, double scale, double tol) {
  const double S = sphere_area(n);
  auto g = [&](double r) { return r == 0.0 ? 0.0 : S * f(r) * std::pow(r, n - 1); };
  if (scale >= R) return integrate(g, 0.0, R, tol);
  // Geometric breakpoints between the concentration scale and R.
  QuadResult total{0, 0};
  double lo = 0.0, hi = scale;
  while (true) {
    QuadResult q = integrate(g, lo, hi, tol);
    total.value += q.value;
    total.error += q.error;
    if (hi >= R) break;
    lo = hi;
    hi = std::min(R, hi * 4.0);
  }
  return total;
}

}  // namespace bl
