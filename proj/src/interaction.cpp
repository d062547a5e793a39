#include "bubblelab/interaction.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "bubblelab/errors.hpp"
#include "bubblelab/fitting.hpp"
#include "bubblelab/green.hpp"

namespace bl {

const char* to_string(PairRegime r) {
  switch (r) {
    case PairRegime::DistanceDominated: return "distance-dominated";
    case PairRegime::ScaleDominatedI: return "scale-dominated-i";
    case PairRegime::ScaleDominatedJ: return "scale-dominated-j";
  }
  return "?";
}

namespace {

double dist2(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return s;
}

bool is_origin(const std::vector<double>& x) {
  return std::all_of(x.begin(), x.end(), [](double c) { return c == 0.0; });
}

// |S^{n-1}| int_lo^inf g(r) r^{n-1} dr with geometric breakpoints between the scales.
QuadResult radial_multiscale(int n, const Fn1& g, double smin, double smax, double R = INFINITY,
                             double tol = 1e-12) {
  const double S = sphere_area(n);
  auto h = [&](double r) { return r == 0.0 ? 0.0 : S * g(r) * std::pow(r, n - 1); };
  QuadResult tot{0, 0};
  double lo = 0, hi = std::min(smin, R);
  while (true) {
    auto q = integrate(h, lo, hi, tol);
    tot.value += q.value;
    tot.error += q.error;
    if (hi >= R || hi >= 64 * smax) break;
    lo = hi;
    hi = std::min(R, hi * 4);
  }
  if (std::isinf(R)) {
    double B = hi;
    auto q = integrate_halfline([&](double u) { return h(B + u); }, B, tol);
    tot.value += q.value;
    tot.error += q.error;
  }
  return tot;
}

}  // namespace

PairInteraction pair_quantities(const BubbleParams& bi, const BubbleParams& bj) {
  if (bi.n != bj.n) throw ConfigError("bubbles must share the dimension");
  const int n = bi.n;
  double d2 = dist2(bi.xi, bj.xi);
  double e = bi.delta / bj.delta + bj.delta / bi.delta + d2 / (bi.delta * bj.delta);
  PairInteraction p;
  p.q = std::pow(e, -0.5 * (n - 2));
  double t1 = std::sqrt(bi.delta / bj.delta), t2 = std::sqrt(bj.delta / bi.delta);
  double t3 = std::sqrt(d2 / (bi.delta * bj.delta));
  p.R = std::max({t1, t2, t3});
  if (t3 >= t1 && t3 >= t2)
    p.regime = PairRegime::DistanceDominated;
  else
    p.regime = t1 >= t2 ? PairRegime::ScaleDominatedI : PairRegime::ScaleDominatedJ;
  return p;
}

PowerLaw lp_scaling_law(int n, double s) {
  if (!(s > 0)) throw ConfigError("exponent s must be positive");
  const double crit = n / (n - 2.0), m = 0.5 * (n - 2);
  if (std::abs(s - crit) < 1e-12) return {0.5 * n, 1.0};
  if (s < crit) return {m * s, 0.0};
  return {n - m * s, 0.0};
}

QuadResult bubble_lp_norm(const BubbleParams& b, const DomainModel* dom, double s) {
  if (!(s > 0)) throw ConfigError("exponent s must be positive");
  const int n = b.n;
  auto f = [&](double r) { return std::pow(bubble_radial(n, b.delta, r), s); };
  if (!dom) {
    if (s * (n - 2) <= n) throw ConfigError("int U^s over R^n diverges for s <= n/(n-2)");
    return radial_multiscale(n, f, b.delta, b.delta);
  }
  if (dom->n != n) throw ConfigError("dimension mismatch");
  if (dom->kind == DomainKind::UnitBall && is_origin(b.xi))
    return radial_ball(n, f, dom->ball_radius, std::min(b.delta, dom->ball_radius));
  std::vector<double> c(n, 0.0);
  double R = dom->kind == DomainKind::UnitBall ? dom->ball_radius : 0;
  if (dom->kind == DomainKind::Box) throw ConfigError("bubble_lp_norm on boxes is not supported");
  auto res = mc_integrate(
      n, [&](std::span<const double> x) { return std::pow(eval_bubble(b, x), s); },
      {Proposal{b.xi, b.delta}, Proposal{c, R}}, 400000, 1, R);
  return {res.value, res.stderr_};
}

PowerLaw cross_integral_law(int n, double s, double t) {
  const double crit = 2.0 * n / (n - 2);
  if (s < 0 || t < 0 || std::abs(s + t - crit) > 1e-12) throw ConfigError("need s, t >= 0 with s + t = 2^*");
  if (std::abs(s - t) < 1e-12) return {n / (n - 2.0), 1.0};
  return {std::min(s, t), 0.0};
}

MCResult cross_integral(const BubbleParams& bi, const BubbleParams& bj, double s, double t,
                        const DomainModel* dom, long samples, std::uint64_t seed) {
  if (bi.n != bj.n) throw ConfigError("dimension mismatch");
  const int n = bi.n;
  if (s < 0 || t < 0) throw ConfigError("powers must be nonnegative");
  double R = 0;
  if (dom) {
    if (dom->kind != DomainKind::UnitBall) throw ConfigError("cross integrals support the ball or R^n");
    R = dom->ball_radius;
  }
  if (dist2(bi.xi, bj.xi) == 0 && (!dom || is_origin(bi.xi))) {
    auto g = [&](double r) {
      return std::pow(bubble_radial(n, bi.delta, r), s) * std::pow(bubble_radial(n, bj.delta, r), t);
    };
    auto q = radial_multiscale(n, g, std::min(bi.delta, bj.delta), std::max(bi.delta, bj.delta),
                               dom ? R : INFINITY);
    return {q.value, q.error, 0};
  }
  auto f = [&](std::span<const double> x) {
    return std::pow(eval_bubble(bi, x), s) * std::pow(eval_bubble(bj, x), t);
  };
  return mc_integrate(n, f, {Proposal{bi.xi, bi.delta}, Proposal{bj.xi, bj.delta}}, samples, seed, R);
}

int riesz_case(int n, double alpha) {
  if (!(alpha > 0)) throw ConfigError("alpha must be positive");
  if (alpha < 2) return 1;
  if (alpha == 2) return 2;
  if (alpha < n) return 3;
  if (alpha == n) return 4;
  return 5;
}

double riesz_bound(int n, double alpha, double delta, double d) {
  double w = delta * delta + d * d;
  switch (riesz_case(n, alpha)) {
    case 1: return std::pow(delta, alpha / 2);
    case 2: return delta * (1 + std::abs(std::log(d)));
    case 3: return std::pow(delta, alpha / 2) * std::pow(w, -(alpha - 2) / 2);
    case 4: return std::pow(delta, n / 2.0) * std::pow(w, -(n - 2) / 2.0) * std::log(2 + d / delta);
    default: return std::pow(delta, n - alpha / 2) * std::pow(w, -(n - 2) / 2.0);
  }
}

double riesz_potential_profile(int n, double alpha, double delta, const std::vector<double>& xi,
                               const std::vector<double>& x, const DomainModel* dom, long, std::uint64_t) {
  if (!(alpha > 0) || !(delta > 0)) throw ConfigError("alpha and delta must be positive");
  if (static_cast<int>(xi.size()) != n || static_cast<int>(x.size()) != n) throw ConfigError("dimension mismatch");
  double R = INFINITY;
  std::vector<double> y(n);
  if (dom) {
    if (dom->kind != DomainKind::UnitBall || !is_origin(xi))
      throw ConfigError("Riesz profiles on the ball need the bubble at the centre");
    R = dom->ball_radius;
    y = x;
  } else {
    if (alpha <= 2) throw ConfigError("whole-space Riesz potential diverges for alpha <= 2");
    for (int k = 0; k < n; ++k) y[k] = x[k] - xi[k];
  }
  // Newton: the spherical mean of |x - z|^{2-n} over |z| = s is max(|x|, s)^{2-n}
  double rx = std::sqrt(dist2(y, std::vector<double>(n, 0.0)));
  auto f = [&](double s) { return std::pow(delta / (delta * delta + s * s), alpha / 2); };
  const double S = sphere_area(n);
  double inner = 0;
  if (rx > 0) {
    double upper = std::min(rx, R);
    auto qi = radial_multiscale(n, f, std::min(delta, upper), upper, upper);
    inner = std::pow(rx, 2 - n) * qi.value / S;
  }
  double outer = 0;
  if (rx < R) {
    auto g = [&](double s) { return s * f(s); };
    double lo = rx;
    if (std::isinf(R)) {
      // split at the concentration scale then the half line
      double B = std::max(lo, delta) * 64;
      outer = integrate(g, lo, B, 1e-12).value + integrate_halfline([&](double u) { return g(B + u); }, B).value;
    } else {
      double a = lo, b = std::max(lo, std::min(R, delta));
      if (b > a) outer += integrate(g, a, b, 1e-12).value;
      a = b;
      while (a < R) {
        double c = std::min(R, std::max(a * 4, delta));
        outer += integrate(g, a, c, 1e-12).value;
        a = c;
      }
    }
  }
  return S * (inner + outer);
}

namespace {

struct Radial {
  int n;
  double a, m, p;
  explicit Radial(int n_) : n(n_), a(dimensional_constant(n_)), m(0.5 * (n_ - 2)), p(critical_exponent(n_)) {}
  double U(double r) const { return a * std::pow(1 + r * r, -m); }
  double Z0(double r) const { return m * U(r) * (r * r - 1) / (1 + r * r); }
};

Constant two_precision(int n, const Fn1& f, const std::string& method) {
  auto lo = radial_multiscale(n, f, 1.0, 1.0, INFINITY, 1e-9);
  auto hi = radial_multiscale(n, f, 1.0, 1.0, INFINITY, 1e-13);
  Constant c;
  c.value = hi.value;
  c.error = std::abs(hi.value - lo.value) + hi.error;
  c.defined = true;
  c.method = method;
  return c;
}

Constant scaled(const Constant& c, double k) {
  Constant o = c;
  o.value *= k;
  o.error *= std::abs(k);
  return o;
}

}  // namespace

StructuralConstants structural_constants(int n) {
  if (n < 3) throw ConfigError("n must be >= 3");
  Radial B(n);
  StructuralConstants sc;
  sc.n = n;
  sc.int_up_z0 = two_precision(n, [&](double r) { return std::pow(B.U(r), B.p - 1) * B.Z0(r); }, "radial-gk");
  sc.a = scaled(sc.int_up_z0, B.p);
  sc.c = scaled(sc.a, B.a);
  sc.c.method = "a_n*constant_a";
  if (n >= 5) sc.b = two_precision(n, [&](double r) { return B.U(r) * B.Z0(r); }, "radial-gk");
  if (n == 4) sc.b4 = scaled(sc.int_up_z0, 3 * std::sqrt(2.0));
  if (n == 3) sc.b3 = scaled(sc.int_up_z0, 0.5 * B.a * B.p);
  if (n == 5) {
    Constant j1 = two_precision(n, [&](double r) { return std::pow(B.U(r), B.p - 1) * B.Z0(r) / r; }, "");
    Constant j2 = two_precision(
        n,
        [&](double r) {
          double s2 = 1 + r * r;
          // (1+r^2)^{-3/2} - r^{-3}, written without cancellation for large r
          double diff = r > 1 ? std::pow(r, -3) * std::expm1(-1.5 * std::log1p(1 / (r * r)))
                              : std::pow(s2, -1.5) - std::pow(r, -3);
          return diff * (r * r - 1) * std::pow(s2, -2.5);
        },
        "");
    sc.bbar5.value = 0.5 * B.a * B.p * j1.value + 1.5 * B.a * B.a * j2.value;
    sc.bbar5.error = 0.5 * B.a * B.p * j1.error + 1.5 * B.a * B.a * j2.error;
    sc.bbar5.defined = true;
    sc.bbar5.method = "radial-gk";
  }
  sc.e = two_precision(n, [&](double r) { return std::pow(B.U(r), B.p) * r * r / (1 + r * r); }, "radial-gk");
  sc.e = scaled(sc.e, 0.5 * B.a * B.p * (n - 2.0) / n);
  for (const Constant* c : {&sc.a, &sc.b, &sc.b4, &sc.b3, &sc.bbar5, &sc.c, &sc.e})
    if (c->defined && !(c->value - c->error > 0))
      throw SolverError("structural constant not certified positive for n = " + std::to_string(n));
  return sc;
}

double constant_b(int n) {
  if (n == 4)
    throw RegimeRefusal("int U Z^0 is not absolutely integrable for n = 4; use the n = 4 constant b4");
  if (n < 5) throw RegimeRefusal("int U Z^0 diverges for n = 3");
  return structural_constants(n).b.value;
}

void write_constants_csv(std::ostream& os, const std::vector<int>& dims) {
  os << "constant,n,value,stderr,method\n";
  char buf[256];
  for (int n : dims) {
    auto sc = structural_constants(n);
    auto row = [&](const char* name, const Constant& c) {
      if (!c.defined) return;
      std::snprintf(buf, sizeof buf, "%s,%d,%.12e,%.3e,%s\n", name, n, c.value, c.error, c.method.c_str());
      os << buf;
    };
    row("a", sc.a);
    row("b", sc.b);
    row("b4", sc.b4);
    row("b3", sc.b3);
    row("bbar5", sc.bbar5);
    row("c", sc.c);
    row("e", sc.e);
  }
}

InteractionConstantEstimate estimate_interaction_constant(int n, long samples, std::uint64_t seed) {
  if (n < 3) throw ConfigError("n must be >= 3");
  const double p = critical_exponent(n), m = 0.5 * (n - 2);
  Radial B(n);
  InteractionConstantEstimate est;
  est.reference = m * B.a * radial_multiscale(n, [&](double r) { return std::pow(B.U(r), p); }, 1, 1).value;
  // bubble i fixed at (1, 0); bubble j varies over concentrated and separated placements
  struct Cfg {
    double dj, L;
  };
  const std::vector<Cfg> cfgs{{0.01, 0}, {0.02, 0}, {0.01, 1.0}, {0.02, 2.0}, {1, 8}, {1, 12}};
  std::vector<double> X, Y;
  std::vector<double> zero(n, 0.0);
  BubbleParams bi(n, 1.0, zero);
  for (size_t c = 0; c < cfgs.size(); ++c) {
    std::vector<double> xj(n, 0.0);
    xj[0] = cfgs[c].L;
    BubbleParams bj(n, cfgs[c].dj, xj);
    auto f = [&](std::span<const double> x) {
      double ui = eval_bubble(bi, x), uj = eval_bubble(bj, x);
      double i2 = std::pow(ui + uj, p) - std::pow(ui, p) - std::pow(uj, p);
      return i2 * eval_param_derivative(bj, 0, x);
    };
    auto r = mc_integrate(n, f, {Proposal{bi.xi, bi.delta}, Proposal{bj.xi, bj.delta}}, samples, seed + c);
    auto pq = pair_quantities(bi, bj);
    double e = std::pow(pq.q, -2.0 / (n - 2));
    X.push_back((e - 2 * bj.delta / bi.delta) * std::pow(pq.q, n / (n - 2.0)));
    Y.push_back(r.value);
  }
  auto fit = fit_proportional(X, Y);
  est.fitted = fit.k;
  est.rel_residual = fit.rel_residual;
  est.configurations = static_cast<int>(cfgs.size());
  return est;
}

ProjectionPrediction projection_prediction(const ProjectionConfig& c) {
  const int n = c.n;
  if (n < 3) throw ConfigError("n must be >= 3");
  if (c.nu != 1) throw RegimeRefusal("projection predictions are single-bubble (nu = 1)");
  if (static_cast<int>(c.xi.size()) != n) throw ConfigError("centre has the wrong dimension");
  DomainModel ball = DomainModel::ball(n);
  if (!ball.contains(c.xi)) throw ConfigError("centre must be inside the unit ball");
  if (!(c.delta > 0)) throw ConfigError("delta must be positive");
  if (c.lambda < 0) throw ConfigError("lambda must be >= 0");
  const bool centre = is_origin(c.xi);
  const bool u0 = c.u0_at_xi > 0;
  auto sc = structural_constants(n);
  const double d = c.delta, lam = c.lambda;
  ProjectionPrediction out;
  out.translation.assign(n, 0.0);
  std::vector<double> grad(n, 0.0);
  double phi = 0;

  if (c.kind == ProjectionKind::PU1) {
    if (!u0 && n <= 4)
      throw RegimeRefusal("pu1 with u0 = 0 needs n >= 5: for n = 3, 4 the remainder is as large as the leading term");
    phi = robin_laplace_ball(n, c.xi);
    grad = robin_laplace_ball_gradient(n, c.xi);
    if (n >= 5) {
      out.dilation = lam * sc.b.value * d * d - sc.c.value * phi * std::pow(d, n - 2);
      out.formula = "lambda*b_n*delta^2 - c_n*phi*delta^(n-2)";
    }
  } else {
    if (n > 5) throw RegimeRefusal("pu2 predictions are defined for n in {3,4,5}");
    if (!(lam > 0)) throw ConfigError("pu2 needs lambda > 0");
    if (centre) {
      phi = robin_shifted_center(n, lam);
    } else if (n == 3) {
      phi = robin_shifted_ball3(lam, c.xi, c.helmholtz_points).value;
      bool on_axis = std::all_of(c.xi.begin() + 1, c.xi.end(), [](double v) { return v == 0; });
      if (!on_axis) throw RegimeRefusal("off-centre shifted Robin gradients need a centre on the first axis");
      const double h = 2.0 / c.helmholtz_points;
      std::vector<double> yp = c.xi, ym = c.xi;
      yp[0] += h;
      ym[0] -= h;
      grad[0] = (robin_shifted_ball3(lam, yp, c.helmholtz_points).value -
                 robin_shifted_ball3(lam, ym, c.helmholtz_points).value) / (2 * h);
    } else {
      throw RegimeRefusal("off-centre shifted Robin functions are only available for n = 3");
    }
    switch (n) {
      case 3:
        out.dilation = -sc.c.value * phi * d;
        out.formula = "-c_3*phi_lambda*delta";
        break;
      case 4:
        out.dilation = sc.b4.value * lam * d * d * std::abs(std::log(d)) - sc.c.value * phi * d * d -
                       12 * sphere_area(4) * lam * d * d;
        out.formula = "b_4*lambda*delta^2|log delta| - c_4*phi_lambda*delta^2 - 12|S^3|lambda*delta^2";
        break;
      default:
        out.dilation = sc.bbar5.value * lam * d * d - sc.c.value * phi * d * d * d;
        out.formula = "bbar_5*lambda*delta^2 - c_5*phi_lambda*delta^3";
    }
  }
  if (u0) {
    out.dilation += sc.a.value * c.u0_at_xi * std::pow(d, 0.5 * (n - 2));
    out.formula = "a_n*u0(xi)*delta^((n-2)/2)" + (out.formula.empty() ? "" : " + " + out.formula);
  }
  for (int k = 0; k < n; ++k) out.translation[k] = -sc.e.value * std::pow(d, n - 1) * grad[k];
  return out;
}

}  // namespace bl
