#include "bubblelab/inequalities.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>

#include "bubblelab/bubbles.hpp"
#include "bubblelab/domain.hpp"
#include "bubblelab/errors.hpp"
#include "bubblelab/fitting.hpp"
#include "bubblelab/interaction.hpp"

namespace bl {

double binomial_remainder(double s, double t, int order) {
  if (t < -1) throw ConfigError("binomial remainder needs t >= -1");
  if (std::abs(t) < 0.5) {
    double c = 1, tk = 1, sum = 0;
    for (int k = 0; k < 600; ++k) {
      if (k > 0) {
        c *= (s - k + 1) / k;
        tk *= t;
      }
      if (k < order) continue;
      double term = c * tk;
      sum += term;
      if (k > order + 2 && std::abs(term) <= 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  long double v = std::pow(1.0L + t, static_cast<long double>(s));
  long double c = 1, tk = 1;
  for (int k = 0; k < order; ++k) {
    if (k > 0) {
      c *= (s - k + 1) / k;
      tk *= t;
    }
    v -= c * tk;
  }
  return static_cast<double>(v);
}

namespace {

std::string fmt(const char* f, double a, double b = 0) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

struct Ineq {
  const char* name;
  double s_lo, s_hi;
  bool allow_negative_b;
  std::function<double(double, double)> lhs;  // in terms of (s, t = b/a), scaled by a^{-s}
  std::function<double(double, double)> rhs;
};

SuiteResult run_inequality(const Ineq& q, std::mt19937_64& rng, long samples, double cap) {
  std::uniform_real_distribution<double> logu(std::log(1e-6), std::log(1e6)), uni(0, 1);
  double worst = 0, ws = 0, wt = 0;
  for (long i = 0; i < samples; ++i) {
    double a = std::exp(logu(rng)), b = std::exp(logu(rng));
    double s = q.s_lo + (q.s_hi - q.s_lo) * uni(rng);
    if (q.allow_negative_b && uni(rng) < 0.5) b = -a * uni(rng);
    double t = b / a;
    double l = std::abs(q.lhs(s, t)), r = q.rhs(s, t);
    if (!(r > 0)) continue;
    double ratio = l / r;
    if (!std::isfinite(ratio)) ratio = INFINITY;
    if (ratio > worst) {
      worst = ratio;
      ws = s;
      wt = t;
    }
  }
  SuiteResult res;
  res.family = "elementary";
  res.name = q.name;
  res.measured = worst;
  res.expected = cap;
  res.passed = std::isfinite(worst) && worst <= cap;
  res.detail = fmt("worst at s=%.4g", ws) + fmt(", b/a=%.4g", wt);
  return res;
}

}  // namespace

std::vector<SuiteResult> inequality_suite(std::uint64_t seed, long samples, double cap) {
  std::mt19937_64 rng(seed);
  auto pw = [](double s, double t) { return std::expm1(s * std::log1p(t)); };  // (1+t)^s - 1
  std::vector<Ineq> list{
      {"iqu[1<=s<=2]", 1, 2, false,
       [&](double s, double t) {
         double u = std::min(t, 1 / t);  // symmetric in a, b: normalise by the larger
         double sc = t > 1 ? std::pow(t, s) : 1.0;
         return sc * (pw(s, u) - std::pow(u, s));
       },
       [](double s, double t) { return std::min(std::pow(t, s - 1), t); }},
      {"iqu[s>2]", 2, 8, false,
       [&](double s, double t) {
         double u = std::min(t, 1 / t);
         double sc = t > 1 ? std::pow(t, s) : 1.0;
         return sc * (pw(s, u) - std::pow(u, s));
       },
       [](double s, double t) { return std::pow(t, s - 1) + t; }},
      {"ab1", 1e-3, 8, false, [&](double s, double t) { return pw(s, t); },
       [](double s, double t) { return (s > 1 ? t : 0.0) + std::pow(t, s); }},
      {"ab6", 1, 8, false, [](double s, double t) { return binomial_remainder(s, t, 2); },
       [](double s, double t) { return (s > 2 ? t * t : 0.0) + std::pow(t, s); }},
      {"ab7", 2, 8, false, [](double s, double t) { return binomial_remainder(s, t, 3); },
       [](double s, double t) { return (s > 3 ? t * t * t : 0.0) + std::pow(t, s); }},
      {"ape1", 1, 2, true, [](double s, double t) { return binomial_remainder(s, t, 2); },
       [](double s, double t) { return std::min(t * t, std::pow(std::abs(t), s)); }},
  };
  std::vector<SuiteResult> out;
  for (auto& q : list) out.push_back(run_inequality(q, rng, samples, cap));
  return out;
}

std::vector<SuiteResult> lp_scaling_suite() {
  struct Case {
    int n;
    double s;
  };
  const std::vector<Case> cases{{3, 1}, {3, 3}, {3, 4}, {4, 1}, {4, 2}, {4, 3}, {5, 1}, {5, 5.0 / 3}, {5, 10.0 / 3}};
  const std::vector<double> deltas{1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  std::vector<SuiteResult> out;
  for (auto c : cases) {
    DomainModel ball = DomainModel::ball(c.n);
    auto law = lp_scaling_law(c.n, c.s);
    std::vector<double> v;
    for (double d : deltas) v.push_back(bubble_lp_norm(BubbleParams::centered(c.n, d), &ball, c.s).value);
    auto fit = fit_power_law(deltas, v, law.log_power);
    SuiteResult r;
    r.family = "lp-norm";
    r.name = fmt("int U^s, n=%.0f s=%.4g", c.n, c.s);
    r.measured = fit.slope;
    r.expected = law.exponent;
    r.tolerance = 0.05;
    r.passed = std::abs(fit.slope - law.exponent) <= r.tolerance;
    r.detail = fmt("log power %.0f, r2=%.6f", law.log_power, fit.r2);
    out.push_back(r);
  }
  return out;
}

std::vector<SuiteResult> cross_integral_suite(std::uint64_t seed) {
  std::vector<SuiteResult> out;
  auto slope_case = [&](const std::string& name, int n, double s, double t, const std::vector<BubbleParams>& bi,
                        const std::vector<BubbleParams>& bj, long samples) {
    auto law = cross_integral_law(n, s, t);
    std::vector<double> q, v;
    for (size_t k = 0; k < bi.size(); ++k) {
      q.push_back(pair_quantities(bi[k], bj[k]).q);
      v.push_back(cross_integral(bi[k], bj[k], s, t, nullptr, samples, seed + k).value);
    }
    auto fit = fit_power_law(q, v, law.log_power);
    SuiteResult r;
    r.family = "cross-integral";
    r.name = name;
    r.measured = fit.slope;
    r.expected = law.exponent;
    r.tolerance = 0.1 * law.exponent;
    r.passed = std::abs(fit.slope - law.exponent) <= r.tolerance;
    r.detail = fmt("compensated slope, log power %.0f", law.log_power);
    out.push_back(r);
  };
  for (int n : {3, 4, 5}) {
    double s = n / (n - 2.0);
    std::vector<BubbleParams> bi, bj;
    for (double d : {1e-3, 1e-4, 1e-5, 1e-6, 1e-7}) {
      bi.push_back(BubbleParams::centered(n, d));
      bj.push_back(BubbleParams::centered(n, 1.0));
    }
    slope_case(fmt("s=t=n/(n-2), coincident, n=%.0f", n), n, s, s, bi, bj, 0);
  }
  {
    const int n = 5;
    double p = critical_exponent(n);
    std::vector<BubbleParams> bi, bj;
    for (double d : {1e-2, 1e-3, 1e-4, 1e-5}) {
      bi.push_back(BubbleParams::centered(n, d));
      bj.push_back(BubbleParams::centered(n, 1.0));
    }
    slope_case("s=p, t=1, coincident, n=5", n, p, 1, bi, bj, 0);
    bi.clear();
    bj.clear();
    for (double d : {0.1, 0.05, 0.025, 0.0125}) {
      bi.push_back(BubbleParams(n, d, {0, 0, 0, 0, 0}));
      bj.push_back(BubbleParams(n, d, {1, 0, 0, 0, 0}));
    }
    slope_case("s=p, t=1, separated equal scales, n=5 (Monte Carlo)", n, p, 1, bi, bj, 200000);

    // s = 2^*, t = 0 reduces to the critical norm
    BubbleParams a(n, 0.3, {0, 0, 0, 0, 0}), b(n, 0.1, {0.5, 0, 0, 0, 0});
    auto mc = cross_integral(a, b, p + 1, 0, nullptr, 200000, seed + 101);
    double exact = std::pow(sobolev_constant_closed_form(n), 0.5 * n);
    SuiteResult r;
    r.family = "cross-integral";
    r.name = "s=2^*, t=0 reduction (Monte Carlo vs closed form)";
    r.measured = std::abs(mc.value - exact) / mc.stderr_;
    r.expected = 0;
    r.tolerance = 4;
    r.passed = r.measured <= 4;
    r.detail = fmt("value %.6g, closed form %.6g", mc.value, exact);
    out.push_back(r);

    // symmetry under (i,s) <-> (j,t)
    auto m1 = cross_integral(a, b, p, 1, nullptr, 200000, seed + 202);
    auto m2 = cross_integral(b, a, 1, p, nullptr, 200000, seed + 303);
    SuiteResult sy;
    sy.family = "cross-integral";
    sy.name = "swap symmetry (Monte Carlo)";
    sy.measured = std::abs(m1.value - m2.value) / std::hypot(m1.stderr_, m2.stderr_);
    sy.tolerance = 4;
    sy.passed = sy.measured <= 4;
    sy.detail = fmt("%.6g vs %.6g", m1.value, m2.value);
    out.push_back(sy);
  }
  return out;
}

std::vector<SuiteResult> riesz_suite() {
  std::vector<SuiteResult> out;
  const std::vector<double> deltas{1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  auto point = [](int n, double r) {
    std::vector<double> x(n, 0.0);
    x[0] = r;
    return x;
  };
  struct Case {
    int n;
    double alpha;
    double xr;  // |x - xi| used for the exponent fit
    double expected;
    double log_power;
  };
  const std::vector<Case> cases{{3, 1, 0.0, 0.5, 0}, {3, 2, 0.5, 1.0, 0}, {5, 4, 0.5, 2.0, 0},
                                {3, 3, 0.5, 1.5, 1}, {3, 4, 0.5, 1.0, 0}};
  for (auto c : cases) {
    DomainModel ball = DomainModel::ball(c.n);
    std::vector<double> xi(c.n, 0.0), v;
    for (double d : deltas) v.push_back(riesz_potential_profile(c.n, c.alpha, d, xi, point(c.n, c.xr), &ball));
    auto fit = fit_power_law(deltas, v, c.log_power);
    // ratio to the bound over a grid of x and delta
    double rmin = INFINITY, rmax = 0;
    for (double d : deltas)
      for (double xr : {0.0, 1e-3, 1e-2, 0.1, 0.5, 0.9}) {
        if (riesz_case(c.n, c.alpha) == 2 && xr == 0) continue;
        double val = riesz_potential_profile(c.n, c.alpha, d, xi, point(c.n, xr), &ball);
        double ratio = val / riesz_bound(c.n, c.alpha, d, xr);
        rmin = std::min(rmin, ratio);
        rmax = std::max(rmax, ratio);
      }
    SuiteResult r;
    r.family = "riesz";
    r.name = fmt("Riesz case %.0f (n=%.0f", riesz_case(c.n, c.alpha), c.n) + fmt(", alpha=%.0f)", c.alpha);
    r.measured = fit.slope;
    r.expected = c.expected;
    r.tolerance = 0.05;
    r.passed = std::abs(fit.slope - c.expected) <= 0.05 && std::isfinite(rmax) && rmax <= 1e3;
    if (riesz_case(c.n, c.alpha) == 3) r.passed = r.passed && rmin > 0 && rmax / rmin <= 1e2;
    r.detail = fmt("value/bound in [%.3g, %.3g]", rmin, rmax);
    out.push_back(r);
  }
  return out;
}

std::vector<SuiteResult> full_suite(std::uint64_t seed) {
  std::vector<SuiteResult> all = inequality_suite(seed);
  for (auto* f : {&lp_scaling_suite, &riesz_suite}) {
    auto v = f();
    all.insert(all.end(), v.begin(), v.end());
  }
  auto c = cross_integral_suite(seed);
  all.insert(all.end(), c.begin(), c.end());
  return all;
}

}  // namespace bl
