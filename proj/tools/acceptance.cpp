// Acceptance suite: one PASS/FAIL line per criterion, details on the indented lines below it.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "bubblelab/inequalities.hpp"
#include "bubblelab/boundary_quadrature.hpp"
#include "bubblelab/experiments.hpp"
#include "bubblelab/green.hpp"
#include "bubblelab/ground_state.hpp"
#include "bubblelab/interaction.hpp"

using namespace bl;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> lines;
  void note(bool ok, const std::string& s) {
    pass = pass && ok;
    lines.push_back((ok ? "ok    " : "FAIL  ") + s);
  }
};

std::string fmt(const char* f, auto... a) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

DiscPtr radial_ball(int n) { return Discretization::make(DomainModel::ball(n), GridSpec::radial()); }

Outcome criterion1() {
  Outcome o;
  SolverOptions sopt;
  const double bound = 10 * sopt.tol;
  auto check = [&](const std::string& label, const DiscPtr& d) {
    for (double delta : {0.2, 0.1, 0.05}) {
      double e = centre_projection_error(d, delta, sopt);
      o.note(e <= bound, fmt("%s delta=%g max error %.3e (bound %.1e)", label.c_str(), delta, e, bound));
    }
  };
  check("n=3 tensor:48", Discretization::make(DomainModel::ball(3), GridSpec::tensor(48)));
  for (int n : {3, 4, 5}) check("n=" + std::to_string(n) + " radial", radial_ball(n));
  return o;
}

Outcome criterion2() {
  Outcome o;
  auto d = radial_ball(3);
  const std::vector<double> deltas{0.2, 0.1, 0.05, 0.025};
  auto slope = [&](ProjectionKind k, double lam) {
    std::vector<double> defect;
    for (double delta : deltas) defect.push_back(expansion_defect(d, k, lam, delta));
    return fit_power_law(deltas, defect);
  };
  auto s1 = slope(ProjectionKind::PU1, 0.0);
  o.note(std::abs(s1.slope - 2.5) <= 0.2, fmt("pu1 n=3 defect slope %.4f (target 2.5 +- 0.2)", s1.slope));
  const double lam = 0.05 * unit_ball_lambda1(3);
  auto s2 = slope(ProjectionKind::PU2, lam);
  o.note(s2.slope >= 2.3, fmt("pu2 n=3 lambda=0.05 lambda_1 defect slope %.4f (>= 2.3)", s2.slope));
  return o;
}

Outcome criterion3() {
  Outcome o;
  for (int n : {3, 4, 5}) {
    auto dom = DomainModel::ball(n);
    double lo = 1e9, hi = -1e9;
    for (double d : {1e-3, 3e-3, 1e-2, 3e-2, 1e-1}) {
      std::vector<double> x(static_cast<size_t>(n), 0.0);
      x[0] = 1 - d;
      double v = robin_function(dom, x, RobinVariant::Laplace) * std::pow(2 * d, n - 2);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    o.note(lo >= 0.8 && hi <= 1.2, fmt("n=%d phi (2d)^{n-2} in [%.4f, %.4f]", n, lo, hi));
  }
  const double lam = 0.5 * unit_ball_lambda1(3);
  auto dom = DomainModel::ball(3);
  double lo = 1e9, hi = -1e9;
  for (double d : {1e-3, 3e-3, 1e-2, 3e-2, 1e-1}) {
    std::vector<double> x{1 - d, 0, 0};
    double v = robin_function(dom, x, RobinVariant::Helmholtz, lam, 48) * 2 * d;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  o.note(lo >= 0.8 && hi <= 1.2, fmt("n=3 phi_lambda (2d) at lambda=0.5 lambda_1 in [%.4f, %.4f]", lo, hi));
  return o;
}

Outcome criterion4() {
  Outcome o;
  auto d = radial_ball(3);
  const double l1 = unit_ball_lambda1(3);
  for (double f : {0.35, 0.5, 0.9}) {
    auto g = solve_ground_state(d, f * l1);
    o.note(g.attained, fmt("lambda/lambda_1=%.2f S_lambda/S_0 - 1 = %.3e (attained)", f, g.relative_gap()));
  }
  for (double f : {0.1, 0.2}) {
    auto g = solve_ground_state(d, f * l1);
    bool ok = !g.attained && std::abs(g.relative_gap()) <= 1e-3;
    o.note(ok, fmt("lambda/lambda_1=%.2f S_lambda/S_0 - 1 = %.3e (not attained)", f, g.relative_gap()));
  }
  auto b = bracket_threshold(d, l1, 0.1, 0.5, 6);
  bool ok = b.lo >= 0.2 && b.hi <= 0.3;
  o.note(ok, fmt("threshold bracket [%.4f, %.4f] after %d bisections (within 0.25 +- 0.05)", b.lo, b.hi, b.steps));
  return o;
}

Outcome criterion5() {
  Outcome o;
  for (auto& r : full_suite(7)) {
    bool ok = r.passed && std::isfinite(r.measured);
    o.note(ok, fmt("%s %s measured %.4g expected %.4g tol %.3g %s", r.family.c_str(), r.name.c_str(), r.measured,
                   r.expected, r.tolerance, r.detail.c_str()));
  }
  return o;
}

Outcome criterion6() {
  Outcome o;
  struct Case {
    int n;
    ProjectionKind kind;
    double fraction;
    std::vector<double> deltas;
  };
  // Each case uses a lambda where the leading term dominates at the sweep's scales.
  const std::vector<Case> cases{{3, ProjectionKind::PU2, 0.15, {0.05, 0.025, 0.0125, 0.00625}},
                                {4, ProjectionKind::PU2, 0.3, {0.1, 0.05, 0.025, 0.0125}},
                                {5, ProjectionKind::PU1, 0.5, {0.2, 0.1, 0.05, 0.025}},
                                {5, ProjectionKind::PU2, 0.5, {0.1, 0.05, 0.025, 0.0125}}};
  for (auto& c : cases) {
    auto r = interior_projection_sweep(c.n, c.kind, c.fraction * unit_ball_lambda1(c.n), c.deltas);
    std::vector<double> ratios;
    std::ostringstream s;
    for (auto& p : r) {
      ratios.push_back(p.ratio());
      s << " " << fmt("%.4f", p.ratio());
    }
    bool ok = std::abs(ratios.back() - 1) <= 0.25 && monotonically_improving(ratios);
    o.note(ok, fmt("n=%d %s lambda=%.2f lambda_1 ratios%s", c.n, to_string(c.kind), c.fraction, s.str().c_str()));
  }
  return o;
}

void report_sweep(Outcome& o, const SweepResult& r, double target) {
  for (auto& rec : r.records)
    o.lines.push_back(fmt("      delta=%-10g Gamma=%.4e d=%.4e d/Gamma=%.4f", rec.deltas.front(), rec.gamma,
                          rec.distance, rec.distance / rec.gamma));
  o.note(std::abs(r.fit.slope - target) <= 0.1,
         fmt("%s exponent %.4f (target %.2f +- 0.1, leave-one-out %.4f..%.4f)", regime_name(r.regime.inputs).c_str(),
             r.fit.slope, target, r.fit.loo_min, r.fit.loo_max));
}

Outcome criterion7() {
  Outcome o;
  SweepConfig c;
  c.regime = parse_regime("n3-interior-u0zero-pu2");
  c.lambda_fraction = 0.1;
  c.eps_scale = 3;
  c.deltas = {0.2, 0.1, 0.05, 0.025};
  auto r = exponent_sweep(c);
  report_sweep(o, r, 1.0);
  o.note(r.ratio_log_range <= 1, fmt("log-range of d/Gamma %.4f (<= 1)", r.ratio_log_range));
  return o;
}

Outcome criterion8() {
  Outcome o;
  for (auto [kind, target] : {std::pair{"pu1", 0.75}, std::pair{"pu2", 1.0}}) {
    SweepConfig c;
    c.regime = parse_regime(std::string("n5-interior-u0zero-") + kind);
    c.lambda_fraction = 0.5;
    c.deltas = {0.05, 0.025, 0.0125, 0.00625, 0.003125, 0.0015625};
    report_sweep(o, exponent_sweep(c), target);
  }
  return o;
}

Outcome criterion9() {
  Outcome o;
  auto r = fit_round_trip({});
  o.note(r.max_param_error <= 1e-3, fmt("max parameter error %.3e (<= 1e-3)", r.max_param_error));
  o.note(r.distance_rel_error <= 0.05,
         fmt("distance %.6e vs constructed %.6e, rel error %.3e (<= 5%%)", r.state.distance, r.constructed_distance,
             r.distance_rel_error));
  o.note(r.state.ortho_max() <= 1e-6, fmt("orthogonality residual %.3e (<= 1e-6), %d iterations",
                                          r.state.ortho_max(), r.state.iterations));
  return o;
}

Outcome criterion10() {
  Outcome o;
  for (int n : {6, 7}) {
    BoundarySchedule s;
    s.n = n;
    auto v = boundary_schedule(s);
    std::vector<double> dil, tr;
    for (auto& b : v) {
      dil.push_back(b.dilation_ratio());
      tr.push_back(b.translation_ratio());
      o.lines.push_back(fmt("      n=%d d=%-6g dilation ratio %.4f translation ratio %.4f", n, b.d,
                            b.dilation_ratio(), b.translation_ratio()));
    }
    o.note(std::abs(dil.back() - 1) <= 0.25 && std::abs(tr.back() - 1) <= 0.25,
           fmt("n=%d boundary schedule finest ratios %.4f / %.4f (within 25%%)", n, dil.back(), tr.back()));
  }
  for (int n = 3; n <= 7; ++n) {
    auto s = structural_constants(n);
    std::vector<std::pair<const char*, const Constant*>> named{{"a", &s.a},   {"b", &s.b},         {"b4", &s.b4},
                                                               {"b3", &s.b3}, {"bbar5", &s.bbar5}, {"c", &s.c},
                                                               {"e", &s.e}};
    std::ostringstream line;
    bool ok = true;
    int defined = 0;
    for (auto& [name, k] : named) {
      if (!k->defined) continue;
      ++defined;
      bool pos = k->value - 3 * k->error > 0 && std::isfinite(k->value);
      ok = ok && pos;
      line << " " << name << "=" << fmt("%.5g+-%.1e", k->value, k->error);
    }
    o.note(ok && defined > 0, fmt("n=%d constants positive beyond 3 sigma:%s", n, line.str().c_str()));
  }
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"exact-centre projection oracle", criterion1},
      {"expansion orders of the projected bubble", criterion2},
      {"Robin boundary law", criterion3},
      {"ground-state threshold on the unit ball, n=3", criterion4},
      {"elementary inequality and integral suites", criterion5},
      {"interior projection predictions", criterion6},
      {"linear stability regime, n=3 pu2", criterion7},
      {"sublinear regime n=5 pu1 and pu2 restoration", criterion8},
      {"decomposition fit round trip", criterion9},
      {"boundary schedule and structural constants", criterion10},
  };
  int failed = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.note(false, std::string("exception: ") + e.what());
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2zu: %s  %s (%.1f s)\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first, secs);
    for (auto& l : o.lines) std::printf("    %s\n", l.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
