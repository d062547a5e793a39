#include "bubblelab/experiments.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "bubblelab/errors.hpp"
#include "bubblelab/green.hpp"
#include "bubblelab/ground_state.hpp"
#include "bubblelab/interaction.hpp"
#include "bubblelab/parallel.hpp"

namespace bl {

const char* to_string(BoundaryRegime b) { return b == BoundaryRegime::Interior ? "interior" : "boundary"; }

namespace {

[[noreturn]] void refuse(const RegimeInputs& r, const std::string& why) {
  throw RegimeRefusal("regime " + regime_name(r) + " refused: " + why);
}

double A_norm(const Discretization& d, double lam, const Eigen::VectorXd& v) {
  Eigen::VectorXd Av = d.stiffness() * v - lam * d.lumped_mass().cwiseProduct(v);
  return std::sqrt(std::max(0.0, v.dot(Av)));
}

Eigen::VectorXd apply_A(const Discretization& d, double lam, const Eigen::VectorXd& v) {
  return d.stiffness() * v - lam * d.lumped_mass().cwiseProduct(v);
}

double spow(double v, double p) { return std::copysign(std::pow(std::abs(v), p), v); }

void require_radial_centre(const Discretization& d) {
  if (!d.radial()) throw ConfigError("this construction needs a radial ball mesh");
  if (d.domain().kind != DomainKind::UnitBall || d.domain().ball_radius != 1.0)
    throw ConfigError("this construction is set up on the unit ball");
}

}  // namespace

std::string regime_name(const RegimeInputs& r) {
  std::ostringstream s;
  s << "n" << r.n << "-" << to_string(r.boundary) << "-" << (r.u0_positive ? "u0pos" : "u0zero") << "-"
    << to_string(r.kind);
  if (r.nu != 1) s << "-nu" << r.nu;
  return s.str();
}

RegimeInputs parse_regime(const std::string& name) {
  RegimeInputs r;
  std::vector<std::string> parts;
  std::stringstream ss(name);
  for (std::string t; std::getline(ss, t, '-');) parts.push_back(t);
  auto bad = [&](const std::string& why) { throw ConfigError("bad regime '" + name + "': " + why); };
  if (parts.size() < 4 || parts.size() > 5) bad("expected n<dim>-<interior|boundary>-<u0zero|u0pos>-<pu1|pu2>[-nu<k>]");
  auto int_after = [&](const std::string& s, const std::string& prefix) {
    if (s.rfind(prefix, 0) != 0 || s.size() == prefix.size()) bad("expected " + prefix + "<integer>");
    size_t pos = 0;
    int v = 0;
    try {
      v = std::stoi(s.substr(prefix.size()), &pos);
    } catch (const std::exception&) {
      bad("expected " + prefix + "<integer>");
    }
    if (pos != s.size() - prefix.size()) bad("expected " + prefix + "<integer>");
    return v;
  };
  r.n = int_after(parts[0], "n");
  if (parts[1] == "interior") r.boundary = BoundaryRegime::Interior;
  else if (parts[1] == "boundary") r.boundary = BoundaryRegime::NearBoundary;
  else bad("boundary mode must be interior or boundary");
  if (parts[2] == "u0zero") r.u0_positive = false;
  else if (parts[2] == "u0pos") r.u0_positive = true;
  else bad("u0 mode must be u0zero or u0pos");
  r.kind = parse_projection_kind(parts[3]);
  if (parts.size() == 5) r.nu = int_after(parts[4], "nu");
  return r;
}

ZetaRegime zeta_reference(const RegimeInputs& r) {
  if (r.n < 3) refuse(r, "dimension must be at least 3");
  if (r.nu < 1) refuse(r, "at least one bubble is required");
  ZetaRegime z;
  z.inputs = r;
  const int n = r.n;
  const bool u0 = r.u0_positive;
  const auto P1 = ProjectionKind::PU1, P2 = ProjectionKind::PU2;
  auto set = [&](double e, double lp, std::string row) {
    z.expected_exponent = e;
    z.expected_log_power = lp;
    z.row = std::move(row);
  };
  if (r.boundary == BoundaryRegime::Interior) {
    const ProjectionKind mandated = (n <= 4 && !u0) ? P2 : P1;
    const bool variant = n == 5 && !u0 && r.kind == P2;
    if (r.kind != mandated && !variant)
      refuse(r, std::string("interior regime requires the ") + to_string(mandated) +
                    " projection for these (n, u0)");
    if (variant) set(1, 0, "t (shifted projection absorbs the linear term)");
    else if (n <= 4) set(1, 0, n == 3 && !u0 && r.nu >= 2 ? "t (requires phi^3_lambda(xi_i) < 0 and lambda > lambda_*)" : "t");
    else if (n == 5) u0 ? set(1, 0, "t") : set(0.75, 0, "t^{3/4}");
    else if (n == 6) set(1, 0.5, "t |log t|^{1/2}");
    else if (r.nu == 1) set(1, 0, "t");
    else set((n + 2.0) / (2.0 * (n - 2)), 0, "t^{(n+2)/(2(n-2))}");
  } else {
    if (r.nu != 1) refuse(r, "near-boundary regime requires nu = 1 (multi-bubble boundary case is open)");
    const ProjectionKind mandated = (n == 3 || (n <= 5 && !u0)) ? P2 : P1;
    const bool variant = (n == 4 || n == 5) && u0 && r.kind == P2;
    if (r.kind != mandated && !variant)
      refuse(r, std::string("near-boundary regime requires the ") + to_string(mandated) +
                    " projection for these (n, u0)");
    if (variant) set(1, 0, "t (shifted projection)");
    else if (n == 3 || (n == 4 && !u0)) set(1, 0, "t");
    else if (n == 4 || n == 5) set((n - 2.0) / (n - 1.0), 0, "t^{(n-2)/(n-1)}");
    else if (n == 6) set(1, 0.5, "t |log t|^{1/2}");
    else set((n + 2.0) / (2.0 * (n - 1)), 0, "t^{(n+2)/(2(n-1))}");
  }
  return z;
}

double case1_epsilon(int n, int nu, bool u0_positive, double delta) {
  if (!(delta > 0 && delta < 1)) throw ConfigError("delta must lie in (0, 1)");
  if (!u0_positive && n == 3) return delta;
  if (!u0_positive && n == 4) return delta * delta * std::abs(std::log(delta));
  if (u0_positive && n >= 3 && n <= 5) return std::pow(delta, 0.5 * (n - 2));
  if (n >= 7 && nu == 1) return delta * delta;
  throw RegimeRefusal("the linear-regime construction does not apply for n=" + std::to_string(n) +
                      (u0_positive ? " with u0 > 0" : " with u0 = 0") + ", nu=" + std::to_string(nu));
}

Case1Result build_case1_example(const DiscPtr& dp, const std::optional<Field>& u0, ProjectionKind kind,
                                double lambda, const std::vector<BubbleParams>& bubbles, double eps_scale,
                                const FitOptions& fopt) {
  const auto& d = *dp;
  const int n = d.n();
  const int nu = static_cast<int>(bubbles.size());
  if (nu < 1) throw ConfigError("at least one bubble is required");
  if (u0 && u0->disc_ptr().get() != dp.get()) throw ConfigError("u0 lives on a different discretization");
  const double delta = bubbles.front().delta;
  for (auto& b : bubbles)
    if (std::abs(b.delta - delta) > 1e-12 * delta)
      throw ConfigError("the linear-regime construction uses a common scale for all bubbles");
  RegimeInputs ri{n, nu, u0.has_value(), BoundaryRegime::Interior, kind};
  auto zeta = zeta_reference(ri);
  if (zeta.expected_exponent != 1 || zeta.expected_log_power != 0)
    refuse(ri, "stability rate is not linear, use the projected-problem construction");
  const double eps = eps_scale * case1_epsilon(n, nu, u0.has_value(), delta);

  Projector P(dp, kind, lambda);
  const long N = static_cast<long>(d.size());
  const int q = d.radial() ? 1 : n + 1;
  std::vector<Field> pu;
  std::vector<Field> pz;  // bubble-major
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(N);
  for (auto& b : bubbles) {
    pu.push_back(P.bubble(b));
    sum += pu.back().values();
    for (int k = 0; k < q; ++k) pz.push_back(P.derivative(b, k));
  }
  const int m = static_cast<int>(pz.size());
  Eigen::MatrixXd Z(N, m), AZ(N, m);
  for (int a = 0; a < m; ++a) {
    Z.col(a) = pz[static_cast<size_t>(a)].values();
    AZ.col(a) = apply_A(d, lambda, Z.col(a));
  }
  Eigen::MatrixXd G = Z.transpose() * AZ;
  G = 0.5 * (G + G.transpose()).eval();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(G, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv(m - 1) <= 1e-12 * sv(0)) throw SolverError("Gram system of the PZ fields is singular");
  Eigen::VectorXd beta = svd.solve(-(AZ.transpose() * sum));
  Eigen::VectorXd phi = sum + Z * beta;
  const double Nphi = A_norm(d, lambda, phi);
  if (!(Nphi > 0)) throw SolverError("degenerate perturbation");

  Case1Result res;
  res.beta.assign(beta.data(), beta.data() + m);
  Eigen::VectorXd Aphi = apply_A(d, lambda, phi);
  for (int a = 0; a < m; ++a)
    res.phi_ortho = std::max(res.phi_ortho, std::abs(Aphi.dot(Z.col(a))) / (Nphi * std::sqrt(G(a, a))));

  const double s_pu = 1 + eps / Nphi;
  Eigen::VectorXd ustar = s_pu * sum + (eps / Nphi) * (Z * beta);
  std::vector<AnalyticPart> parts;
  for (int i = 0; i < nu; ++i) {
    const auto& b = bubbles[static_cast<size_t>(i)];
    const auto& f = pu[static_cast<size_t>(i)];
    parts.push_back({s_pu * f.values(), s_pu * P.bubble_operator_load(b, f)});
    for (int k = 0; k < q; ++k) {
      int a = i * q + k;
      double c = eps * beta[a] / Nphi;
      const auto& z = pz[static_cast<size_t>(a)];
      parts.push_back({c * z.values(), c * P.derivative_operator_load(b, k, z)});
    }
  }
  if (u0) ustar += u0->values();
  Field us(dp, ustar);
  EllipticSolver S(dp, lambda);
  auto g = gamma_residual(us, lambda, parts, &S);
  Field wneg = negative_part(us);
  Field fitted = g.clipped ? positive_part(us) : us;
  auto st = fit(fitted, u0, bubbles, kind, lambda, fopt);

  auto& rec = res.record;
  rec.regime = regime_name(ri);
  rec.n = n;
  rec.nu = nu;
  rec.kind = kind;
  rec.lambda = lambda;
  for (auto& b : bubbles) {
    rec.deltas.push_back(b.delta);
    rec.centres.push_back(b.xi);
  }
  double db = INFINITY;
  for (auto& b : bubbles) db = std::min(db, d.domain().distance_to_boundary(b.xi));
  rec.dist_boundary = db;
  rec.kappa = delta / db;
  rec.epsilon = eps;
  rec.gamma = g.gamma;
  rec.distance = st.distance;
  rec.neg_part = A_norm(d, lambda, wneg.values());
  rec.rho_norm = eps;
  res.u_star = fitted;
  return res;
}

Case2Result solve_projected_problem(const DiscPtr& dp, ProjectionKind kind, double lambda, double delta,
                                    const Case2Options& opt, const FitOptions& fopt) {
  const auto& d = *dp;
  require_radial_centre(d);
  const int n = d.n();
  RegimeInputs ri{n, 1, false, BoundaryRegime::Interior, kind};
  zeta_reference(ri);
  if (n != 5 && n != 6) refuse(ri, "the projected-problem construction is run for n = 5, 6 on radial meshes");
  if (!(delta > 0 && delta <= 0.3)) throw ConfigError("delta must lie in (0, 0.3]");
  const double p = critical_exponent(n);
  const long N = static_cast<long>(d.size());
  const auto& W = d.lumped_mass();

  Projector P(dp, kind, lambda);
  const auto b = BubbleParams::centered(n, delta);
  const Eigen::VectorXd pu = P.bubble(b).values();
  const Eigen::VectorXd pz = P.derivative(b, 0).values();
  Eigen::VectorXd I3(N);
  for (long i = 0; i < N; ++i) {
    double U = bubble_radial(n, delta, d.radii()[static_cast<size_t>(i)]);
    I3[i] = spow(pu[i], p) - std::pow(U, p) + (kind == ProjectionKind::PU1 ? lambda * pu[i] : 0.0);
  }
  Eigen::SparseMatrix<double> A = d.stiffness();
  for (long i = 0; i < N; ++i) A.coeffRef(i, i) -= lambda * W[i];
  A.makeCompressed();
  const Eigen::VectorXd Apz = A * pz;

  Eigen::VectorXd rho = Eigen::VectorXd::Zero(N);
  double c = 0;
  auto residual = [&](const Eigen::VectorXd& r, double cc) {
    Eigen::VectorXd F(N + 1);
    Eigen::VectorXd f1 = A * r - cc * Apz;
    for (long i = 0; i < N; ++i) f1[i] -= W[i] * (spow(pu[i] + r[i], p) - spow(pu[i], p) + I3[i]);
    F.head(N) = f1;
    F[N] = Apz.dot(r);
    return F;
  };
  Eigen::VectorXd F = residual(rho, c);
  const double f0 = F.norm();
  int it = 0;
  for (; it < opt.max_newton && F.norm() > opt.rel_tol * f0; ++it) {
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(static_cast<size_t>(A.nonZeros() + 2 * N + 1));
    for (int k = 0; k < A.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator e(A, k); e; ++e)
        t.emplace_back(static_cast<int>(e.row()), static_cast<int>(e.col()), e.value());
    for (long i = 0; i < N; ++i) {
      double us = pu[i] + rho[i];
      t.emplace_back(i, i, -p * W[i] * std::pow(std::abs(us), p - 1));
      t.emplace_back(i, N, -Apz[i]);
      t.emplace_back(N, i, Apz[i]);
    }
    Eigen::SparseMatrix<double> J(N + 1, N + 1);
    J.setFromTriplets(t.begin(), t.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(J);
    if (lu.info() != Eigen::Success) throw SolverError("bordered Jacobian is singular (lambda resonance?)");
    Eigen::VectorXd dx = lu.solve(-F);
    double step = 1.0;
    bool capped = false;
    Eigen::VectorXd Fn;
    for (int h = 0; h <= opt.max_halvings; ++h) {
      Fn = residual(rho + step * dx.head(N), c + step * dx[N]);
      if (Fn.norm() < (1 - 1e-4 * step) * F.norm()) break;
      if (h == opt.max_halvings) {
        capped = true;  // take the shortest step
        break;
      }
      step *= 0.5;
    }
    rho += step * dx.head(N);
    c += step * dx[N];
    F = Fn;
    if (!F.allFinite()) throw SolverError("Newton iteration diverged");
    // No descent left at the rounding floor.
    if (capped && F.norm() <= 1e3 * opt.rel_tol * f0) break;
  }
  if (F.norm() > 1e3 * opt.rel_tol * f0) throw SolverError("Newton iteration did not converge");

  Case2Result res;
  res.newton_iterations = it;
  res.multiplier = c;
  Eigen::VectorXd us = pu + rho;
  Eigen::VectorXd w = (-us).cwiseMax(0.0);
  Eigen::VectorXd ustar = us.cwiseMax(0.0);
  Eigen::VectorXd load = c * Apz + A * w;
  for (long i = 0; i < N; ++i) load[i] -= W[i] * std::pow(w[i], p);
  EllipticSolver S(dp, lambda);
  const double gamma = dual_norm_load(S, load);
  const double rn = A_norm(d, lambda, rho);
  const double zn = A_norm(d, lambda, pz);
  res.ortho_residual = rn > 0 ? std::abs(Apz.dot(rho)) / (rn * zn) : 0.0;
  res.rho = Field(dp, rho);
  res.u_star = Field(dp, ustar);
  auto st = fit(res.u_star, std::nullopt, {b}, kind, lambda, fopt);

  auto& rec = res.record;
  rec.regime = regime_name(ri);
  rec.n = n;
  rec.kind = kind;
  rec.lambda = lambda;
  rec.deltas = {delta};
  rec.centres = {b.xi};
  rec.dist_boundary = 1.0;
  rec.kappa = delta;
  rec.gamma = gamma;
  rec.distance = st.distance;
  rec.neg_part = A_norm(d, lambda, w);
  rec.rho_norm = rn;
  rec.multiplier = std::abs(c);
  return res;
}

Field interpolate_radial(const Field& radial, const DiscPtr& target) {
  const auto& rd = radial.disc();
  if (!rd.radial()) throw ConfigError("source field must live on a radial mesh");
  if (target->domain().kind != DomainKind::UnitBall || target->n() != rd.n() ||
      target->domain().ball_radius != rd.domain().ball_radius)
    throw ConfigError("target must discretize the same ball");
  const auto& r = rd.radii();
  std::vector<double> v(radial.values().data(), radial.values().data() + radial.size());
  v.push_back(0.0);  // boundary node
  return Field::sample(target, [&](std::span<const double> x) {
    double s = 0;
    for (double c : x) s += c * c;
    s = std::sqrt(s);
    if (s >= r.back()) return 0.0;
    size_t j = static_cast<size_t>(std::upper_bound(r.begin(), r.end(), s) - r.begin());
    if (j == 0) return v.front();
    double t = (s - r[j - 1]) / (r[j] - r[j - 1]);
    return (1 - t) * v[j - 1] + t * v[j];
  });
}

bool SweepResult::within(double tolerance) const {
  return has_fit && std::abs(fit.slope - regime.expected_exponent) <= tolerance;
}

SweepResult exponent_sweep(const SweepConfig& c) {
  SweepResult res;
  res.regime = zeta_reference(c.regime);
  const auto& r = c.regime;
  const int n = r.n;
  if (!(c.lambda_fraction > 0 && c.lambda_fraction < 1)) throw ConfigError("lambda fraction must lie in (0, 1)");
  const double lambda = c.lambda_fraction * unit_ball_lambda1(n);

  if (r.boundary == BoundaryRegime::NearBoundary) {
    res.construction = "projection";
    res.records = boundary_sweep(n, r.kind, lambda, c.distances, c.delta_power);
    for (auto& rec : res.records) {
      rec.regime = regime_name(r);
      rec.seed = c.seed;
    }
    return res;
  }
  const bool linear = res.regime.expected_exponent == 1 && res.regime.expected_log_power == 0 &&
                      !(n == 5 && !r.u0_positive);
  // The projected problem has no small solution at moderate scales, so its default grid is finer.
  std::vector<double> deltas = c.deltas;
  if (deltas.empty())
    deltas = linear ? std::vector<double>{0.2, 0.1, 0.05, 0.025}
                    : std::vector<double>{0.05, 0.025, 0.0125, 0.00625, 0.003125, 0.0015625};
  if (deltas.size() < 3) throw ConfigError("a sweep needs at least three delta values");
  std::vector<ExperimentRecord> recs(deltas.size());
  if (linear) {
    res.construction = "case1";
    case1_epsilon(n, r.nu, r.u0_positive, 0.1);  // refusal check before any solve
    DiscPtr d;
    std::optional<Field> u0;
    std::vector<std::vector<double>> centres;
    if (r.nu == 1) {
      if (c.grid.mode != GridMode::Radial1D) throw ConfigError("single-bubble sweeps run on radial meshes");
      d = Discretization::make(DomainModel::ball(n), c.grid);
      centres.push_back(std::vector<double>(static_cast<size_t>(n), 0.0));
    } else {
      if (n != 3 || r.nu > 3) refuse(r, "multi-bubble PDE sweeps are limited to n = 3 and nu <= 3");
      d = Discretization::make(DomainModel::ball(3), GridSpec::tensor(c.tensor_points));
      for (int i = 0; i < r.nu; ++i) {
        double a = 2 * std::numbers::pi * i / r.nu;
        centres.push_back(r.nu == 2 ? std::vector<double>{i == 0 ? -0.4 : 0.4, 0, 0}
                                    : std::vector<double>{0.4 * std::cos(a), 0.4 * std::sin(a), 0});
      }
    }
    if (r.u0_positive) {
      auto rd = d->radial() ? d : Discretization::make(DomainModel::ball(n), GridSpec::radial());
      auto gs = solve_ground_state(rd, lambda);
      if (!gs.attained)
        refuse(r, "no positive solution u0 at this lambda (ground state not attained)");
      u0 = d->radial() ? gs.u0 : interpolate_radial(gs.u0, d);
    }
    parallel_for(deltas.size(), [&](size_t i) {
      std::vector<BubbleParams> bs;
      for (auto& x : centres) bs.emplace_back(n, deltas[i], x);
      recs[i] = build_case1_example(d, u0, r.kind, lambda, bs, c.eps_scale).record;
    });
  } else if ((n == 5 && !r.u0_positive) || n == 6) {
    res.construction = "case2";
    if (r.nu != 1) refuse(r, "the projected-problem construction is run for a single centred bubble");
    if (c.grid.mode != GridMode::Radial1D) throw ConfigError("the projected-problem construction needs a radial mesh");
    auto d = Discretization::make(DomainModel::ball(n), c.grid);
    parallel_for(deltas.size(), [&](size_t i) {
      recs[i] = solve_projected_problem(d, r.kind, lambda, deltas[i]).record;
    });
  } else {
    refuse(r, "declared quadrature-level only (PDE construction beyond desk scale)");
  }
  std::vector<double> G, D, ratio;
  for (auto& rec : recs) {
    rec.seed = c.seed;
    G.push_back(rec.gamma);
    D.push_back(rec.distance);
    ratio.push_back(rec.distance / rec.gamma);
  }
  res.records = std::move(recs);
  res.fit = fit_power_law(G, D, res.regime.expected_log_power);
  res.has_fit = true;
  auto [mn, mx] = std::minmax_element(ratio.begin(), ratio.end());
  res.ratio_log_range = std::log(*mx / *mn);
  return res;
}

double centre_projection_error(const DiscPtr& dp, double delta, const SolverOptions& opt) {
  const auto& d = *dp;
  if (d.domain().kind != DomainKind::UnitBall || d.domain().ball_radius != 1.0)
    throw ConfigError("the exact centre formula holds on the unit ball");
  const int n = d.n();
  Projector P(dp, ProjectionKind::PU1, 0.0, opt);
  auto b = BubbleParams::centered(n, delta);
  auto pu = P.bubble(b);
  const double shift = dimensional_constant(n) * std::pow(delta / (1 + delta * delta), 0.5 * (n - 2));
  double err = 0;
  for (size_t i = 0; i < d.size(); ++i)
    err = std::max(err, std::abs(pu[i] - (eval_bubble(b, d.node(i)) - shift)));
  return err;
}

double expansion_defect(const DiscPtr& dp, ProjectionKind kind, double lambda, double delta) {
  const auto& d = *dp;
  require_radial_centre(d);
  const int n = d.n();
  if (kind == ProjectionKind::PU2 && n != 3)
    throw RegimeRefusal("the shifted expansion with its correction profile is implemented for n = 3");
  Projector P(dp, kind, lambda);
  auto b = BubbleParams::centered(n, delta);
  auto pu = P.bubble(b);
  const double an = dimensional_constant(n);
  const double lead = an * std::pow(delta, 0.5 * (n - 2));
  std::optional<DnProfile> D;
  if (kind == ProjectionKind::PU2) D.emplace(3, lambda);
  double err = 0;
  for (size_t i = 0; i < d.size(); ++i) {
    double r = d.radii()[i];
    double s = pu[i] - bubble_radial(n, delta, r);
    if (kind == ProjectionKind::PU1) {
      s += lead;
    } else {
      double H = r > 0 ? shifted_regular_part_ball3(lambda, r) : robin_shifted_center(3, lambda);
      s += lead * (0.5 * lambda * r + H) - std::pow(delta, 1.5) * (*D)(r / delta);
    }
    err = std::max(err, std::abs(s));
  }
  return err;
}

std::vector<ProjectionCheck> interior_projection_sweep(int n, ProjectionKind kind, double lambda,
                                                       const std::vector<double>& deltas, const GridSpec& grid) {
  if (grid.mode != GridMode::Radial1D) throw ConfigError("projection checks run on radial meshes");
  auto dp = Discretization::make(DomainModel::ball(n), grid);
  const auto& d = *dp;
  const double p = critical_exponent(n);
  std::vector<ProjectionCheck> out(deltas.size());
  // Predictions first so refusals surface before any solve.
  for (size_t i = 0; i < deltas.size(); ++i) {
    ProjectionConfig pc;
    pc.n = n;
    pc.kind = kind;
    pc.lambda = lambda;
    pc.delta = deltas[i];
    pc.xi.assign(static_cast<size_t>(n), 0.0);
    out[i].delta = deltas[i];
    out[i].predicted = projection_prediction(pc).dilation;
  }
  parallel_for(deltas.size(), [&](size_t i) {
    Projector P(dp, kind, lambda);
    auto b = BubbleParams::centered(n, deltas[i]);
    auto pu = P.bubble(b).values();
    auto pz = P.derivative(b, 0).values();
    double m = 0;
    for (long j = 0; j < pu.size(); ++j) {
      double U = bubble_radial(n, deltas[i], d.radii()[static_cast<size_t>(j)]);
      double I3 = std::pow(std::max(pu[j], 0.0), p) - std::pow(U, p);
      if (kind == ProjectionKind::PU1) I3 += lambda * pu[j];
      m += d.lumped_mass()[j] * I3 * pz[j];
    }
    out[i].measured = m;
  });
  return out;
}

std::vector<ExperimentRecord> boundary_sweep(int n, ProjectionKind kind, double lambda,
                                             const std::vector<double>& distances, double delta_power) {
  RegimeInputs ri{n, 1, false, BoundaryRegime::NearBoundary, kind};
  zeta_reference(ri);
  if (n < 6 || kind != ProjectionKind::PU1)
    refuse(ri, "near-boundary projections are evaluated by quadrature for n >= 6 with u0 = 0 (pu1)");
  if (!(delta_power > 1)) throw ConfigError("delta = d^power needs power > 1 so that kappa -> 0");
  std::vector<ExperimentRecord> out(distances.size());
  parallel_for(distances.size(), [&](size_t i) {
    double dist = distances[i];
    if (!(dist > 0 && dist < 1)) throw ConfigError("boundary distance must lie in (0, 1)");
    double delta = std::pow(dist, delta_power);
    auto bp = boundary_projection(n, lambda, dist, delta);
    auto& rec = out[i];
    rec.regime = regime_name(ri);
    rec.n = n;
    rec.kind = kind;
    rec.lambda = lambda;
    rec.deltas = {delta};
    std::vector<double> xi(static_cast<size_t>(n), 0.0);
    xi[0] = 1 - dist;
    rec.centres = {xi};
    rec.dist_boundary = dist;
    rec.kappa = bp.kappa;
    rec.pred_dil = bp.predicted_dilation;
    rec.meas_dil = bp.measured_dilation;
    rec.pred_tr = bp.predicted_translation;
    rec.meas_tr = bp.measured_translation;
  });
  return out;
}

double balance_radius(int n, double lambda, double delta, double tol) {
  if (n < 5) throw RegimeRefusal("the b_n lambda delta^2 = c_n phi delta^{n-2} balance needs n >= 5");
  if (!(lambda > 0) || !(delta > 0 && delta < 1)) throw ConfigError("need lambda > 0 and delta in (0, 1)");
  auto sc = structural_constants(n);
  auto g = [&](double r) {
    double phi = std::pow(1 - r * r, 2.0 - n);
    return sc.b.value * lambda * delta * delta - sc.c.value * phi * std::pow(delta, n - 2.0);
  };
  double lo = 0, hi = 1 - 1e-15;
  if (g(lo) <= 0) throw RegimeRefusal("no balance point: the Robin term already dominates at the centre");
  while (hi - lo > tol) {
    double mid = 0.5 * (lo + hi);
    (g(mid) > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

RoundTripResult fit_round_trip(const RoundTripConfig& c) {
  if (c.truth.empty()) throw ConfigError("round trip needs at least one bubble");
  const int n = c.truth.front().n;
  if (n != 3) throw ConfigError("round trip runs on the 3-D grid");
  auto dp = Discretization::make(DomainModel::ball(3), GridSpec::tensor(c.points_per_axis));
  const auto& d = *dp;
  const double lambda = c.lambda_fraction * unit_ball_lambda1(3);
  std::optional<Field> u0;
  if (c.with_u0) {
    auto rd = Discretization::make(DomainModel::ball(3), GridSpec::radial());
    auto gs = solve_ground_state(rd, lambda);
    if (!gs.attained) throw ConfigError("no positive solution u0 at this lambda; lower the fraction or drop u0");
    u0 = interpolate_radial(gs.u0, dp);
  }
  const auto kind = ProjectionKind::PU2;
  Projector P(dp, kind, lambda);
  const long N = static_cast<long>(d.size());
  Eigen::VectorXd sigma = Eigen::VectorXd::Zero(N);
  std::vector<Eigen::VectorXd> Z;
  for (auto& b : c.truth) {
    sigma += P.bubble(b).values();
    for (int k = 0; k <= n; ++k) Z.push_back(P.derivative(b, k).values());
  }
  // Smooth, asymmetric perturbation made orthogonal to every PZ.
  Field base = Field::sample(dp, [](std::span<const double> x) {
    double r2 = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
    return (1 - r2) * (1 + x[1] + 0.5 * x[0] * x[2] + 0.3 * x[2] * x[2]);
  });
  const int m = static_cast<int>(Z.size());
  Eigen::MatrixXd Zm(N, m), AZ(N, m);
  for (int a = 0; a < m; ++a) {
    Zm.col(a) = Z[static_cast<size_t>(a)];
    AZ.col(a) = apply_A(d, lambda, Zm.col(a));
  }
  Eigen::MatrixXd G = Zm.transpose() * AZ;
  Eigen::VectorXd coef = G.ldlt().solve(AZ.transpose() * base.values());
  Eigen::VectorXd phi = base.values() - Zm * coef;
  phi /= A_norm(d, lambda, phi);
  Eigen::VectorXd u = sigma + c.epsilon * phi;
  if (u0) u += u0->values();

  std::vector<BubbleParams> init = c.truth;
  for (auto& b : init) {
    b.delta *= 1.1;
    b.xi[0] += 0.02;
    b.xi[1] -= 0.01;
    b.xi[2] += 0.01;
  }
  RoundTripResult res;
  res.state = fit(Field(dp, u), u0, init, kind, lambda);
  res.truth = c.truth;
  canonical_order(res.truth);
  canonical_order(res.state.bubbles);
  res.constructed_distance = c.epsilon;
  // Pair by nearest centre; equal-scale bubbles need not keep their order.
  for (size_t i = 0; i < res.truth.size(); ++i) {
    const auto& t = res.truth[i];
    const BubbleParams* best = nullptr;
    double bd = INFINITY;
    for (auto& cand : res.state.bubbles) {
      double s = 0;
      for (int k = 0; k < n; ++k) s += std::pow(cand.xi[static_cast<size_t>(k)] - t.xi[static_cast<size_t>(k)], 2);
      if (s < bd) bd = s, best = &cand;
    }
    const auto& f = *best;
    res.max_param_error = std::max(res.max_param_error, std::abs(f.delta - t.delta) / t.delta);
    for (int k = 0; k < n; ++k)
      res.max_param_error = std::max(res.max_param_error,
                                     std::abs(f.xi[static_cast<size_t>(k)] - t.xi[static_cast<size_t>(k)]) / t.delta);
  }
  res.distance_rel_error = std::abs(res.state.distance - c.epsilon) / c.epsilon;
  return res;
}

}  // namespace bl
