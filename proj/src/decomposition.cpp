#include "bubblelab/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

#include "bubblelab/errors.hpp"
#include "bubblelab/interaction.hpp"
#include "bubblelab/parallel.hpp"

namespace bl {

double DecompositionState::ortho_max() const {
  double m = 0;
  for (auto& row : ortho_residuals)
    for (double v : row) m = std::max(m, v);
  return m;
}

namespace {

Eigen::VectorXd apply_A(const Discretization& d, double lam, const Eigen::VectorXd& v) {
  return d.stiffness() * v - lam * d.lumped_mass().cwiseProduct(v);
}

int params_per_bubble(const Discretization& d) { return d.radial() ? 1 : d.n() + 1; }

// Empty string when admissible, otherwise the reason.
std::string admissibility(const Discretization& d, const std::vector<BubbleParams>& bs,
                          const FitOptions& o) {
  const double dmin = d.radial() ? 1e-5 : o.min_delta_cells * d.spacing();
  for (auto& b : bs) {
    if (!std::isfinite(b.delta) || b.delta < dmin) {
      std::ostringstream s;
      s << "scale " << b.delta << " below the resolved range (" << dmin << ")";
      return s.str();
    }
    if (b.delta > o.max_delta) return "scale above the admissible range";
    if (!d.domain().contains(b.xi)) return "centre left the domain";
    if (d.domain().distance_to_boundary(b.xi) < o.min_boundary_ratio * b.delta)
      return "centre too close to the boundary for its scale";
  }
  return {};
}

struct Evaluated {
  std::vector<Field> pu;
  std::vector<std::vector<Field>> pz;  // per bubble, k = 0..n (radial: k = 0 only)
  Eigen::VectorXd sigma, rho;
  double dist2 = 0;
};

Evaluated evaluate(const Projector& P, const Eigen::VectorXd& target,
                   const std::vector<BubbleParams>& bs, bool derivatives) {
  const auto& d = *P.disc();
  Evaluated e;
  e.sigma = Eigen::VectorXd::Zero(target.size());
  for (auto& b : bs) {
    e.pu.push_back(P.bubble(b));
    e.sigma += e.pu.back().values();
    if (derivatives) {
      std::vector<Field> z;
      const int kmax = d.radial() ? 0 : d.n();
      for (int k = 0; k <= kmax; ++k) z.push_back(P.derivative(b, k));
      e.pz.push_back(std::move(z));
    }
  }
  e.rho = target - e.sigma;
  e.dist2 = std::max(0.0, e.rho.dot(apply_A(d, P.lambda(), e.rho)));
  return e;
}

std::vector<std::vector<double>> ortho_table(const Discretization& d, double lam, const Evaluated& e) {
  const int n = d.n();
  Eigen::VectorXd Arho = apply_A(d, lam, e.rho);
  double nr = std::sqrt(e.dist2);
  std::vector<std::vector<double>> t;
  for (auto& zs : e.pz) {
    std::vector<double> row(static_cast<size_t>(n + 1), 0.0);
    for (size_t k = 0; k < zs.size(); ++k) {
      const auto& z = zs[k].values();
      double nz = std::sqrt(std::max(0.0, z.dot(apply_A(d, lam, z))));
      row[k] = (nr > 0 && nz > 0) ? std::abs(Arho.dot(z)) / (nr * nz) : 0.0;
    }
    t.push_back(row);
  }
  return t;
}

DecompositionState make_state(const Field& u, const std::optional<Field>& u0,
                              const std::vector<BubbleParams>& bs, ProjectionKind kind, double lam,
                              const Evaluated& e) {
  DecompositionState s;
  s.u = u;
  s.u0 = u0;
  s.bubbles = bs;
  s.kind = kind;
  s.lambda = lam;
  s.sigma = Field(u.disc_ptr(), e.sigma);
  s.rho = Field(u.disc_ptr(), e.rho);
  s.distance = std::sqrt(e.dist2);
  s.ortho_residuals = ortho_table(u.disc(), lam, e);
  return s;
}

Eigen::VectorXd target_of(const Field& u, const std::optional<Field>& u0) {
  if (!u0) return u.values();
  u.check_compatible(*u0);
  return u.values() - u0->values();
}

void check_inputs(const Field& u, const std::vector<BubbleParams>& bs, double lam) {
  const auto& d = u.disc();
  if (bs.empty()) throw ConfigError("fit needs at least one bubble");
  if (bs.size() > 3) throw ConfigError("fits with more than three bubbles are not supported");
  if (d.radial() && bs.size() > 1) throw ConfigError("radial grids support a single centred bubble");
  if (!(lam >= 0)) throw ConfigError("lambda must be >= 0");
  for (auto& b : bs)
    if (b.n != d.n() || b.xi.size() != static_cast<size_t>(d.n()))
      throw ConfigError("bubble dimension differs from the field");
  u.check_finite();
}

}  // namespace

void canonical_order(std::vector<BubbleParams>& b) {
  std::stable_sort(b.begin(), b.end(), [](const BubbleParams& x, const BubbleParams& y) {
    if (x.delta != y.delta) return x.delta < y.delta;
    return x.xi < y.xi;
  });
}

DecompositionState evaluate_configuration(const Field& u, const std::optional<Field>& u0,
                                          const std::vector<BubbleParams>& bubbles,
                                          ProjectionKind kind, double lambda,
                                          const SolverOptions& sopt) {
  check_inputs(u, bubbles, lambda);
  Projector P(u.disc_ptr(), kind, lambda, sopt);
  auto e = evaluate(P, target_of(u, u0), bubbles, true);
  auto s = make_state(u, u0, bubbles, kind, lambda, e);
  s.converged = true;
  return s;
}

DecompositionState fit(const Field& u, const std::optional<Field>& u0,
                       const std::vector<BubbleParams>& init, ProjectionKind kind, double lambda,
                       const FitOptions& opt) {
  check_inputs(u, init, lambda);
  const auto& d = u.disc();
  if (auto why = admissibility(d, init, opt); !why.empty())
    throw ConfigError("initial configuration not admissible: " + why);
  for (size_t i = 0; i < init.size(); ++i) {
    if (init[i].delta > 0.3 || init[i].delta > 0.5 * d.domain().distance_to_boundary(init[i].xi))
      throw ConfigError("initial configuration outside the well-separated neighbourhood (delta <= 0.3, delta/dist <= 0.5)");
    for (size_t j = i + 1; j < init.size(); ++j)
      if (pair_quantities(init[i], init[j]).q > 0.5)
        throw ConfigError("initial bubbles interact too strongly (q > 0.5)");
  }

  Projector P(u.disc_ptr(), kind, lambda, opt.solver);
  const Eigen::VectorXd target = target_of(u, u0);
  const double unorm = std::sqrt(std::max(0.0, target.dot(apply_A(d, lambda, target))));
  const int q = params_per_bubble(d);
  const int nu = static_cast<int>(init.size());
  const int m = nu * q;

  auto bs = init;
  Evaluated cur = evaluate(P, target, bs, true);
  double mu = 1e-4;
  int it = 0;
  bool converged = false;
  std::string escape;
  for (; it < opt.max_iter; ++it) {
    if (std::sqrt(cur.dist2) <= opt.floor * unorm) {
      converged = true;
      break;
    }
    auto ortho = ortho_table(d, lambda, cur);
    double omax = 0;
    for (auto& r : ortho)
      for (double v : r) omax = std::max(omax, v);
    // Stop well inside the requested tolerance so the parameters settle too.
    if (omax <= 1e-3 * opt.ortho_tol) {
      converged = true;
      break;
    }
    Eigen::MatrixXd J(target.size(), m);
    for (int i = 0; i < nu; ++i)
      for (int k = 0; k < q; ++k) {
        double s = k == 0 ? 1.0 : 1.0 / bs[static_cast<size_t>(i)].delta;
        J.col(i * q + k) = s * cur.pz[static_cast<size_t>(i)][static_cast<size_t>(k)].values();
      }
    Eigen::MatrixXd AJ(target.size(), m);
    for (int c = 0; c < m; ++c) AJ.col(c) = apply_A(d, lambda, J.col(c));
    Eigen::MatrixXd G = J.transpose() * AJ;
    G = 0.5 * (G + G.transpose()).eval();
    Eigen::VectorXd g = AJ.transpose() * cur.rho;
    Eigen::VectorXd D = G.diagonal().cwiseMax(1e-300);

    bool accepted = false;
    for (int tries = 0; tries < 16 && !accepted; ++tries) {
      Eigen::MatrixXd H = G;
      H.diagonal() += mu * D;
      Eigen::VectorXd step = H.ldlt().solve(g);
      auto trial = bs;
      for (int i = 0; i < nu; ++i) {
        auto& b = trial[static_cast<size_t>(i)];
        b.delta *= std::exp(step[i * q]);
        for (int k = 1; k < q; ++k) b.xi[static_cast<size_t>(k - 1)] += step[i * q + k];
      }
      if (auto why = admissibility(d, trial, opt); !why.empty()) {
        escape = why;
        mu *= 10;
        continue;
      }
      Evaluated e = evaluate(P, target, trial, false);
      if (e.dist2 < cur.dist2) {
        bs = trial;
        cur = evaluate(P, target, bs, true);
        mu = std::max(mu / 10, 1e-12);
        accepted = true;
        escape.clear();
      } else {
        mu *= 10;
      }
    }
    if (!accepted) {
      // No descent left: either at the discrete minimum or pushed out of the region.
      if (omax <= opt.ortho_tol) converged = true;
      else if (!escape.empty()) throw SolverError("fit parameter escape: " + escape);
      break;
    }
    mu = std::min(mu, 1e6);
  }
  auto s = make_state(u, u0, bs, kind, lambda, cur);
  s.iterations = it;
  if (std::sqrt(cur.dist2) <= opt.floor * unorm) {
    for (auto& r : s.ortho_residuals) std::fill(r.begin(), r.end(), 0.0);
    converged = true;
  }
  s.converged = converged && s.ortho_max() <= opt.ortho_tol;
  if (!s.converged) {
    std::ostringstream msg;
    msg << "fit did not converge after " << it << " iterations (orthogonality residual "
        << s.ortho_max() << ")";
    throw SolverError(msg.str());
  }
  return s;
}

ErrorFields assemble_error_fields(const DecompositionState& s, double lambda) {
  const auto& u = s.u;
  u.check_compatible(s.sigma);
  u.check_compatible(s.rho);
  if (s.u0) u.check_compatible(*s.u0);
  const auto& d = u.disc();
  const double p = critical_exponent(d.n());
  const long N = static_cast<long>(d.size());
  auto spow = [p](double v) { return std::copysign(std::pow(std::abs(v), p), v); };

  Eigen::VectorXd w = s.sigma.values();
  if (s.u0) w += s.u0->values();
  Eigen::VectorXd I0(N), I1 = Eigen::VectorXd::Zero(N), I2(N), I3 = Eigen::VectorXd::Zero(N);
  for (long i = 0; i < N; ++i) {
    double wi = w[i], r = s.rho.values()[i];
    I0[i] = spow(wi + r) - spow(wi) - p * std::pow(std::abs(wi), p - 1) * r;
    if (s.u0) I1[i] = spow(wi) - spow(s.u0->values()[i]) - spow(s.sigma.values()[i]);
  }
  Projector P(u.disc_ptr(), s.kind, lambda);
  Eigen::VectorXd sum_pow = Eigen::VectorXd::Zero(N);
  for (auto& b : s.bubbles) {
    Field pu = P.bubble(b);
    for (long i = 0; i < N; ++i) {
      double v = pu.values()[i];
      double Ui = eval_bubble(b, d.node(static_cast<size_t>(i)));
      sum_pow[i] += spow(v);
      I3[i] += spow(v) - std::pow(Ui, p);
      if (s.kind == ProjectionKind::PU1) I3[i] += lambda * v;
    }
  }
  for (long i = 0; i < N; ++i) I2[i] = spow(s.sigma.values()[i]) - sum_pow[i];
  auto D = u.disc_ptr();
  return {Field(D, I0), Field(D, I1), Field(D, I2), Field(D, I3)};
}

std::vector<std::vector<BubbleParams>> multistart_grid(const Discretization& d, int nu, int count,
                                                       unsigned long seed) {
  if (nu < 1 || nu > 3) throw ConfigError("number of bubbles must be 1, 2 or 3");
  if (count < 1) throw ConfigError("multistart count must be >= 1");
  const int n = d.n();
  const std::vector<double> deltas = {0.05, 0.1, 0.2};
  std::vector<std::vector<double>> centres;
  if (d.radial()) {
    if (nu > 1) throw ConfigError("radial grids support a single centred bubble");
    centres.push_back(std::vector<double>(static_cast<size_t>(n), 0.0));
  } else {
    // Coarse lattice, spacing 0.4 around the domain centre, kept well inside.
    std::vector<double> mid(static_cast<size_t>(n), 0.0);
    if (d.domain().kind == DomainKind::Box)
      for (int k = 0; k < n; ++k)
        mid[static_cast<size_t>(k)] = 0.5 * (d.domain().box_extents[static_cast<size_t>(k)][0] +
                                             d.domain().box_extents[static_cast<size_t>(k)][1]);
    int total = 1;
    for (int k = 0; k < n; ++k) total *= 3;
    for (int c = 0; c < total; ++c) {
      std::vector<double> x(mid);
      for (int k = 0, r = c; k < n; ++k, r /= 3) x[static_cast<size_t>(k)] += 0.4 * (r % 3 - 1);
      if (d.domain().contains(x) && d.domain().distance_to_boundary(x) >= 0.4) centres.push_back(x);
    }
  }
  std::vector<std::vector<BubbleParams>> all;
  std::vector<size_t> idx(static_cast<size_t>(nu), 0);
  // Enumerate strictly increasing centre index tuples times scale tuples.
  std::function<void(int, size_t, std::vector<BubbleParams>&)> rec =
      [&](int level, size_t from, std::vector<BubbleParams>& cur) {
        if (level == nu) {
          for (size_t i = 0; i < cur.size(); ++i)
            for (size_t j = i + 1; j < cur.size(); ++j)
              if (pair_quantities(cur[i], cur[j]).q > 0.5) return;
          all.push_back(cur);
          return;
        }
        for (size_t c = from; c < centres.size(); ++c)
          for (double dl : deltas) {
            if (dl > 0.5 * d.domain().distance_to_boundary(centres[c])) continue;
            cur.emplace_back(n, dl, centres[c]);
            rec(level + 1, c + 1, cur);
            cur.pop_back();
          }
      };
  std::vector<BubbleParams> cur;
  rec(0, 0, cur);
  if (all.empty()) throw ConfigError("no admissible multistart configuration for this domain");
  std::mt19937_64 rng(seed);
  // Fisher-Yates with explicit index draws so the order does not depend on the library.
  for (size_t i = all.size() - 1; i > 0; --i) {
    size_t j = static_cast<size_t>(rng() % (i + 1));
    std::swap(all[i], all[j]);
  }
  if (all.size() > static_cast<size_t>(count)) all.resize(static_cast<size_t>(count));
  return all;
}

MultistartResult fit_multistart(const Field& u, const std::optional<Field>& u0, int nu,
                                ProjectionKind kind, double lambda, int count, unsigned long seed,
                                const FitOptions& opt,
                                const std::vector<std::vector<BubbleParams>>& extra_starts) {
  auto starts = extra_starts;
  for (auto& s : starts)
    if (static_cast<int>(s.size()) != nu) throw ConfigError("explicit start has the wrong number of bubbles");
  for (auto& s : multistart_grid(u.disc(), nu, count, seed)) starts.push_back(s);
  MultistartResult r;
  r.starts.resize(starts.size());
  r.failures.resize(starts.size());
  parallel_for(starts.size(), [&](size_t i) {
    try {
      r.starts[i] = fit(u, u0, starts[i], kind, lambda, opt);
      canonical_order(r.starts[i].bubbles);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      r.failures[i] = e.what();
      r.starts[i] = DecompositionState{};
      r.starts[i].bubbles = starts[i];
      r.starts[i].converged = false;
      r.starts[i].distance = std::numeric_limits<double>::infinity();
    }
  });
  bool any = false;
  for (size_t i = 0; i < r.starts.size(); ++i) {
    if (!r.starts[i].converged) continue;
    if (!any || r.starts[i].distance < r.starts[r.best].distance) r.best = i;
    any = true;
  }
  if (!any) throw SolverError("all " + std::to_string(starts.size()) + " fit starts failed: " + r.failures.front());
  return r;
}

double distance_functional(const Field& u, const std::optional<Field>& u0, int nu,
                           ProjectionKind kind, double lambda, int count, unsigned long seed,
                           const FitOptions& opt) {
  return fit_multistart(u, u0, nu, kind, lambda, count, seed, opt).distance();
}

void write_fit_report_csv(std::ostream& os, const MultistartResult& r) {
  if (r.starts.empty()) return;
  const size_t nu = r.starts.front().bubbles.size();
  const int n = r.starts.front().bubbles.front().n;
  os << "start,converged,distance";
  for (size_t i = 1; i <= nu; ++i) os << ",delta_" << i;
  for (size_t i = 1; i <= nu; ++i)
    for (int k = 1; k <= n; ++k) os << ",xi_" << i << "_" << k;
  os << ",ortho_max\n";
  os << std::setprecision(12);
  for (size_t s = 0; s < r.starts.size(); ++s) {
    const auto& st = r.starts[s];
    os << s << "," << (st.converged ? 1 : 0) << ",";
    if (st.converged) os << st.distance;
    else os << "nan";
    for (auto& b : st.bubbles) os << "," << b.delta;
    for (auto& b : st.bubbles)
      for (double x : b.xi) os << "," << x;
    os << ",";
    if (st.converged) os << st.ortho_max();
    else os << "nan";
    os << "\n";
  }
}

}  // namespace bl
