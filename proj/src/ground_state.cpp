#include "bubblelab/ground_state.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <cmath>

#include "bubblelab/bubbles.hpp"
#include "bubblelab/errors.hpp"

namespace bl {

namespace {

const double kGx[6] = {-0.9324695142031521, -0.6612093864662645, -0.2386191860831969,
                       0.2386191860831969, 0.6612093864662645, 0.9324695142031521};
const double kGw[6] = {0.1713244923791704, 0.3607615730481386, 0.4679139345726910,
                       0.4679139345726910, 0.3607615730481386, 0.1713244923791704};

// int |u|^{q} and the consistent load int |u|^{q-2} u phi_i on P1 elements
double power_integral(const Discretization& d, const Eigen::VectorXd& u, double q, Eigen::VectorXd* load) {
  const auto& r = d.radii();
  const size_t N = r.size() - 1;
  const double S = sphere_area(d.n());
  double total = 0;
  if (load) load->setZero(static_cast<long>(N));
  for (size_t e = 0; e < N; ++e) {
    double a = r[e], b = r[e + 1], h = b - a;
    double ua = u[static_cast<long>(e)], ub = e + 1 < N ? u[static_cast<long>(e + 1)] : 0.0;
    for (int k = 0; k < 6; ++k) {
      double t = 0.5 * (kGx[k] + 1);
      double rr = a + t * h;
      double w = S * std::pow(rr, d.n() - 1) * h * kGw[k] / 2;
      double v = ua * (1 - t) + ub * t;
      double av = std::abs(v);
      total += w * std::pow(av, q);
      if (load) {
        double g = w * std::pow(av, q - 2) * v;
        (*load)[static_cast<long>(e)] += g * (1 - t);
        if (e + 1 < N) (*load)[static_cast<long>(e + 1)] += g * t;
      }
    }
  }
  return total;
}

}  // namespace

double sobolev_quotient(const Discretization& d, double lambda, const Eigen::VectorXd& u) {
  const double q = critical_exponent(d.n()) + 1;
  double num = u.dot(d.stiffness() * u) - lambda * u.dot(d.consistent_mass() * u);
  return num / std::pow(power_integral(d, u, q, nullptr), 2 / q);
}

GroundState solve_ground_state(const DiscPtr& disc, double lambda, const GroundStateOptions& opt) {
  const auto& d = *disc;
  if (!d.radial()) throw ConfigError("ground states are computed on radial ball meshes");
  if (d.n() < 3) throw ConfigError("n must be >= 3");
  if (!(lambda > 0)) throw ConfigError("lambda must be positive");
  const int n = d.n();
  const double p = critical_exponent(n), q = p + 1;
  Eigen::SparseMatrix<double> A = d.stiffness() - lambda * d.consistent_mass();
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
  if (ldlt.info() != Eigen::Success || (ldlt.vectorD().array() <= 0).any())
    throw ConfigError("lambda must be below the discrete lambda_1");

  const long N = static_cast<long>(d.size());
  auto start = [&](double delta) {
    Eigen::VectorXd u(N);
    double ub = bubble_radial(n, delta, d.domain().ball_radius);
    for (long i = 0; i < N; ++i) u[i] = bubble_radial(n, delta, d.radii()[static_cast<size_t>(i)]) - ub;
    return u;
  };
  auto normalise = [&](Eigen::VectorXd& u) { u /= std::pow(power_integral(d, u, q, nullptr), 1 / q); };

  GroundState gs;
  gs.S0 = sobolev_constant_closed_form(n);
  gs.S_lambda = INFINITY;
  Eigen::VectorXd best;
  for (int j = 0; j < opt.scan_points; ++j) {
    double delta = std::pow(10.0, -6.0 * j / std::max(1, opt.scan_points - 1));
    Eigen::VectorXd u = start(delta);
    double Q = sobolev_quotient(d, lambda, u);
    if (Q < gs.S_lambda) {
      gs.S_lambda = Q;
      best = u;
    }
  }
  Eigen::VectorXd load;
  for (double delta : opt.start_scales) {
    Eigen::VectorXd u = start(delta);
    normalise(u);
    double Q = sobolev_quotient(d, lambda, u);
    int it = 0;
    for (; it < opt.max_iter; ++it) {
      power_integral(d, u, q, &load);
      Eigen::VectorXd v = ldlt.solve(load);
      normalise(v);
      double Qn = sobolev_quotient(d, lambda, v);
      u = v;
      bool done = std::abs(Q - Qn) < opt.tol * Q;
      Q = Qn;
      if (done) break;
    }
    gs.iterations += it;
    if (!std::isfinite(Q)) throw SolverError("ground-state flow produced a non-finite quotient");
    if (Q < gs.S_lambda) {
      gs.S_lambda = Q;
      best = u;
    }
  }
  gs.attained = gs.S_lambda < (1 - opt.attain_margin) * gs.S0;
  normalise(best);
  best = best.cwiseAbs();
  // -Delta v - lambda v = S v^p with ||v||_{p+1} = 1, so u = S^{1/(p-1)} v
  gs.u0 = Field(disc, std::pow(gs.S_lambda, 1 / (p - 1)) * best);
  if (gs.attained) {
    // smallest |mu| of (K - lambda W - p W u^{p-1}) v = mu W v
    const auto& W = d.lumped_mass();
    Eigen::VectorXd pot = p * gs.u0.values().array().pow(p - 1).matrix().cwiseProduct(W);
    Eigen::SparseMatrix<double> L = d.stiffness();
    for (long i = 0; i < N; ++i) L.coeffRef(i, i) -= lambda * W[i] + pot[i];
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(L);
    if (lu.info() == Eigen::Success) {
      Eigen::VectorXd v = Eigen::VectorXd::Ones(N);
      double mu = 0;
      for (int it = 0; it < 200; ++it) {
        Eigen::VectorXd w = lu.solve(W.cwiseProduct(v));
        double nw = std::sqrt(w.dot(W.cwiseProduct(w)));
        v = w / nw;
        double m2 = v.dot(L * v);
        if (it > 3 && std::abs(m2 - mu) < 1e-10 * std::abs(m2)) break;
        mu = m2;
      }
      gs.linearisation_min_eig = std::abs(mu);
    }
  }
  return gs;
}

ThresholdBracket bracket_threshold(const DiscPtr& disc, double lambda1, double lo, double hi, int steps,
                                   const GroundStateOptions& opt) {
  if (!(lo < hi)) throw ConfigError("bracket needs lo < hi");
  if (solve_ground_state(disc, lo * lambda1, opt).attained)
    throw SolverError("minimiser already attained at the lower end of the bracket");
  if (!solve_ground_state(disc, hi * lambda1, opt).attained)
    throw SolverError("no minimiser at the upper end of the bracket");
  ThresholdBracket b{lo, hi, 0};
  for (int s = 0; s < steps; ++s) {
    double mid = 0.5 * (b.lo + b.hi);
    if (solve_ground_state(disc, mid * lambda1, opt).attained)
      b.hi = mid;
    else
      b.lo = mid;
    ++b.steps;
  }
  return b;
}

}  // namespace bl
