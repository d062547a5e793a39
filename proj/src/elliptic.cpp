#include "bubblelab/elliptic.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <numbers>

#include "bubblelab/errors.hpp"

namespace bl {

OperatorSpec OperatorSpec::shifted(double lam) {
  if (!(lam >= 0) || !std::isfinite(lam)) throw ConfigError("shift lambda must be finite and >= 0");
  return {Kind::Shifted, lam};
}

const char* to_string(ProjectionKind k) { return k == ProjectionKind::PU1 ? "pu1" : "pu2"; }

ProjectionKind parse_projection_kind(const std::string& s) {
  if (s == "pu1") return ProjectionKind::PU1;
  if (s == "pu2") return ProjectionKind::PU2;
  throw ConfigError("unknown projection kind '" + s + "' (expected pu1 or pu2)");
}

double continuous_lambda1(const DomainModel& d) {
  if (d.kind == DomainKind::UnitBall) return unit_ball_lambda1(d.n) / (d.ball_radius * d.ball_radius);
  double s = 0;
  for (auto& e : d.box_extents) s += 1.0 / ((e[1] - e[0]) * (e[1] - e[0]));
  return std::numbers::pi * std::numbers::pi * s;
}

double unit_ball_lambda1(int n) {
  double j = boost::math::cyl_bessel_j_zero(0.5 * n - 1.0, 1);
  return j * j;
}

struct EllipticSolver::Impl {
  Eigen::SparseMatrix<double> A;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                           Eigen::DiagonalPreconditioner<double>>
      cg;
  enum class Mode { LDLT, LU, CG } mode = Mode::LDLT;
};

EllipticSolver::EllipticSolver(DiscPtr d, double lambda, SolverOptions opt)
    : disc_(std::move(d)), lambda_(lambda), opt_(opt), impl_(std::make_unique<Impl>()) {
  if (!disc_) throw ConfigError("solver needs a discretization");
  if (!std::isfinite(lambda)) throw ConfigError("lambda must be finite");
  auto& A = impl_->A;
  A = disc_->stiffness();
  if (lambda != 0) {
    Eigen::SparseMatrix<double> Wm(A.rows(), A.cols());
    Wm.reserve(Eigen::VectorXi::Constant(A.cols(), 1));
    const auto& W = disc_->lumped_mass();
    for (long i = 0; i < W.size(); ++i) Wm.insert(i, i) = W[i];
    A -= lambda * Wm;
  }
  A.makeCompressed();
  if (disc_->radial()) {
    impl_->ldlt.compute(A);
    if (impl_->ldlt.info() != Eigen::Success) throw SolverError("sparse factorisation failed");
    spd_ = (impl_->ldlt.vectorD().array() > 0).all();
    if (!spd_) {
      if (!opt_.allow_indefinite)
        throw SolverError("shifted operator is not positive definite (lambda >= discrete lambda_1)");
      impl_->lu.compute(A);
      if (impl_->lu.info() != Eigen::Success) throw SolverError("singular shifted operator");
      impl_->mode = Impl::Mode::LU;
    }
  } else {
    if (lambda >= continuous_lambda1(disc_->domain())) {
      if (!opt_.allow_indefinite)
        throw SolverError("shifted operator is not positive definite (lambda >= lambda_1)");
      spd_ = false;
      impl_->lu.compute(A);
      if (impl_->lu.info() != Eigen::Success) throw SolverError("singular shifted operator");
      impl_->mode = Impl::Mode::LU;
    } else {
      impl_->cg.setTolerance(opt_.tol);
      impl_->cg.setMaxIterations(opt_.max_iter);
      impl_->cg.compute(A);
      impl_->mode = Impl::Mode::CG;
    }
  }
}

EllipticSolver::~EllipticSolver() = default;

Eigen::VectorXd EllipticSolver::solve(const Eigen::VectorXd& load) const {
  if (static_cast<size_t>(load.size()) != disc_->size()) throw ConfigError("load size mismatch");
  if (!load.allFinite()) throw SolverError("non-finite load");
  Eigen::VectorXd x;
  switch (impl_->mode) {
    case Impl::Mode::LDLT: x = impl_->ldlt.solve(load); break;
    case Impl::Mode::LU: x = impl_->lu.solve(load); break;
    case Impl::Mode::CG:
      x = impl_->cg.solve(load);
      if (impl_->cg.info() != Eigen::Success)
        throw SolverError("conjugate gradients did not converge (" + std::to_string(impl_->cg.iterations()) +
                          " iterations)");
      break;
  }
  double bn = load.norm();
  last_residual_ = bn > 0 ? (impl_->A * x - load).norm() / bn : 0.0;
  double lim = impl_->mode == Impl::Mode::CG ? std::max(1e-10, 10 * opt_.tol) : 1e-10;
  if (!(last_residual_ <= lim)) throw SolverError("linear solve residual too large");
  return x;
}

Eigen::VectorXd EllipticSolver::solve_with_boundary(const Eigen::VectorXd& load, const Eigen::VectorXd& g) const {
  if (static_cast<size_t>(g.size()) != disc_->boundary_size()) throw ConfigError("boundary data size mismatch");
  return solve(load + disc_->boundary_coupling() * g);
}

Eigen::VectorXd EllipticSolver::apply(const Eigen::VectorXd& u) const { return impl_->A * u; }

double energy_inner(const Discretization& d, double lambda, const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  return u.dot(d.stiffness() * v) - lambda * (u.array() * d.lumped_mass().array() * v.array()).sum();
}

double h1_norm(const OperatorSpec& op, const Field& u) {
  const auto& d = u.disc();
  double k = u.values().dot(d.stiffness() * u.values());
  double q = energy_inner(d, op.shift(), u.values(), u.values());
  if (q < -1e-14 * k) throw SolverError("negative discrete quadratic form: lambda is above the discrete lambda_1");
  return std::sqrt(std::max(q, 0.0));
}

double dual_norm_load(const EllipticSolver& s, const Eigen::VectorXd& load) {
  if (!s.positive_definite()) throw SolverError("dual norm requires a coercive operator");
  Eigen::VectorXd w = s.solve(load);
  double q = load.dot(w);
  if (q < -1e-14 * load.norm() * w.norm()) throw SolverError("negative dual quadratic form");
  return std::sqrt(std::max(q, 0.0));
}

double dual_norm(const OperatorSpec& op, const Field& f) {
  EllipticSolver s(f.disc_ptr(), op.shift());
  Eigen::VectorXd load = f.values().cwiseProduct(f.disc().lumped_mass());
  return dual_norm_load(s, load);
}

Field solve_dirichlet(const OperatorSpec& op, const Field& rhs, SolverOptions opt) {
  rhs.check_finite();
  EllipticSolver s(rhs.disc_ptr(), op.shift(), opt);
  return Field(rhs.disc_ptr(), s.solve(rhs.values().cwiseProduct(rhs.disc().lumped_mass())));
}

double discrete_lambda1(const DiscPtr& d, double tol, Eigen::VectorXd* eigvec) {
  EllipticSolver s(d, 0.0);
  const auto& W = d->lumped_mass();
  Eigen::VectorXd v = Eigen::VectorXd::Ones(static_cast<long>(d->size()));
  double mu = 0, prev = 0;
  for (int it = 0; it < 500; ++it) {
    Eigen::VectorXd w = s.solve(W.cwiseProduct(v));
    double wn = std::sqrt(w.dot(W.cwiseProduct(w)));
    v = w / wn;
    mu = v.dot(d->stiffness() * v);  // v is W-normalised
    if (it > 2 && std::abs(mu - prev) <= tol * mu) {
      if (eigvec) *eigvec = v;
      return mu;
    }
    prev = mu;
  }
  throw SolverError("inverse power iteration for lambda_1 did not converge");
}

Lambda1Estimate estimate_lambda1(const DomainModel& dom, const GridSpec& g) {
  GridSpec fine = g, coarse = g;
  if (g.mode == GridMode::TensorND) {
    if (g.points_per_axis >= 32) {
      coarse.points_per_axis = g.points_per_axis / 2;
      fine.points_per_axis = coarse.points_per_axis * 2;
    } else {
      fine.points_per_axis = 2 * g.points_per_axis;
    }
  } else {
    auto& c = coarse.grading;
    c.growth *= 2;
    c.h_max *= 2;
    c.h_boundary *= 2;
    c.boundary_growth *= 2;
  }
  Lambda1Estimate e;
  e.coarse = discrete_lambda1(Discretization::make(dom, coarse));
  e.fine = discrete_lambda1(Discretization::make(dom, fine));
  e.extrapolated = (4 * e.fine - e.coarse) / 3;
  return e;
}

Projector::Projector(DiscPtr d, ProjectionKind kind, double lambda, SolverOptions opt)
    : disc_(std::move(d)), kind_(kind), lambda_(lambda) {
  if (kind == ProjectionKind::PU2 && !(lambda > 0))
    throw ConfigError("pu2 requires lambda in (0, lambda_1)");
  if (lambda < 0) throw ConfigError("lambda must be >= 0");
  if (lambda >= continuous_lambda1(disc_->domain())) throw ConfigError("lambda must lie below lambda_1");
  if (kind == ProjectionKind::PU1)
    laplace_ = std::make_shared<EllipticSolver>(disc_, 0.0, opt);
  else
    shifted_ = std::make_shared<EllipticSolver>(disc_, lambda, opt);
}

// k = -1 projects U itself, k >= 0 projects Z^k.
Field Projector::project(const BubbleParams& b, int k) const {
  const auto& d = *disc_;
  if (b.n != d.n()) throw ConfigError("bubble dimension differs from the domain dimension");
  if (!d.domain().contains(b.xi)) throw ConfigError("bubble centre must lie inside the domain");
  if (k < -1 || k > d.n()) throw ConfigError("derivative index out of range");
  if (d.radial()) {
    for (double c : b.xi)
      if (c != 0) throw ConfigError("radial grids only support bubbles centred at the origin");
    if (k > 0) throw ConfigError("translation derivatives need a tensor grid");
  }
  auto f = [&](std::span<const double> x) { return k < 0 ? eval_bubble(b, x) : eval_param_derivative(b, k, x); };
  const long N = static_cast<long>(d.size());
  const long nb = static_cast<long>(d.boundary_size());
  Eigen::VectorXd U(N), g(nb);
  for (long i = 0; i < N; ++i) U[i] = f(d.node(static_cast<size_t>(i)));
  for (long j = 0; j < nb; ++j) g[j] = f(d.boundary_point(static_cast<size_t>(j)));
  Eigen::VectorXd h;
  if (kind_ == ProjectionKind::PU1)
    h = laplace_->solve_with_boundary(Eigen::VectorXd::Zero(N), g);
  else
    h = shifted_->solve_with_boundary(-lambda_ * d.lumped_mass().cwiseProduct(U), g);
  Field out(disc_, U - h);
  out.check_finite();
  if (k < 0) {
    double umax = U.maxCoeff();
    double lower = std::max(0.0, -out.values().minCoeff()) / umax;
    double upper = std::max(0.0, (out.values() - U).maxCoeff()) / umax;
    // PU <= U follows from the maximum principle only for the unshifted problem;
    // for pu2 the sign of the regular part depends on lambda.
    slack_ = kind_ == ProjectionKind::PU1 ? std::max(lower, upper) : lower;
    if (slack_ > postcondition_tolerance)
      throw SolverError("projected bubble violates 0 <= PU <= U beyond tolerance; grid too coarse");
  }
  return out;
}

Field Projector::bubble(const BubbleParams& b) const { return project(b, -1); }
Field Projector::derivative(const BubbleParams& b, int k) const { return project(b, k); }

Eigen::VectorXd Projector::bubble_operator_load(const BubbleParams& b, const Field& pu) const {
  const auto& d = *disc_;
  const double p = critical_exponent(b.n);
  Eigen::VectorXd L(static_cast<long>(d.size()));
  for (long i = 0; i < L.size(); ++i) L[i] = std::pow(eval_bubble(b, d.node(static_cast<size_t>(i))), p);
  L = L.cwiseProduct(d.lumped_mass());
  if (kind_ == ProjectionKind::PU1) L -= lambda_ * d.lumped_mass().cwiseProduct(pu.values());
  return L;
}

Eigen::VectorXd Projector::derivative_operator_load(const BubbleParams& b, int k, const Field& pz) const {
  const auto& d = *disc_;
  const double p = critical_exponent(b.n);
  Eigen::VectorXd L(static_cast<long>(d.size()));
  for (long i = 0; i < L.size(); ++i) {
    auto x = d.node(static_cast<size_t>(i));
    L[i] = p * std::pow(eval_bubble(b, x), p - 1) * eval_param_derivative(b, k, x);
  }
  L = L.cwiseProduct(d.lumped_mass());
  if (kind_ == ProjectionKind::PU1) L -= lambda_ * d.lumped_mass().cwiseProduct(pz.values());
  return L;
}

Field project_bubble(ProjectionKind kind, const BubbleParams& b, const DiscPtr& d, double lambda) {
  return Projector(d, kind, lambda).bubble(b);
}

Field project_derivative(ProjectionKind kind, const BubbleParams& b, int k, const DiscPtr& d, double lambda) {
  return Projector(d, kind, lambda).derivative(b, k);
}

GammaResult gamma_residual(const Field& u, double lambda, const std::vector<AnalyticPart>& parts,
                           const EllipticSolver* solver) {
  u.check_finite();
  const auto& d = u.disc();
  GammaResult res;
  Eigen::VectorXd v = u.values();
  if (v.minCoeff() < 0) {
    res.clipped = true;
    v = v.cwiseMax(0.0);
  }
  const double p = critical_exponent(d.n());
  Eigen::VectorXd rest = v;
  Eigen::VectorXd load = Eigen::VectorXd::Zero(v.size());
  for (const auto& part : parts) {
    if (part.values.size() != v.size() || part.operator_load.size() != v.size())
      throw ConfigError("analytic part does not match the field");
    rest -= part.values;
    load += part.operator_load;
  }
  std::unique_ptr<EllipticSolver> own;
  if (!solver) {
    own = std::make_unique<EllipticSolver>(u.disc_ptr(), lambda);
    solver = own.get();
  } else if (solver->lambda() != lambda || solver->disc().get() != u.disc_ptr().get()) {
    throw ConfigError("solver does not match the field or lambda");
  }
  load += solver->apply(rest);
  load -= d.lumped_mass().cwiseProduct(v.array().pow(p).matrix());
  res.gamma = dual_norm_load(*solver, load);
  return res;
}

}  // namespace bl
