#pragma once
#include <Eigen/Sparse>
#include <memory>
#include <vector>

#include "bubblelab/bubbles.hpp"
#include "bubblelab/field.hpp"

namespace bl {

struct OperatorSpec {
  enum class Kind { Laplace, Shifted };
  Kind kind = Kind::Laplace;
  double lambda = 0.0;

  static OperatorSpec laplace() { return {}; }
  static OperatorSpec shifted(double lam);
  double shift() const { return kind == Kind::Shifted ? lambda : 0.0; }
};

enum class ProjectionKind { PU1, PU2 };
const char* to_string(ProjectionKind k);
ProjectionKind parse_projection_kind(const std::string& s);

struct SolverOptions {
  double tol = 1e-13;      // relative residual for iterative solves
  int max_iter = 50000;
  bool allow_indefinite = false;
};

// Solves (K - lambda W) u = load + B g with zero or prescribed Dirichlet data.
// Radial meshes use a sparse LDL^T factorisation, Cartesian grids use
// Jacobi-preconditioned conjugate gradients.
class EllipticSolver {
 public:
  EllipticSolver(DiscPtr d, double lambda, SolverOptions opt = {});
  ~EllipticSolver();
  EllipticSolver(const EllipticSolver&) = delete;
  EllipticSolver& operator=(const EllipticSolver&) = delete;

  Eigen::VectorXd solve(const Eigen::VectorXd& load) const;
  Eigen::VectorXd solve_with_boundary(const Eigen::VectorXd& load, const Eigen::VectorXd& g) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& u) const;  // (K - lambda W) u
  double lambda() const { return lambda_; }
  const DiscPtr& disc() const { return disc_; }
  bool positive_definite() const { return spd_; }
  double last_residual() const { return last_residual_; }

 private:
  struct Impl;
  DiscPtr disc_;
  double lambda_;
  SolverOptions opt_;
  bool spd_ = true;
  mutable double last_residual_ = 0;
  std::unique_ptr<Impl> impl_;
};

// <u,v> = u^T K v - lambda u^T W v
double energy_inner(const Discretization& d, double lambda, const Eigen::VectorXd& u,
                    const Eigen::VectorXd& v);
double h1_norm(const OperatorSpec& op, const Field& u);
// Dual norm of a weak load vector (entries = int f phi_i).
double dual_norm_load(const EllipticSolver& s, const Eigen::VectorXd& load);
// Dual norm of a pointwise function f, tested with the lumped mass.
double dual_norm(const OperatorSpec& op, const Field& f);

Field solve_dirichlet(const OperatorSpec& op, const Field& rhs, SolverOptions opt = {});

struct Lambda1Estimate {
  double coarse = 0;
  double fine = 0;
  double extrapolated = 0;
};
// Smallest Dirichlet eigenvalue of the discrete Laplacian by inverse power iteration.
double discrete_lambda1(const DiscPtr& d, double tol = 1e-12, Eigen::VectorXd* eigvec = nullptr);
Lambda1Estimate estimate_lambda1(const DomainModel& d, const GridSpec& g);
// First Dirichlet eigenvalue of the unit ball, j_{n/2-1,1}^2.
double unit_ball_lambda1(int n);
// First Dirichlet eigenvalue of a supported domain (ball or box), exact.
double continuous_lambda1(const DomainModel& d);

// Projected bubbles by singular subtraction: PU = U - h where h solves the
// homogeneous (pu1) or shifted (pu2) problem with Dirichlet data U. The
// derivative projections use the same operator, so the discrete PZ is the
// exact parameter derivative of the discrete PU.
class Projector {
 public:
  Projector(DiscPtr d, ProjectionKind kind, double lambda, SolverOptions opt = {});

  Field bubble(const BubbleParams& b) const;
  Field derivative(const BubbleParams& b, int k) const;
  // Weak load of (-Delta - lambda) PU computed from the defining equation.
  Eigen::VectorXd bubble_operator_load(const BubbleParams& b, const Field& pu) const;
  Eigen::VectorXd derivative_operator_load(const BubbleParams& b, int k, const Field& pz) const;

  ProjectionKind kind() const { return kind_; }
  double lambda() const { return lambda_; }
  const DiscPtr& disc() const { return disc_; }
  // Relative slack of 0 <= PU <= U in the last bubble() call (0 when satisfied).
  double last_postcondition_slack() const { return slack_; }
  double postcondition_tolerance = 1e-8;

 private:
  Field project(const BubbleParams& b, int k) const;
  DiscPtr disc_;
  ProjectionKind kind_;
  double lambda_;
  std::shared_ptr<EllipticSolver> laplace_, shifted_;
  mutable double slack_ = 0;
};

Field project_bubble(ProjectionKind kind, const BubbleParams& b, const DiscPtr& d, double lambda);
Field project_derivative(ProjectionKind kind, const BubbleParams& b, int k, const DiscPtr& d,
                         double lambda);

// A part of u whose operator image is known analytically, e.g. a projected bubble.
struct AnalyticPart {
  Eigen::VectorXd values;
  Eigen::VectorXd operator_load;  // weak load of (-Delta - lambda) part
};

struct GammaResult {
  double gamma = 0;
  bool clipped = false;  // negative values were replaced by the positive part
};
// Gamma(u) = || Delta u + lambda u + u^p ||_{(H^1_0)^*}. The residual is
// assembled weakly; parts with known operator images are taken from `parts`
// and only the remainder u - sum(parts) goes through the discrete operator.
GammaResult gamma_residual(const Field& u, double lambda, const std::vector<AnalyticPart>& parts = {},
                           const EllipticSolver* solver = nullptr);

}  // namespace bl
