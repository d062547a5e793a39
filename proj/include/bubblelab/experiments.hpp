#pragma once
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "bubblelab/boundary_quadrature.hpp"
#include "bubblelab/decomposition.hpp"
#include "bubblelab/fitting.hpp"

namespace bl {

enum class BoundaryRegime { Interior, NearBoundary };
const char* to_string(BoundaryRegime b);

struct RegimeInputs {
  int n = 3;
  int nu = 1;
  bool u0_positive = false;
  BoundaryRegime boundary = BoundaryRegime::Interior;
  ProjectionKind kind = ProjectionKind::PU2;
};

struct ZetaRegime {
  RegimeInputs inputs;
  double expected_exponent = 1;
  double expected_log_power = 0;
  std::string row;  // human-readable zeta(t)
};

// Sharp stability rate for a regime; RegimeRefusal names the violated hypothesis.
ZetaRegime zeta_reference(const RegimeInputs& r);

// Regime names look like "n5-interior-u0zero-pu1" with an optional "-nu2" suffix.
RegimeInputs parse_regime(const std::string& name);
std::string regime_name(const RegimeInputs& r);

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct ExperimentRecord {
  std::string regime;
  int n = 3, nu = 1;
  ProjectionKind kind = ProjectionKind::PU2;
  double lambda = 0;
  std::vector<double> deltas;
  std::vector<std::vector<double>> centres;
  double dist_boundary = kNaN;
  double kappa = kNaN;
  double epsilon = kNaN;
  double gamma = kNaN;
  double distance = kNaN;
  double neg_part = kNaN;
  double rho_norm = kNaN;
  double multiplier = kNaN;
  double pred_dil = kNaN, meas_dil = kNaN, pred_tr = kNaN, meas_tr = kNaN;
  unsigned long seed = 0;
};

struct Case1Result {
  Field u_star;
  ExperimentRecord record;
  std::vector<double> beta;  // bubble-major, k = 0..n (radial: k = 0 only)
  double phi_ortho = 0;      // max |<phi, PZ_i^k>| / ||PZ_i^k||
};

// Perturbation scale for the linear-regime construction; refuses regimes where it does not apply.
double case1_epsilon(int n, int nu, bool u0_positive, double delta);

// u_* = u0 + sum PU_i + eps phi with phi = (sum PU_i + sum beta PZ_i^k)/N orthogonal to
// every PZ_i^k and ||phi|| = 1. Gamma uses the analytic operator images of PU and PZ.
Case1Result build_case1_example(const DiscPtr& d, const std::optional<Field>& u0, ProjectionKind kind,
                                double lambda, const std::vector<BubbleParams>& bubbles,
                                double eps_scale = 1.0, const FitOptions& fopt = {});

struct Case2Options {
  int max_newton = 60;
  int max_halvings = 10;
  double rel_tol = 1e-11;
};

struct Case2Result {
  Field rho;
  Field u_star;  // (PU + rho)_+
  double multiplier = 0;
  double ortho_residual = 0;  // |<rho, PZ^0>| / (||rho|| ||PZ^0||)
  int newton_iterations = 0;
  ExperimentRecord record;
};

// Constrained semilinear problem for rho with the dilation multiplier, by damped
// Newton on the bordered system. Radial ball, centred bubble, u0 = 0, n in {5, 6}.
Case2Result solve_projected_problem(const DiscPtr& d, ProjectionKind kind, double lambda, double delta,
                                    const Case2Options& opt = {}, const FitOptions& fopt = {});

struct SweepConfig {
  RegimeInputs regime;
  double lambda_fraction = 0.5;
  std::vector<double> deltas;  // empty: the construction's default grid
  GridSpec grid = GridSpec::radial();
  int tensor_points = 48;  // multi-bubble n = 3 sweeps
  double eps_scale = 1.0;
  // near-boundary sweeps: distances to the boundary and delta = d^delta_power
  std::vector<double> distances{0.2, 0.1, 0.05, 0.025};
  double delta_power = 2;
  unsigned long seed = 1;
};

struct SweepResult {
  ZetaRegime regime;
  std::string construction;  // "case1", "case2" or "projection"
  std::vector<ExperimentRecord> records;
  SlopeFit fit;              // log distance against log gamma
  bool has_fit = false;
  double ratio_log_range = kNaN;  // log-range of distance / gamma (case 1)
  // True when the fitted exponent is within `tolerance` of the expected one.
  bool within(double tolerance) const;
};

SweepResult exponent_sweep(const SweepConfig& c);

// Max nodal error of the pu1 projection of a centred bubble on the unit ball
// against the exact value U - a_n (delta/(1+delta^2))^{(n-2)/2}.
double centre_projection_error(const DiscPtr& ball, double delta, const SolverOptions& opt = {});

// Max nodal defect of the projected centred bubble against its small-delta
// expansion on a radial unit-ball mesh:
//   pu1: PU - U + a_n delta^{(n-2)/2}                       (any n)
//   pu2: PU - U + a_3 delta^{1/2} (lambda r/2 + H_lambda(r)) - delta^{3/2} D_3(r/delta)   (n = 3)
double expansion_defect(const DiscPtr& radial_ball, ProjectionKind kind, double lambda, double delta);

// Interior projection check: measured int (I_1 + I_3) PZ^0 on a radial ball mesh
// against the leading-order prediction, u0 = 0, centred bubble.
struct ProjectionCheck {
  double delta = 0, measured = 0, predicted = 0;
  double ratio() const { return measured / predicted; }
};
std::vector<ProjectionCheck> interior_projection_sweep(int n, ProjectionKind kind, double lambda,
                                                       const std::vector<double>& deltas,
                                                       const GridSpec& grid = GridSpec::radial());

// Near-boundary projection records from the axisymmetric quadrature.
std::vector<ExperimentRecord> boundary_sweep(int n, ProjectionKind kind, double lambda,
                                             const std::vector<double>& distances, double delta_power);

// Radius |xi| at which b_n lambda delta^2 = c_n phi(xi) delta^{n-2} on the unit ball
// (unshifted Robin function), by bisection; n >= 5.
double balance_radius(int n, double lambda, double delta, double tol = 1e-12);

struct RoundTripConfig {
  int points_per_axis = 48;
  double lambda_fraction = 0.5;
  double epsilon = 1e-2;
  std::vector<BubbleParams> truth{BubbleParams(3, 0.15, {-0.35, 0, 0}), BubbleParams(3, 0.15, {0.35, 0, 0})};
  bool with_u0 = true;  // interpolated radial ground state
};

struct RoundTripResult {
  DecompositionState state;
  std::vector<BubbleParams> truth;
  double constructed_distance = 0;
  double max_param_error = 0;   // relative (delta) / absolute over delta (centres)
  double distance_rel_error = 0;
};

RoundTripResult fit_round_trip(const RoundTripConfig& c);

// Linear interpolation of a radial ball field onto another discretization of the same ball.
Field interpolate_radial(const Field& radial, const DiscPtr& target);

}  // namespace bl
