#pragma once
#include <vector>

#include "bubblelab/field.hpp"

namespace bl {

struct GroundStateOptions {
  std::vector<double> start_scales{0.5, 0.3, 0.15};  // flows start from U_delta - U_delta(1)
  int scan_points = 25;                              // delta scan on [1e-6, 1]
  int max_iter = 3000;
  double tol = 1e-13;
  // S_lambda < (1 - attain_margin) S_0 counts as an attained minimiser. The
  // concentrating discrete bubble sits a few 1e-6 above S_0 on fine meshes.
  double attain_margin = 1e-4;
};

struct GroundState {
  Field u0;               // positive solution of -Delta u - lambda u = u^p (valid when attained)
  double S_lambda = 0;    // best discrete quotient found
  double S0 = 0;
  bool attained = false;
  int iterations = 0;
  double relative_gap() const { return S_lambda / S0 - 1; }
  double linearisation_min_eig = 0;  // smallest |eigenvalue| of the linearised operator (diagnostic)
};

// Minimises the Sobolev quotient Q_lambda over radial P1 functions on the ball.
GroundState solve_ground_state(const DiscPtr& radial_ball, double lambda, const GroundStateOptions& opt = {});
double sobolev_quotient(const Discretization& d, double lambda, const Eigen::VectorXd& u);

struct ThresholdBracket {
  double lo = 0, hi = 0;  // lambda/lambda_1: not attained at lo, attained at hi
  int steps = 0;
};
// Bisection on lambda / lambda_1 for the onset of attained minimisers.
ThresholdBracket bracket_threshold(const DiscPtr& radial_ball, double lambda1, double lo, double hi, int steps,
                                   const GroundStateOptions& opt = {});

}  // namespace bl
