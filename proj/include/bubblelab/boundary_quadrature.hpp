#pragma once
#include <vector>

namespace bl {

// Single-bubble projections near the boundary of the unit ball computed by
// axisymmetric quadrature, with the projected bubble and its derivatives
// replaced by their leading boundary corrections:
//   PU  ~ U  - a_n delta^{(n-2)/2} H(x, xi)
//   PZ0 ~ Z0 - ((n-2)/2) a_n delta^{(n-2)/2} H(x, xi)
//   PZ1 ~ Z1 - a_n delta^{n/2} dH/dxi_1(x, xi)
// with xi = (1 - d, 0, ..., 0), u_0 = 0 and the unshifted projection.
struct BoundaryProjection {
  double d = 0, delta = 0, kappa = 0;
  double measured_dilation = 0, measured_translation = 0;  // int I_3 PZ^0, int I_3 PZ^1
  double predicted_dilation = 0, predicted_translation = 0;
  double dilation_error = 0, translation_error = 0;  // quadrature error estimates
  double dilation_ratio() const { return measured_dilation / predicted_dilation; }
  double translation_ratio() const { return measured_translation / predicted_translation; }
};

BoundaryProjection boundary_projection(int n, double lambda, double d, double delta, double tol = 1e-7);

struct BoundarySchedule {
  int n = 6;
  double lambda_fraction = 0.5;
  std::vector<double> distances{0.2, 0.1, 0.05, 0.025};
  double delta_power = 2;  // delta = d^power
};
std::vector<BoundaryProjection> boundary_schedule(const BoundarySchedule& s);

}  // namespace bl
