#pragma once
#include <span>
#include <vector>

#include "bubblelab/discretization.hpp"

namespace bl {

// Regular part of the shifted Green function on the unit ball for n = 3,
// centred at the origin, with the singular lambda term kept separate:
// G_lambda = c (|x|^{-1} - (lambda/2)|x| - H(x)).
double shifted_regular_part_ball3(double lambda, double r);

// Robin function of -Delta - lambda at the centre of the unit ball, n in {3,4,5}.
double robin_shifted_center(int n, double lambda);

// Robin function of -Delta - lambda for n = 3 at an interior point y of the
// unit ball, from a Cartesian solve for the smooth correction to the Laplace
// part. Points on the first coordinate axis are interpolated along the axis
// up to the boundary; other points need all trilinear corners inside.
struct HelmholtzRobin {
  double value = 0;       // phi_lambda(y)
  double laplace = 0;     // phi(y)
  double correction = 0;  // K(y,y)
};
HelmholtzRobin robin_shifted_ball3(double lambda, std::span<const double> y, int points_per_axis);

enum class RobinVariant { Laplace, Helmholtz };
double robin_function(const DomainModel& d, std::span<const double> x, RobinVariant v, double lambda = 0,
                      int points_per_axis = 48);

// Radial profile D_n: the decaying solution of
// -Delta D = lambda a_n [(1+|z|^2)^{-(n-2)/2} - |z|^{-(n-2)}] on R^n,
// tabulated on a logarithmic grid and interpolated.
class DnProfile {
 public:
  DnProfile(int n, double lambda);
  int n() const { return n_; }
  double lambda() const { return lambda_; }
  double operator()(double z) const;
  const std::vector<double>& radii() const { return r_; }
  const std::vector<double>& samples() const { return w_; }

 private:
  int n_;
  double lambda_;
  double log_lo_, dlog_;
  std::vector<double> r_, w_;
  std::vector<double> d2_;  // spline second derivatives in log r
};

DnProfile solve_dn_profile(int n, double lambda);
// Closed form for n = 3, used as an oracle.
double dn3_closed_form(double lambda, double r);

}  // namespace bl
