#pragma once
#include <span>
#include <vector>

namespace bl {

double critical_exponent(int n);
double dimensional_constant(int n);
// Surface area of the unit sphere S^{n-1} in R^n.
double sphere_area(int n);
// Sharp Sobolev constant from its closed form; used as a cross-check only.
double sobolev_constant_closed_form(int n);

struct BubbleParams {
  int n = 3;
  double delta = 1.0;
  std::vector<double> xi;

  BubbleParams() = default;
  BubbleParams(int n_, double delta_, std::vector<double> xi_);
  static BubbleParams centered(int n, double delta);
};

// U_{delta,xi}(x) = a_n (delta / (delta^2 + |x-xi|^2))^{(n-2)/2}
double eval_bubble(const BubbleParams& b, std::span<const double> x);
// k = 0: delta dU/ddelta, k >= 1: delta dU/dxi^k (closed form)
double eval_param_derivative(const BubbleParams& b, int k, std::span<const double> x);

// Radial versions with the centre at the origin.
double bubble_radial(int n, double delta, double r);
double dilation_radial(int n, double delta, double r);

// Closed-form Laplacians, derived independently of the Euler-Lagrange identity.
double bubble_laplacian(const BubbleParams& b, std::span<const double> x);
double param_derivative_laplacian(const BubbleParams& b, int k, std::span<const double> x);

using SampleSet = std::vector<std::vector<double>>;
// max |Delta U + U^p| over the samples
double bubble_pde_residual(const BubbleParams& b, const SampleSet& samples);
// max |Delta Z^k + p U^{p-1} Z^k| over the samples
double nondegeneracy_residual(const BubbleParams& b, int k, const SampleSet& samples);

struct SobolevEnergy {
  double S0 = 0;
  double J = 0;
  double grad_sq = 0;     // int |grad U|^2
  double crit_norm = 0;   // int U^{p+1}
  double consistency = 0; // |J - S0^{n/2}/n| / J
  double quad_error = 0;  // difference between two quadrature precisions
};
SobolevEnergy sobolev_energy(int n);

}  // namespace bl
