#pragma once
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "bubblelab/bubbles.hpp"
#include "bubblelab/domain.hpp"
#include "bubblelab/elliptic.hpp"
#include "bubblelab/montecarlo.hpp"
#include "bubblelab/quadrature.hpp"

namespace bl {

enum class PairRegime { DistanceDominated, ScaleDominatedI, ScaleDominatedJ };
const char* to_string(PairRegime r);

struct PairInteraction {
  double q = 0;
  double R = 0;
  PairRegime regime = PairRegime::DistanceDominated;
};
PairInteraction pair_quantities(const BubbleParams& bi, const BubbleParams& bj);

// Power law t^exponent |log t|^log_power.
struct PowerLaw {
  double exponent = 0;
  double log_power = 0;
};

// Scaling of int_Omega U_delta^s in delta.
PowerLaw lp_scaling_law(int n, double s);
// int_Omega U^s for a bubble; Omega = R^n when domain is null. Centred bubbles
// on the ball and whole-space integrals use radial quadrature, otherwise
// Monte Carlo with a fixed seed.
QuadResult bubble_lp_norm(const BubbleParams& b, const DomainModel* domain, double s);

// Scaling of int U_i^s U_j^t in q_ij for s + t = 2^*.
PowerLaw cross_integral_law(int n, double s, double t);
MCResult cross_integral(const BubbleParams& bi, const BubbleParams& bj, double s, double t,
                        const DomainModel* domain, long samples, std::uint64_t seed);

// int_Omega |x-z|^{2-n} (delta/(delta^2+|z-xi|^2))^{alpha/2} dz
double riesz_potential_profile(int n, double alpha, double delta, const std::vector<double>& xi,
                               const std::vector<double>& x, const DomainModel* domain, long samples = 200000,
                               std::uint64_t seed = 1);
// Right-hand side of the five-case bound (without the implied constant).
double riesz_bound(int n, double alpha, double delta, double dist_x_xi);
int riesz_case(int n, double alpha);

struct Constant {
  double value = 0;
  double error = 0;
  bool defined = false;
  std::string method;
};

struct StructuralConstants {
  int n = 0;
  Constant a;     // p int U^{p-1} Z^0
  Constant b;     // int U Z^0, n >= 5
  Constant b4;    // 3 sqrt 2 int U^{p-1} Z^0, n = 4
  Constant b3;    // a_3 p/2 int U^{p-1} Z^0, n = 3
  Constant bbar5; // shifted-projection dilation constant, n = 5
  Constant c;     // a_n * a
  Constant e;     // translation constant
  Constant int_up_z0;  // int U^{p-1} Z^0 itself
};
StructuralConstants structural_constants(int n);
// Throws RegimeRefusal for n = 4 (integrand not absolutely integrable) and n = 3.
double constant_b(int n);
void write_constants_csv(std::ostream& os, const std::vector<int>& dims);

// Leading coefficient of the two-bubble dilation projection
// int I_2 Z_j^0 ~ d_n (q^{-2/(n-2)} - 2 delta_j/delta_i) q^{n/(n-2)}.
struct InteractionConstantEstimate {
  double fitted = 0;
  double reference = 0;  // ((n-2)/2) a_n int U^p
  double rel_residual = 0;
  int configurations = 0;
};
InteractionConstantEstimate estimate_interaction_constant(int n, long samples, std::uint64_t seed);

struct ProjectionConfig {
  int n = 5;
  ProjectionKind kind = ProjectionKind::PU1;
  double lambda = 0;
  double delta = 0.1;
  std::vector<double> xi;   // unit ball
  double u0_at_xi = 0;      // 0 means u_0 = 0
  int nu = 1;
  int helmholtz_points = 48;  // grid for off-centre shifted Robin functions
};
struct ProjectionPrediction {
  double dilation = 0;             // int (I_1 + I_3) PZ^0
  std::vector<double> translation; // int (I_1 + I_3) PZ^k, k = 1..n
  std::string formula;
};
// Leading-order prediction; refuses configurations outside the hypotheses of the leading-order estimate.
ProjectionPrediction projection_prediction(const ProjectionConfig& c);

}  // namespace bl
