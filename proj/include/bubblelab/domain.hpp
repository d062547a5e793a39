#pragma once
#include <array>
#include <span>
#include <string>
#include <vector>

namespace bl {

enum class DomainKind { UnitBall, Box };

struct DomainModel {
  DomainKind kind = DomainKind::UnitBall;
  int n = 3;
  double ball_radius = 1.0;
  std::vector<std::array<double, 2>> box_extents;

  static DomainModel ball(int n, double radius = 1.0);
  static DomainModel box(std::vector<std::array<double, 2>> extents);

  bool contains(std::span<const double> x) const;  // open domain
  // Exact distance to the boundary; throws ConfigError outside the closure.
  double distance_to_boundary(std::span<const double> x) const;
  std::string describe() const;
  static DomainModel parse(const std::string& text, int n);
};

// Regular part of the Laplace Green function of the unit ball (method of images):
// H(x,y) = (|y| |x - y/|y|^2|)^{2-n}, with H(x,0) = 1.
double ball_harmonic_extension_H(int n, std::span<const double> y, std::span<const double> x);
// Robin function phi(x) = H(x,x) = (1-|x|^2)^{2-n} on the unit ball.
double robin_laplace_ball(int n, std::span<const double> x);
std::vector<double> robin_laplace_ball_gradient(int n, std::span<const double> x);
// d/dy^k of H(x,y) on the unit ball (used for projected translation derivatives).
double ball_harmonic_extension_dH_dy(int n, int k, std::span<const double> y,
                                     std::span<const double> x);

enum class GridMode { Radial1D, TensorND };

// Radial mesh spacing: geometric growth away from r = 0, capped by h_max, and
// geometric refinement towards r = R.
struct RadialGrading {
  double r_min = 1e-7;
  double growth = 0.01;
  double h_max = 1e-3;
  double boundary_growth = 0.05;
  double h_boundary = 1e-4;
};

struct GridSpec {
  GridMode mode = GridMode::Radial1D;
  int points_per_axis = 32;
  RadialGrading grading;

  static GridSpec radial(RadialGrading g = {});
  static GridSpec tensor(int points_per_axis);
  std::string describe() const;
  static GridSpec parse(const std::string& text);
};

}  // namespace bl
