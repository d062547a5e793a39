#include "bubblelab/domain.hpp"

#include <cmath>
#include <sstream>

#include "bubblelab/errors.hpp"

namespace bl {

namespace {
double norm2(std::span<const double> x) {
  double s = 0;
  for (double v : x) s += v * v;
  return s;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}
}  // namespace

DomainModel DomainModel::ball(int n, double radius) {
  if (n < 2) throw ConfigError("ball dimension must be at least 2");
  if (!(radius > 0)) throw ConfigError("ball radius must be positive");
  DomainModel d;
  d.kind = DomainKind::UnitBall;
  d.n = n;
  d.ball_radius = radius;
  return d;
}

DomainModel DomainModel::box(std::vector<std::array<double, 2>> extents) {
  if (extents.empty()) throw ConfigError("box needs at least one axis");
  for (auto& e : extents)
    if (!(e[1] > e[0])) throw ConfigError("box extents must have positive length");
  DomainModel d;
  d.kind = DomainKind::Box;
  d.n = static_cast<int>(extents.size());
  d.box_extents = std::move(extents);
  return d;
}

bool DomainModel::contains(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n) throw ConfigError("point dimension mismatch");
  if (kind == DomainKind::UnitBall) return norm2(x) < ball_radius * ball_radius;
  for (int i = 0; i < n; ++i)
    if (!(x[i] > box_extents[i][0] && x[i] < box_extents[i][1])) return false;
  return true;
}

double DomainModel::distance_to_boundary(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n) throw ConfigError("point dimension mismatch");
  if (kind == DomainKind::UnitBall) {
    double d = ball_radius - std::sqrt(norm2(x));
    if (d < 0) throw ConfigError("point outside the closed ball");
    return d;
  }
  double d = INFINITY;
  for (int i = 0; i < n; ++i) {
    double lo = x[i] - box_extents[i][0], hi = box_extents[i][1] - x[i];
    if (lo < 0 || hi < 0) throw ConfigError("point outside the closed box");
    d = std::min({d, lo, hi});
  }
  return d;
}

std::string DomainModel::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (kind == DomainKind::UnitBall) {
    os << "unit_ball";
    if (ball_radius != 1.0) os << ":R=" << ball_radius;
  } else {
    os << "box:";
    for (size_t i = 0; i < box_extents.size(); ++i)
      os << (i ? "," : "") << box_extents[i][0] << "," << box_extents[i][1];
  }
  return os.str();
}

DomainModel DomainModel::parse(const std::string& text, int n) try {
  if (text.rfind("unit_ball", 0) == 0) {
    double R = 1.0;
    auto pos = text.find(":R=");
    if (pos != std::string::npos) R = std::stod(text.substr(pos + 3));
    return ball(n, R);
  }
  if (text.rfind("box:", 0) == 0) {
    auto parts = split(text.substr(4), ',');
    if (parts.size() != static_cast<size_t>(2 * n)) throw ConfigError("box extents do not match n");
    std::vector<std::array<double, 2>> ext;
    for (int i = 0; i < n; ++i) ext.push_back({std::stod(parts[2 * i]), std::stod(parts[2 * i + 1])});
    return box(ext);
  }
  throw ConfigError("unknown domain description: " + text);
} catch (const std::logic_error&) {
  throw ConfigError("malformed domain description: " + text);
}

double ball_harmonic_extension_H(int n, std::span<const double> y, std::span<const double> x) {
  double y2 = norm2(y);
  if (y2 == 0.0) return 1.0;  // removable singularity: constant boundary data
  // |y| |x - y/|y|^2| = sqrt(|x|^2 |y|^2 - 2 x.y + 1)
  double x2 = norm2(x), xy = 0;
  for (size_t i = 0; i < x.size(); ++i) xy += x[i] * y[i];
  double t = x2 * y2 - 2 * xy + 1.0;
  return std::pow(t, (2.0 - n) / 2.0);
}

double ball_harmonic_extension_dH_dy(int n, int k, std::span<const double> y,
                                     std::span<const double> x) {
  double x2 = norm2(x), y2 = norm2(y), xy = 0;
  for (size_t i = 0; i < x.size(); ++i) xy += x[i] * y[i];
  double t = x2 * y2 - 2 * xy + 1.0;
  double dt = 2 * x2 * y[k - 1] - 2 * x[k - 1];
  return (2.0 - n) / 2.0 * std::pow(t, -n / 2.0) * dt;
}

double robin_laplace_ball(int n, std::span<const double> x) {
  double r2 = norm2(x);
  if (r2 >= 1.0) throw ConfigError("Robin function evaluated outside the ball");
  return std::pow(1.0 - r2, 2.0 - n);
}

std::vector<double> robin_laplace_ball_gradient(int n, std::span<const double> x) {
  double r2 = norm2(x);
  if (r2 >= 1.0) throw ConfigError("Robin function evaluated outside the ball");
  std::vector<double> g(x.size());
  double f = 2.0 * (n - 2) * std::pow(1.0 - r2, 1.0 - n);
  for (size_t i = 0; i < x.size(); ++i) g[i] = f * x[i];
  return g;
}

GridSpec GridSpec::radial(RadialGrading g) {
  if (!(g.r_min > 0 && g.growth > 0 && g.h_max > 0 && g.boundary_growth > 0 && g.h_boundary > 0))
    throw ConfigError("radial grading parameters must be positive");
  GridSpec s;
  s.mode = GridMode::Radial1D;
  s.grading = g;
  return s;
}

GridSpec GridSpec::tensor(int ppa) {
  if (ppa < 16) throw ConfigError("tensor grids need at least 16 points per axis");
  GridSpec s;
  s.mode = GridMode::TensorND;
  s.points_per_axis = ppa;
  return s;
}

std::string GridSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (mode == GridMode::TensorND) {
    os << "tensor:" << points_per_axis;
  } else {
    os << "radial:" << grading.r_min << ":" << grading.growth << ":" << grading.h_max << ":"
       << grading.boundary_growth << ":" << grading.h_boundary;
  }
  return os.str();
}

GridSpec GridSpec::parse(const std::string& text) try {
  if (text == "radial") return radial();
  auto parts = split(text, ':');
  if (parts.size() == 2 && parts[0] == "tensor") return tensor(std::stoi(parts[1]));
  if (parts.size() == 6 && parts[0] == "radial") {
    RadialGrading g{std::stod(parts[1]), std::stod(parts[2]), std::stod(parts[3]),
                    std::stod(parts[4]), std::stod(parts[5])};
    return radial(g);
  }
  throw ConfigError("unknown grid description: " + text);
} catch (const std::logic_error&) {
  throw ConfigError("malformed grid description: " + text);
}

}  // namespace bl
