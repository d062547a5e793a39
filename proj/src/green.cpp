#include "bubblelab/green.hpp"

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <numbers>

#include "bubblelab/bubbles.hpp"
#include "bubblelab/elliptic.hpp"
#include "bubblelab/errors.hpp"

namespace bl {

namespace {

void check_shift(int n, double lambda) {
  if (!(lambda > 0)) throw ConfigError("shifted Robin function needs lambda > 0");
  if (lambda >= unit_ball_lambda1(n)) throw ConfigError("lambda must stay below lambda_1");
}

}  // namespace

double shifted_regular_part_ball3(double lambda, double r) {
  check_shift(3, lambda);
  double k = std::sqrt(lambda);
  double kr = k * r;
  double cot = std::cos(k) / std::sin(k);
  if (kr < 1e-3) {
    // series of (1 - cos kr)/r - lambda r/2 and sin(kr)/r
    double a = -lambda * lambda * r * r * r / 24.0;
    double s = k * (1 - kr * kr / 6.0 + kr * kr * kr * kr / 120.0);
    return a + cot * s;
  }
  return (1 - std::cos(kr) + cot * std::sin(kr)) / r - 0.5 * lambda * r;
}

double robin_shifted_center(int n, double lambda) {
  check_shift(n, lambda);
  double k = std::sqrt(lambda);
  switch (n) {
    case 3:
      return k * std::cos(k) / std::sin(k);
    case 4: {
      using boost::math::cyl_bessel_j;
      using boost::math::cyl_neumann;
      double c = -(std::numbers::pi * k / 2) * cyl_neumann(1, k) / cyl_bessel_j(1, k);
      return 0.5 * lambda * std::log(k / 2) - 0.25 * lambda * (1 - 2 * std::numbers::egamma) + c * k / 2;
    }
    case 5: {
      double c = (std::cos(k) + k * std::sin(k)) / (std::sin(k) - k * std::cos(k));
      return c * k * k * k / 3;
    }
    default:
      throw ConfigError("shifted Robin function is only available for n in {3,4,5}");
  }
}

HelmholtzRobin robin_shifted_ball3(double lambda, std::span<const double> y, int ppa) {
  check_shift(3, lambda);
  if (y.size() != 3) throw ConfigError("expected a point in R^3");
  DomainModel dom = DomainModel::ball(3);
  if (!dom.contains(y)) throw ConfigError("point must be inside the unit ball");
  auto disc = Discretization::make(dom, GridSpec::tensor(ppa));
  const auto& d = *disc;
  const long N = static_cast<long>(d.size());
  auto dist = [&](std::span<const double> x) {
    double s = 0;
    for (int q = 0; q < 3; ++q) s += (x[q] - y[q]) * (x[q] - y[q]);
    return std::sqrt(s);
  };
  // (-Delta - lambda) K = (lambda^2/2)|x-y| + lambda H(x,y),  K = -(lambda/2)|x-y| on the sphere
  Eigen::VectorXd load(N), g(static_cast<long>(d.boundary_size()));
  for (long i = 0; i < N; ++i) {
    auto x = d.node(static_cast<size_t>(i));
    load[i] = 0.5 * lambda * lambda * dist(x) + lambda * ball_harmonic_extension_H(3, y, x);
  }
  load = load.cwiseProduct(d.lumped_mass());
  for (long j = 0; j < g.size(); ++j) g[j] = -0.5 * lambda * dist(d.boundary_point(static_cast<size_t>(j)));
  EllipticSolver s(disc, lambda);
  Eigen::VectorXd K = s.solve_with_boundary(load, g);

  const double h = d.axis_spacing(0), o = d.axis_origin(0);
  auto idx = [&](double x, int axis) { return (x - d.axis_origin(axis)) / d.axis_spacing(axis); };
  double corr;
  if (y[1] == 0 && y[2] == 0 && ppa % 2 == 0) {
    const int mid = ppa / 2;
    double t = idx(y[0], 0);
    int i0 = static_cast<int>(std::floor(t));
    auto val = [&](int i, double& xpos) {
      long j = d.lattice_index({i, mid, mid});
      if (j >= 0) {
        xpos = o + i * h;
        return K[j];
      }
      // boundary crossing on the axis
      xpos = y[0] > 0 ? 1.0 : -1.0;
      return -0.5 * lambda * std::abs(xpos - y[0]);
    };
    double xa, xb;
    double va = val(i0, xa), vb = val(i0 + 1, xb);
    if (xa == xb) throw SolverError("degenerate axis interpolation");
    corr = va + (vb - va) * (y[0] - xa) / (xb - xa);
  } else {
    int base[3];
    double frac[3];
    for (int q = 0; q < 3; ++q) {
      double t = idx(y[q], q);
      base[q] = static_cast<int>(std::floor(t));
      frac[q] = t - base[q];
    }
    corr = 0;
    for (int c = 0; c < 8; ++c) {
      std::vector<int> id(3);
      double w = 1;
      for (int q = 0; q < 3; ++q) {
        int bit = (c >> q) & 1;
        id[q] = base[q] + bit;
        w *= bit ? frac[q] : 1 - frac[q];
      }
      long j = d.lattice_index(id);
      if (j < 0) throw ConfigError("point too close to the boundary for this grid; use an axis point");
      corr += w * K[j];
    }
  }
  HelmholtzRobin out;
  out.laplace = robin_laplace_ball(3, y);
  out.correction = corr;
  out.value = out.laplace + corr;
  return out;
}

double robin_function(const DomainModel& d, std::span<const double> x, RobinVariant v, double lambda, int ppa) {
  if (d.kind != DomainKind::UnitBall || d.ball_radius != 1.0)
    throw ConfigError("Robin functions are implemented for the unit ball");
  if (!d.contains(x)) throw ConfigError("point must be interior");
  if (v == RobinVariant::Laplace) return robin_laplace_ball(d.n, x);
  bool center = true;
  for (double c : x) center = center && c == 0;
  if (center) return robin_shifted_center(d.n, lambda);
  if (d.n != 3) throw ConfigError("off-centre shifted Robin function needs n = 3");
  return robin_shifted_ball3(lambda, x, ppa).value;
}

double dn3_closed_form(double lambda, double r) {
  const double a = dimensional_constant(3);
  if (r < 1e-4) {
    // r/2 - sqrt(1+r^2)/2 - asinh(r)/(2r) near 0
    return lambda * a * (r / 2 - 1.0 - r * r / 6.0);
  }
  return lambda * a * (r / 2 - std::sqrt(1 + r * r) / 2 - std::asinh(r) / (2 * r));
}

DnProfile::DnProfile(int n, double lambda) : n_(n), lambda_(lambda) {
  if (n < 3 || n > 5) throw ConfigError("D_n profile is defined for n in {3,4,5}");
  if (!(lambda > 0)) throw ConfigError("D_n profile needs lambda > 0");
  const double a = dimensional_constant(n), m = 0.5 * (n - 2);
  auto f = [&](double s) {
    // (1+s^2)^{-m} - s^{-2m}, cancellation-free for large s
    if (s > 1) return lambda * a * std::pow(s, -2 * m) * std::expm1(-m * std::log1p(1 / (s * s)));
    return lambda * a * (std::pow(1 + s * s, -m) - std::pow(s, -2 * m));
  };
  const double lo = 1e-8, hi = 1e6;
  const int M = 2801;
  log_lo_ = std::log(lo);
  dlog_ = (std::log(hi) - log_lo_) / (M - 1);
  r_.resize(M);
  for (int j = 0; j < M; ++j) r_[j] = std::exp(log_lo_ + j * dlog_);
  using G = boost::math::quadrature::gauss<double, 10>;
  std::vector<double> I(M), J(M);
  I[0] = lambda * a * (std::pow(lo, n) / n - lo * lo / 2);
  for (int j = 1; j < M; ++j)
    I[j] = I[j - 1] + G::integrate([&](double s) { return std::pow(s, n - 1) * f(s); }, r_[j - 1], r_[j]);
  J[M - 1] = -m * lambda * a * std::pow(hi, 2 - n) / (n - 2);
  for (int j = M - 2; j >= 0; --j) J[j] = J[j + 1] + G::integrate([&](double s) { return s * f(s); }, r_[j], r_[j + 1]);
  w_.resize(M);
  for (int j = 0; j < M; ++j) w_[j] = (std::pow(r_[j], 2 - n) * I[j] + J[j]) / (n - 2);

  // natural cubic spline in t = log r
  d2_.assign(M, 0.0);
  std::vector<double> rhs(M, 0.0);
  for (int j = 1; j < M - 1; ++j) rhs[j] = 6 * (w_[j + 1] - 2 * w_[j] + w_[j - 1]) / (dlog_ * dlog_);
  // tridiagonal (1,4,1) Thomas solve
  std::vector<double> cp(M, 0.0), dp(M, 0.0);
  for (int j = 1; j < M - 1; ++j) {
    double den = 4 - (j > 1 ? cp[j - 1] : 0);
    cp[j] = 1 / den;
    dp[j] = (rhs[j] - (j > 1 ? dp[j - 1] : 0)) / den;
  }
  for (int j = M - 2; j >= 1; --j) d2_[j] = dp[j] - cp[j] * d2_[j + 1];
}

double DnProfile::operator()(double z) const {
  const int M = static_cast<int>(r_.size());
  const double a = dimensional_constant(n_);
  if (z < r_.front()) {
    double r0 = r_.front();
    if (z <= 0) return n_ == 3 ? w_.front() : -INFINITY;
    // near field: s^{n-1} f ~ -lambda a s, s f ~ -lambda a s^{3-n}
    double dI = -0.5 * lambda_ * a * (std::pow(z, 4 - n_) - std::pow(r0, 4 - n_));
    double dJ = n_ == 4 ? -lambda_ * a * std::log(r0 / z)
                        : -lambda_ * a * (std::pow(z, 4 - n_) - std::pow(r0, 4 - n_)) / (n_ - 4);
    if (n_ == 3) dJ = -lambda_ * a * (r0 - z);
    return w_.front() + (dI + dJ) / (n_ - 2);
  }
  if (z > r_.back()) {
    double rb = r_.back();
    return w_.back() * std::pow(rb / z, n_ - 2) * std::log(z) / std::log(rb);
  }
  double t = (std::log(z) - log_lo_) / dlog_;
  int j = std::min(static_cast<int>(t), M - 2);
  double u = t - j, v = 1 - u;
  double h2 = dlog_ * dlog_;
  return v * w_[j] + u * w_[j + 1] + ((v * v * v - v) * d2_[j] + (u * u * u - u) * d2_[j + 1]) * h2 / 6;
}

DnProfile solve_dn_profile(int n, double lambda) { return DnProfile(n, lambda); }

}  // namespace bl
