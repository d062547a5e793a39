#include "bubblelab/discretization.hpp"

#include <cmath>

#include "bubblelab/bubbles.hpp"
#include "bubblelab/errors.hpp"

namespace bl {

namespace {

using Triplet = Eigen::Triplet<double>;

// b^n - a^n without cancellation for nearby a, b
double pow_diff(double a, double b, int n) {
  double s = 0;
  for (int j = 0; j < n; ++j) s += std::pow(b, j) * std::pow(a, n - 1 - j);
  return (b - a) * s;
}

std::vector<double> radial_nodes(const RadialGrading& g, double R) {
  std::vector<double> r{0.0, g.r_min * R};
  while (r.back() < R) {
    double x = r.back();
    double s = std::min({g.h_max * R, g.growth * x, std::max(g.h_boundary * R, g.boundary_growth * (R - x))});
    r.push_back(x + s);
  }
  r.back() = R;
  size_t m = r.size();
  if (m >= 3 && (r[m - 1] - r[m - 2]) < 0.5 * (r[m - 2] - r[m - 3])) r.erase(r.end() - 2);
  return r;
}

}  // namespace

std::shared_ptr<const Discretization> Discretization::make(const DomainModel& d, const GridSpec& g) {
  std::shared_ptr<Discretization> out(new Discretization());
  out->domain_ = d;
  out->grid_ = g;
  if (g.mode == GridMode::Radial1D) {
    if (d.kind != DomainKind::UnitBall) throw ConfigError("radial grids require the ball");
    out->build_radial();
  } else {
    if (d.n > 3) throw ConfigError("tensor grids are limited to n <= 3 at desk scale");
    out->build_cartesian();
  }
  return out;
}

void Discretization::build_radial() {
  const int nd = domain_.n;
  const double R = domain_.ball_radius;
  radii_ = radial_nodes(grid_.grading, R);
  const size_t N = radii_.size() - 1;  // interior nodes 0..N-1, boundary node N
  const double S = sphere_area(nd);
  coords_.assign(N * nd, 0.0);
  for (size_t i = 0; i < N; ++i) coords_[i * nd] = radii_[i];
  bcoords_.assign(nd, 0.0);
  bcoords_[0] = R;

  static const double gx[6] = {-0.9324695142031521, -0.6612093864662645, -0.2386191860831969,
                               0.2386191860831969, 0.6612093864662645, 0.9324695142031521};
  static const double gw[6] = {0.1713244923791704, 0.3607615730481386, 0.4679139345726910,
                               0.4679139345726910, 0.3607615730481386, 0.1713244923791704};

  std::vector<double> diagK(N + 1, 0.0), offK(N, 0.0), W(N + 1, 0.0), diagM(N + 1, 0.0), offM(N, 0.0);
  for (size_t e = 0; e < N; ++e) {
    double a = radii_[e], b = radii_[e + 1], h = b - a;
    double c = S * pow_diff(a, b, nd) / (nd * h * h);
    diagK[e] += c;
    diagK[e + 1] += c;
    offK[e] = -c;
    for (int q = 0; q < 6; ++q) {
      double t = 0.5 * (gx[q] + 1.0);
      double r = a + t * h;
      double f = S * std::pow(r, nd - 1) * h * gw[q] / 2;
      W[e] += f * (1 - t);
      W[e + 1] += f * t;
      diagM[e] += f * (1 - t) * (1 - t);
      diagM[e + 1] += f * t * t;
      offM[e] += f * t * (1 - t);
    }
  }
  std::vector<Triplet> tk, tm;
  for (size_t i = 0; i < N; ++i) {
    tk.emplace_back(i, i, diagK[i]);
    tm.emplace_back(i, i, diagM[i]);
    if (i + 1 < N) {
      tk.emplace_back(i, i + 1, offK[i]);
      tk.emplace_back(i + 1, i, offK[i]);
      tm.emplace_back(i, i + 1, offM[i]);
      tm.emplace_back(i + 1, i, offM[i]);
    }
  }
  K_.resize(N, N);
  K_.setFromTriplets(tk.begin(), tk.end());
  M_.resize(N, N);
  M_.setFromTriplets(tm.begin(), tm.end());
  W_ = Eigen::Map<Eigen::VectorXd>(W.data(), N);
  B_.resize(N, 1);
  std::vector<Triplet> tb{Triplet(N - 1, 0, -offK[N - 1])};
  B_.setFromTriplets(tb.begin(), tb.end());
  h_ = 0;
  for (size_t e = 0; e < N; ++e) h_ = std::max(h_, radii_[e + 1] - radii_[e]);
}

long Discretization::lattice_index(const std::vector<int>& ijk) const {
  const int m = grid_.points_per_axis;
  long flat = 0;
  for (int k = n() - 1; k >= 0; --k) {
    if (ijk[k] < 0 || ijk[k] > m) return -1;
    flat = flat * (m + 1) + ijk[k];
  }
  return lattice_[flat];
}

void Discretization::build_cartesian() {
  const int nd = domain_.n;
  const int m = grid_.points_per_axis;
  origin_.resize(nd);
  hk_.resize(nd);
  for (int k = 0; k < nd; ++k) {
    if (domain_.kind == DomainKind::UnitBall) {
      origin_[k] = -domain_.ball_radius;
      hk_[k] = 2 * domain_.ball_radius / m;
    } else {
      origin_[k] = domain_.box_extents[k][0];
      hk_[k] = (domain_.box_extents[k][1] - domain_.box_extents[k][0]) / m;
    }
  }
  double vol = 1;
  for (double h : hk_) vol *= h;
  h_ = *std::max_element(hk_.begin(), hk_.end());

  long total = 1;
  for (int k = 0; k < nd; ++k) total *= (m + 1);
  lattice_.assign(total, -1);
  std::vector<int> ijk(nd, 0);
  auto point = [&](const std::vector<int>& id, std::vector<double>& x) {
    for (int k = 0; k < nd; ++k) x[k] = origin_[k] + id[k] * hk_[k];
  };
  auto interior = [&](const std::vector<int>& id) {
    for (int k = 0; k < nd; ++k)
      if (id[k] <= 0 || id[k] >= m) return false;
    if (domain_.kind == DomainKind::Box) return true;
    double r2 = 0;
    for (int k = 0; k < nd; ++k) {
      double x = origin_[k] + id[k] * hk_[k];
      r2 += x * x;
    }
    double R = domain_.ball_radius;
    return r2 < R * R * (1 - 1e-12);
  };
  // enumerate lattice in lexicographic order (last axis slowest)
  std::vector<double> x(nd);
  long count = 0;
  for (long flat = 0; flat < total; ++flat) {
    long f = flat;
    for (int k = 0; k < nd; ++k) {
      ijk[k] = static_cast<int>(f % (m + 1));
      f /= (m + 1);
    }
    if (interior(ijk)) {
      lattice_[flat] = count++;
      point(ijk, x);
      coords_.insert(coords_.end(), x.begin(), x.end());
    }
  }
  const size_t N = static_cast<size_t>(count);
  std::vector<Triplet> tk, tb;
  std::vector<double> diag(N, 0.0);
  size_t nb = 0;
  for (size_t i = 0; i < N; ++i) {
    std::span<const double> xi(coords_.data() + i * nd, nd);
    std::vector<int> id(nd);
    for (int k = 0; k < nd; ++k) id[k] = static_cast<int>(std::lround((xi[k] - origin_[k]) / hk_[k]));
    for (int k = 0; k < nd; ++k) {
      double hh = hk_[k];
      for (int sgn : {-1, 1}) {
        std::vector<int> nb_id = id;
        nb_id[k] += sgn;
        long j = lattice_index(nb_id);
        if (j >= 0) {
          tk.emplace_back(i, j, -vol / (hh * hh));
          diag[i] += vol / (hh * hh);
          continue;
        }
        // neighbour outside: boundary point along the axis
        double theta = 1.0;
        std::vector<double> xb(xi.begin(), xi.end());
        if (domain_.kind == DomainKind::UnitBall) {
          double R = domain_.ball_radius;
          double r2 = 0;
          for (int q = 0; q < nd; ++q) r2 += xi[q] * xi[q];
          double c = xi[k] * sgn;
          // solve |x + t e|^2 = R^2 for t in (0, h]
          double t = -c + std::sqrt(c * c + R * R - r2);
          theta = std::clamp(t / hh, 1e-6, 1.0);
          xb[k] = xi[k] + sgn * theta * hh;
        } else {
          xb[k] = xi[k] + sgn * hh;
        }
        double w = vol / (theta * hh * hh);
        diag[i] += w;
        tb.emplace_back(i, nb, w);
        bcoords_.insert(bcoords_.end(), xb.begin(), xb.end());
        ++nb;
      }
    }
  }
  for (size_t i = 0; i < N; ++i) tk.emplace_back(i, i, diag[i]);
  K_.resize(N, N);
  K_.setFromTriplets(tk.begin(), tk.end());
  B_.resize(N, nb);
  B_.setFromTriplets(tb.begin(), tb.end());
  W_ = Eigen::VectorXd::Constant(N, vol);
}

}  // namespace bl
