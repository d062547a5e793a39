#include "bubblelab/fitting.hpp"

#include <algorithm>
#include <cmath>

#include "bubblelab/errors.hpp"

namespace bl {

namespace {

void line_fit(const std::vector<double>& X, const std::vector<double>& Y, double& a, double& c, double* r2) {
  const double m = static_cast<double>(X.size());
  double sx = 0, sy = 0;
  for (size_t i = 0; i < X.size(); ++i) {
    sx += X[i];
    sy += Y[i];
  }
  double mx = sx / m, my = sy / m, sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < X.size(); ++i) {
    sxx += (X[i] - mx) * (X[i] - mx);
    sxy += (X[i] - mx) * (Y[i] - my);
    syy += (Y[i] - my) * (Y[i] - my);
  }
  if (sxx <= 0) throw ConfigError("slope fit needs distinct abscissae");
  a = sxy / sxx;
  c = my - a * mx;
  if (r2) *r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
}

}  // namespace

SlopeFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y, double b) {
  if (x.size() != y.size() || x.size() < 2) throw ConfigError("slope fit needs at least two matching points");
  std::vector<double> X, Y;
  for (size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0) || !(y[i] > 0)) throw ConfigError("slope fit needs positive data");
    X.push_back(std::log(x[i]));
    Y.push_back(std::log(y[i]) - (b != 0 ? b * std::log(std::abs(std::log(x[i]))) : 0.0));
  }
  SlopeFit f;
  f.points = static_cast<int>(x.size());
  line_fit(X, Y, f.slope, f.intercept, &f.r2);
  f.loo_min = f.loo_max = f.slope;
  if (x.size() >= 3) {
    f.loo_min = INFINITY;
    f.loo_max = -INFINITY;
    for (size_t k = 0; k < X.size(); ++k) {
      std::vector<double> Xs, Ys;
      for (size_t i = 0; i < X.size(); ++i)
        if (i != k) {
          Xs.push_back(X[i]);
          Ys.push_back(Y[i]);
        }
      double a, c;
      line_fit(Xs, Ys, a, c, nullptr);
      f.loo_min = std::min(f.loo_min, a);
      f.loo_max = std::max(f.loo_max, a);
    }
  }
  return f;
}

ProportionalFit fit_proportional(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.empty()) throw ConfigError("proportional fit needs matching data");
  double sxy = 0, sxx = 0, syy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += x[i] * y[i];
    sxx += x[i] * x[i];
    syy += y[i] * y[i];
  }
  if (sxx <= 0) throw ConfigError("proportional fit needs nonzero abscissae");
  ProportionalFit f;
  f.k = sxy / sxx;
  double res = 0;
  for (size_t i = 0; i < x.size(); ++i) res += (y[i] - f.k * x[i]) * (y[i] - f.k * x[i]);
  f.rel_residual = syy > 0 ? std::sqrt(res / syy) : 0.0;
  return f;
}

bool monotonically_improving(const std::vector<double>& r) {
  for (size_t i = 0; i + 1 < r.size(); ++i)
    if (std::abs(r[i + 1] - 1) > std::abs(r[i] - 1)) return false;
  return true;
}

}  // namespace bl
