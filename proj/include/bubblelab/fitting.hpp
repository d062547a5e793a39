#pragma once
#include <vector>

namespace bl {

struct SlopeFit {
  double slope = 0;
  double intercept = 0;
  double r2 = 0;
  double loo_min = 0, loo_max = 0;  // range of leave-one-out slopes
  int points = 0;
};

// Least-squares fit of log(y) - b*log|log x| = a*log(x) + c with b fixed
// (b = 0 gives a plain log-log slope). x, y must be positive.
SlopeFit fit_power_law(const std::vector<double>& x, const std::vector<double>& y, double log_power = 0.0);

// Least-squares slope through the origin, y ~ k x.
struct ProportionalFit {
  double k = 0;
  double rel_residual = 0;  // ||y - kx|| / ||y||
};
ProportionalFit fit_proportional(const std::vector<double>& x, const std::vector<double>& y);

// True when |v[i+1] - 1| <= |v[i] - 1| for all i (ratios approaching one).
bool monotonically_improving(const std::vector<double>& ratios);

}  // namespace bl
