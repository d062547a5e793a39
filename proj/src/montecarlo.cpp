#include "bubblelab/montecarlo.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "bubblelab/errors.hpp"

namespace bl {

double proposal_density(int n, const Proposal& q, std::span<const double> x) {
  // t_nu density with nu = n, sigma = delta / sqrt(n): nu sigma^2 = delta^2
  const double nu = n;
  double r2 = 0;
  for (int k = 0; k < n; ++k) r2 += (x[k] - q.centre[k]) * (x[k] - q.centre[k]);
  double logc = std::lgamma(0.5 * (nu + n)) - std::lgamma(0.5 * nu) -
                0.5 * n * std::log(std::numbers::pi * q.delta * q.delta);
  return std::exp(logc - 0.5 * (nu + n) * std::log1p(r2 / (q.delta * q.delta)));
}

MCResult mc_integrate(int n, const FnN& f, const std::vector<Proposal>& mix, long samples, std::uint64_t seed,
                      double ball_radius) {
  if (mix.empty()) throw ConfigError("Monte Carlo needs at least one proposal");
  if (samples < static_cast<long>(2 * mix.size())) throw ConfigError("too few Monte Carlo samples");
  for (auto& q : mix)
    if (static_cast<int>(q.centre.size()) != n || !(q.delta > 0)) throw ConfigError("bad proposal");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::chi_squared_distribution<double> chi2(static_cast<double>(n));
  const double w = 1.0 / static_cast<double>(mix.size());
  const long per = samples / static_cast<long>(mix.size());
  std::vector<double> x(n);
  MCResult res;
  double var = 0;
  for (const auto& q : mix) {
    double mean = 0, m2 = 0;
    for (long s = 0; s < per; ++s) {
      double scale = q.delta / std::sqrt(static_cast<double>(n)) / std::sqrt(chi2(rng) / n);
      for (int k = 0; k < n; ++k) x[k] = q.centre[k] + scale * gauss(rng);
      double val = 0;
      bool inside = true;
      if (ball_radius > 0) {
        double r2 = 0;
        for (double c : x) r2 += c * c;
        inside = r2 < ball_radius * ball_radius;
      }
      if (inside) {
        double dens = 0;
        for (const auto& c : mix) dens += w * proposal_density(n, c, x);
        val = f(x) / dens;
      }
      // Welford
      double d = val - mean;
      mean += d / static_cast<double>(s + 1);
      m2 += d * (val - mean);
    }
    res.value += w * mean;
    var += w * w * m2 / static_cast<double>(per - 1) / static_cast<double>(per);
  }
  res.stderr_ = std::sqrt(var);
  res.samples = per * static_cast<long>(mix.size());
  if (!std::isfinite(res.value)) throw SolverError("Monte Carlo estimate is not finite");
  return res;
}

}  // namespace bl
