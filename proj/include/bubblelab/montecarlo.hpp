#pragma once
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace bl {

// One mixture component: a multivariate Student-t with nu = n degrees of
// freedom and scale delta/sqrt(n), i.e. density proportional to
// (1 + |x - centre|^2 / delta^2)^{-n}. Its tails dominate every bubble power
// used here.
struct Proposal {
  std::vector<double> centre;
  double delta = 1;
};

struct MCResult {
  double value = 0;
  double stderr_ = 0;
  long samples = 0;
};

using FnN = std::function<double(std::span<const double>)>;

// Integral of f over R^n (ball_radius <= 0) or over the centred ball of the given
// radius. Samples are split evenly between the proposals (stratified) and
// weighted by the mixture density. Deterministic for a given seed.
MCResult mc_integrate(int n, const FnN& f, const std::vector<Proposal>& mix, long samples, std::uint64_t seed,
                      double ball_radius = 0);

double proposal_density(int n, const Proposal& q, std::span<const double> x);

}  // namespace bl
