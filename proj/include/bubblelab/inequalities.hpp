#pragma once
#include <cstdint>
#include <string>
#include <vector>

namespace bl {

struct SuiteResult {
  std::string family;  // elementary, lp-norm, cross-integral, riesz
  std::string name;
  bool passed = false;
  double measured = 0;  // max constant or fitted exponent
  double expected = 0;  // bound on the constant or target exponent
  double tolerance = 0;
  std::string detail;
};

// Elementary inequalities for (a+b)^s on random triples; reports the largest
// ratio |lhs| / rhs, which must stay below max_constant.
std::vector<SuiteResult> inequality_suite(std::uint64_t seed, long samples = 100000, double max_constant = 1e3);
std::vector<SuiteResult> lp_scaling_suite();
std::vector<SuiteResult> cross_integral_suite(std::uint64_t seed);
std::vector<SuiteResult> riesz_suite();
std::vector<SuiteResult> full_suite(std::uint64_t seed);

// Remainders of the binomial expansion, accurate for small |t|:
// (1+t)^s - sum_{k<order} C(s,k) t^k.
double binomial_remainder(double s, double t, int order);

}  // namespace bl
