#pragma once
#include <iosfwd>
#include <optional>
#include <vector>

#include "bubblelab/elliptic.hpp"

namespace bl {

struct DecompositionState {
  Field u;
  std::optional<Field> u0;
  std::vector<BubbleParams> bubbles;
  ProjectionKind kind = ProjectionKind::PU1;
  double lambda = 0;
  Field sigma;
  Field rho;
  double distance = 0;
  // row i, column k: |<rho, PZ_i^k>| / (||rho|| ||PZ_i^k||); zero when rho = 0
  std::vector<std::vector<double>> ortho_residuals;
  int iterations = 0;
  bool converged = false;

  double ortho_max() const;
};

struct ErrorFields {
  Field I0, I1, I2, I3;
};

// Pointwise error fields of the decomposition u = u0 + sigma + rho.
ErrorFields assemble_error_fields(const DecompositionState& s, double lambda);

struct FitOptions {
  int max_iter = 200;
  double ortho_tol = 1e-6;
  // Stop when ||rho|| drops below this fraction of ||u|| (zero-residual inputs).
  double floor = 1e-11;
  double min_delta_cells = 0.5;  // smallest admissible delta in grid spacings (Cartesian)
  double max_delta = 0.6;
  double min_boundary_ratio = 1.0;  // d(xi, boundary) / delta must stay above this
  SolverOptions solver;
};

// Gauss-Newton with Levenberg damping for the nearest u0 + sum PU configuration.
// On radial meshes the centres are pinned at the origin and only the scales move.
DecompositionState fit(const Field& u, const std::optional<Field>& u0,
                       const std::vector<BubbleParams>& init, ProjectionKind kind, double lambda,
                       const FitOptions& opt = {});

// Recomputes sigma, rho, the distance and the orthogonality residuals for fixed parameters.
DecompositionState evaluate_configuration(const Field& u, const std::optional<Field>& u0,
                                          const std::vector<BubbleParams>& bubbles,
                                          ProjectionKind kind, double lambda,
                                          const SolverOptions& sopt = {});

struct MultistartResult {
  std::vector<DecompositionState> starts;  // in start order; failed starts have converged=false
  std::vector<std::string> failures;       // empty string when the start succeeded
  size_t best = 0;
  double distance() const { return starts[best].distance; }
};

// Deterministic start grid: delta in {0.05, 0.1, 0.2} times a coarse interior lattice
// of centres; `count` starts are drawn from the grid with the given seed.
std::vector<std::vector<BubbleParams>> multistart_grid(const Discretization& d, int nu, int count,
                                                       unsigned long seed);

MultistartResult fit_multistart(const Field& u, const std::optional<Field>& u0, int nu,
                                ProjectionKind kind, double lambda, int count, unsigned long seed,
                                const FitOptions& opt = {},
                                const std::vector<std::vector<BubbleParams>>& extra_starts = {});

double distance_functional(const Field& u, const std::optional<Field>& u0, int nu,
                           ProjectionKind kind, double lambda, int count, unsigned long seed,
                           const FitOptions& opt = {});

// Sorts bubbles by (delta, then lexicographic xi).
void canonical_order(std::vector<BubbleParams>& b);

void write_fit_report_csv(std::ostream& os, const MultistartResult& r);

}  // namespace bl
