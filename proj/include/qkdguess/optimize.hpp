#pragma once

// Small one-dimensional and derivative-free optimizers.

#include <functional>

#include <Eigen/Core>

namespace qkdguess {

struct ScalarMax {
  double x = 0.0;
  double value = 0.0;
};

/// Golden-section search for the maximum of a unimodal f on [lo, hi].
/// The endpoints are not evaluated.
ScalarMax golden_section_max(const std::function<double(double)>& f, double lo, double hi, double tol);

/// Evaluates f on `grid_points` equally spaced points of [lo, hi] (endpoints
/// included), then refines between the neighbours of the best grid point.
/// The result is never worse than the best grid value.
ScalarMax grid_then_golden_max(const std::function<double(double)>& f, double lo, double hi, int grid_points,
                               double tol);

/// Bisection for a sign change of f on [lo, hi]. Throws Error(NoCrossing)
/// when f(lo) and f(hi) have the same strict sign.
double bisect_root(const std::function<double(double)>& f, double lo, double hi, double xtol,
                   int max_iterations = 200);

struct SimplexOptions {
  double ftol = 1e-8;
  double xtol = 1e-8;
  int max_evaluations = 20000;
  double initial_step = 0.3;
};

struct SimplexResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

/// Nelder-Mead simplex maximization starting from an axis-aligned simplex
/// around x0.
SimplexResult nelder_mead_max(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x0,
                              const SimplexOptions& options = {});

}  // namespace qkdguess
