#pragma once

#include <span>
#include <vector>

#include "gpssim/position_solver.hpp"

namespace gpssim {

/// Summary of per-fix position errors, meters.
struct ErrorStats {
  std::size_t count = 0;
  double average = 0.0;
  double stddev = 0.0;         ///< population (n)
  double sample_stddev = 0.0;  ///< unbiased (n - 1); 0 for a single fix
  double rms = 0.0;
  double p95 = 0.0;            ///< nearest rank
  double max = 0.0;
};

/// Nearest-rank percentile: the ceil(q * n)-th smallest value, q in (0, 1].
double nearest_rank_percentile(std::span<const double> values, double q);

/// Throws EmptyFixSet when `errors` is empty.
ErrorStats compute_error_stats(std::span<const double> errors);

/// Horizontal (east/north) error of each fix against `intended`, then stats.
ErrorStats compute_error_stats(std::span<const solver::Vec3> fixes, const solver::Vec3& intended);

}  // namespace gpssim
