#include "gpssim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gpssim/error.hpp"

namespace gpssim {

double nearest_rank_percentile(std::span<const double> values, double q) {
  if (values.empty()) throw EmptyFixSet("percentile of an empty set");
  if (!(q > 0.0 && q <= 1.0)) throw std::invalid_argument("percentile must be in (0, 1]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(sorted.size()) - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, sorted.size());
  return sorted[rank - 1];
}

ErrorStats compute_error_stats(std::span<const double> errors) {
  if (errors.empty()) throw EmptyFixSet("no fixes to summarize");
  ErrorStats s;
  s.count = errors.size();
  const auto n = static_cast<double>(s.count);

  double sum = 0.0;
  double sum_sq = 0.0;
  for (double e : errors) {
    sum += e;
    sum_sq += e * e;
    s.max = std::max(s.max, e);
  }
  s.average = sum / n;
  s.rms = std::sqrt(sum_sq / n);

  double dev_sq = 0.0;
  for (double e : errors) dev_sq += (e - s.average) * (e - s.average);
  s.stddev = std::sqrt(dev_sq / n);
  s.sample_stddev = s.count > 1 ? std::sqrt(dev_sq / (n - 1.0)) : 0.0;
  s.p95 = nearest_rank_percentile(errors, 0.95);
  return s;
}

ErrorStats compute_error_stats(std::span<const solver::Vec3> fixes, const solver::Vec3& intended) {
  std::vector<double> errors;
  errors.reserve(fixes.size());
  for (const auto& f : fixes) errors.push_back(solver::horizontal_error(f, intended));
  return compute_error_stats(errors);
}

}  // namespace gpssim
