#include "gpssim/time_offset.hpp"

#include <stdexcept>

namespace gpssim {

ErrorBudget::ErrorBudget(TimeOffset limit) : limit_(limit) {
  if (limit <= TimeOffset{}) {
    throw std::invalid_argument("error budget limit must be positive");
  }
}

bool within_budget(TimeOffset error, const ErrorBudget& budget) {
  return error.abs() <= budget.limit();
}

}  // namespace gpssim
