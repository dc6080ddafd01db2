#include "ylab/bands.hpp"

#include <algorithm>
#include <cmath>

#include "ylab/errors.hpp"

namespace ylab {

double empirical_quantile(std::vector<double> values, double tau) {
  if (values.empty()) throw invalid_input_error("empirical_quantile: no values");
  if (!(tau > 0.0 && tau < 1.0))
    throw invalid_input_error("empirical_quantile: tau must lie in (0, 1)");
  std::sort(values.begin(), values.end());
  const double count = static_cast<double>(values.size());
  std::size_t k = static_cast<std::size_t>(std::ceil(tau * count));
  if (k == 0) k = 1;
  return values[k - 1];
}

std::vector<double> default_eval_grid(double lo, double hi, std::size_t count) {
  std::vector<double> grid(count);
  for (std::size_t i = 0; i < count; ++i)
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
  return grid;
}

}  // namespace ylab
