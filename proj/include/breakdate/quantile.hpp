#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace breakdate {

// Type-7 empirical quantile (linear interpolation of order statistics)
// on an ascending-sorted sample.
inline double quantile_type7_sorted(const std::vector<double>& sorted,
                                    double alpha) {
  const std::size_t m = sorted.size();
  if (m == 1) return sorted[0];
  double h = alpha * static_cast<double>(m - 1);
  if (h <= 0.0) return sorted.front();
  if (h >= static_cast<double>(m - 1)) return sorted.back();
  const std::size_t lo = static_cast<std::size_t>(h);
  const double w = h - static_cast<double>(lo);
  return sorted[lo] + w * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace breakdate
