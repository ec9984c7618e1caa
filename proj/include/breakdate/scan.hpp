#pragma once

#include <cstddef>
#include <vector>

#include "breakdate/panel.hpp"

namespace breakdate {

enum class ObjectiveKind { UStat, LeastSquares };

// Objective values over all admissible split points plus the optimizer.
// UStat stores G_n(k) for k in [2, n-2] and arg_k = argmax; LeastSquares
// stores SSR(k) for k in [1, n-1] and arg_k = argmin. Ties break to the
// smallest k. Raw objective values, no normalization.
struct ObjectiveProfile {
  ObjectiveKind kind;
  std::size_t k_min;
  std::size_t k_max;
  std::vector<double> values;  // values[k - k_min]
  std::size_t arg_k;
  double arg_tau;

  double value_at(std::size_t k) const { return values[k - k_min]; }
  double optimum_value() const { return values[arg_k - k_min]; }
};

// G_n(k) for every k in [2, n-2] in O(np) total via the prefix-sum
// expansion of the quadruple sum
//   G_n(k) = [(n-k)(n-k-1) A + k(k-1) B - 2(k-1)(n-k-1) C] / (k(n-k)),
// A = ||S_k||^2 - sum_{t<=k} ||X_t||^2, B the post-split analogue and
// C = S_k^T (S_n - S_k).
ObjectiveProfile scan_ustat(const Panel& data);

// SSR(k) = sum_{t<=k} ||X_t - mean_{1:k}||^2 + sum_{t>k} ||X_t - mean_{k+1:n}||^2
// for k in [1, n-1], computed as sqnorm totals minus ||S_k||^2/k and
// ||S_n - S_k||^2/(n-k).
ObjectiveProfile scan_ssr(const Panel& data);

struct PointEstimate {
  std::size_t k_hat;
  double tau_hat;
};

PointEstimate estimate_ustat(const Panel& data);
PointEstimate estimate_ls(const Panel& data);

}  // namespace breakdate
