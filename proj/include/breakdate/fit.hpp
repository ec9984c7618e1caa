#pragma once

#include <cstddef>

#include "breakdate/panel.hpp"
#include "breakdate/scan.hpp"

namespace breakdate {

enum class Regime { SubLinear, Linear, SuperLinear };

const char* regime_name(Regime regime);

struct ChangePointFit {
  std::size_t n = 0;
  std::size_t p = 0;
  std::size_t k_hat = 0;
  double tau_hat = 0.0;
  double delta_sq_hat = 0.0;  // clamped at 0
  double delta_sq_raw = 0.0;
  bool delta_clamped = false;
  double frob_sq_hat = 0.0;
  double a_n_hat = 0.0;  // n^2 delta_sq^2 / frob_sq
  Regime regime = Regime::SubLinear;
  double log_n_over_a_n = 0.0;
};

struct DeltaSqEstimate {
  double value;  // max(0, raw)
  double raw;
  bool clamped;
};

// G_n(k_hat) / ((k_hat - 1)(n - k_hat - 1)), clamped at zero.
DeltaSqEstimate estimate_delta_sq(const ObjectiveProfile& ustat_profile,
                                  std::size_t n);

// Jackknife cross-segment trace estimator of ||Sigma||_F^2 at split k:
//   (k(n-k))^{-1} sum_{i<=k} sum_{j>k} <X_i - mean_(1:k,-i), X_j - mean_(k+1:n,-j)>^2
// with leave-one-out segment means; O(k(n-k)p) without forming p x p
// matrices. Nonnegative by construction (sum of squares).
double estimate_frob_sq(const Panel& data, std::size_t k);

// Algorithm: scan, delta-sq at the argmax, jackknife Frobenius there,
// a_n = n^2 delta^2/frob. Regime label from a_n/n with the diagnostic
// cutoffs 0.1 and 10. Throws FlatPanelError when the Frobenius estimate
// is not positive.
ChangePointFit fit(const Panel& data);

}  // namespace breakdate
