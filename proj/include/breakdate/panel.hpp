#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace breakdate {

// Immutable n x p panel of observations, row t = X_t. Row-major storage:
// every scan streams over time. Entries are validated finite on
// construction so the numeric kernels can stay unchecked.
class Panel {
 public:
  Panel(std::size_t n, std::size_t p, std::vector<double> values);

  std::size_t n() const { return n_; }
  std::size_t p() const { return p_; }

  double operator()(std::size_t t, std::size_t j) const {
    return values_[t * p_ + j];
  }

  std::span<const double> row(std::size_t t) const {
    return {values_.data() + t * p_, p_};
  }

  const std::vector<double>& values() const { return values_; }

 private:
  std::size_t n_;
  std::size_t p_;
  std::vector<double> values_;
};

// Cumulative sums over time shared by all scans: cum[k] = sum_{t<=k} X_t
// (p-vector) and sqnorm_cum[k] = sum_{t<=k} ||X_t||^2, k = 0..n.
// Accumulated with Neumaier compensation so prefix differences stay
// accurate at any panel size.
class PrefixSums {
 public:
  explicit PrefixSums(const Panel& data);

  std::size_t n() const { return n_; }
  std::size_t p() const { return p_; }

  std::span<const double> cum(std::size_t k) const {
    return {cum_.data() + k * p_, p_};
  }

  double sqnorm_cum(std::size_t k) const { return sqnorm_cum_[k]; }

  std::span<const double> total() const { return cum(n_); }

  // sum_{a < t <= b} X_t = cum[b] - cum[a]; throws on a > b or b > n.
  std::vector<double> segment_sum(std::size_t a, std::size_t b) const;

 private:
  std::size_t n_;
  std::size_t p_;
  std::vector<double> cum_;         // (n+1) x p
  std::vector<double> sqnorm_cum_;  // n+1
};

inline PrefixSums build_prefix_sums(const Panel& data) {
  return PrefixSums(data);
}

enum class SigmaModel {
  Identity,
  Ar1,                // Sigma(i,j) = rho^|i-j|
  Banded,             // 0.5^|i-j| for |i-j| <= 2
  CompoundSymmetric,  // 0.5 I + 0.5 11^T
  InteractionDiag,    // diag(0.1 for i <= p/2, 1 otherwise)
};

struct SigmaSpec {
  SigmaModel model = SigmaModel::Identity;
  double ar_rho = 0.8;
};

std::string sigma_model_name(SigmaModel model);
SigmaModel sigma_model_from_name(const std::string& name);

// Description of the one-change-point synthetic model: mean mu1 before
// the break at k0 = floor(n * tau0), mu1 + delta after it.
struct Cp1Spec {
  std::size_t n = 0;
  std::size_t p = 0;
  double tau0 = 0.5;
  std::vector<double> delta;  // size p
  SigmaSpec sigma;
  std::vector<double> mu1;  // size p or empty for zero baseline

  std::size_t k0() const { return static_cast<std::size_t>(n * tau0); }

  // Throws InvalidInput unless 2 <= k0 <= n-2 and the shapes agree.
  void validate() const;
};

}  // namespace breakdate
