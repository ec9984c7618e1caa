#include "breakdate/panel.hpp"

#include <cmath>
#include <stdexcept>

#include "breakdate/errors.hpp"

namespace breakdate {

Panel::Panel(std::size_t n, std::size_t p, std::vector<double> values)
    : n_(n), p_(p), values_(std::move(values)) {
  if (n_ < 4) {
    throw InvalidInput("panel needs n >= 4 time points, got " +
                       std::to_string(n_));
  }
  if (p_ < 1) {
    throw InvalidInput("panel needs p >= 1 dimensions");
  }
  if (values_.size() != n_ * p_) {
    throw InvalidInput("panel storage size " + std::to_string(values_.size()) +
                       " does not match n*p = " + std::to_string(n_ * p_));
  }
  for (double v : values_) {
    if (!std::isfinite(v)) {
      throw InvalidInput("panel entries must be finite");
    }
  }
}

namespace {

// Neumaier compensated add: sum += v with carry kept in comp.
inline void compensated_add(double v, double& sum, double& comp) {
  const double t = sum + v;
  if (std::abs(sum) >= std::abs(v)) {
    comp += (sum - t) + v;
  } else {
    comp += (v - t) + sum;
  }
  sum = t;
}

}  // namespace

PrefixSums::PrefixSums(const Panel& data)
    : n_(data.n()),
      p_(data.p()),
      cum_((data.n() + 1) * data.p(), 0.0),
      sqnorm_cum_(data.n() + 1, 0.0) {
  std::vector<double> col_sum(p_, 0.0);
  std::vector<double> col_comp(p_, 0.0);
  double sq_sum = 0.0;
  double sq_comp = 0.0;
  for (std::size_t t = 0; t < n_; ++t) {
    const double* row = data.values().data() + t * p_;
    double row_sq = 0.0;
    for (std::size_t j = 0; j < p_; ++j) {
      compensated_add(row[j], col_sum[j], col_comp[j]);
      cum_[(t + 1) * p_ + j] = col_sum[j] + col_comp[j];
      row_sq += row[j] * row[j];
    }
    compensated_add(row_sq, sq_sum, sq_comp);
    sqnorm_cum_[t + 1] = sq_sum + sq_comp;
  }
}

std::vector<double> PrefixSums::segment_sum(std::size_t a, std::size_t b) const {
  if (a > b || b > n_) {
    throw InvalidInput("segment_sum indices out of range: a=" +
                       std::to_string(a) + " b=" + std::to_string(b) +
                       " n=" + std::to_string(n_));
  }
  std::vector<double> out(p_);
  const double* ca = cum_.data() + a * p_;
  const double* cb = cum_.data() + b * p_;
  for (std::size_t j = 0; j < p_; ++j) out[j] = cb[j] - ca[j];
  return out;
}

std::string sigma_model_name(SigmaModel model) {
  switch (model) {
    case SigmaModel::Identity: return "id";
    case SigmaModel::Ar1: return "ar";
    case SigmaModel::Banded: return "bd";
    case SigmaModel::CompoundSymmetric: return "cs";
    case SigmaModel::InteractionDiag: return "int";
  }
  throw InvalidInput("unknown sigma model");
}

SigmaModel sigma_model_from_name(const std::string& name) {
  if (name == "id") return SigmaModel::Identity;
  if (name == "ar") return SigmaModel::Ar1;
  if (name == "bd") return SigmaModel::Banded;
  if (name == "cs") return SigmaModel::CompoundSymmetric;
  if (name == "int") return SigmaModel::InteractionDiag;
  throw InvalidInput("unknown sigma model '" + name + "'");
}

void Cp1Spec::validate() const {
  if (n < 4) throw InvalidInput("cp1 model needs n >= 4");
  if (p < 1) throw InvalidInput("cp1 model needs p >= 1");
  if (!(tau0 > 0.0 && tau0 < 1.0)) {
    throw InvalidInput("cp1 model needs tau0 in (0,1)");
  }
  const std::size_t k = k0();
  if (k < 2 || k > n - 2) {
    throw InvalidInput("cp1 model needs 2 <= floor(n*tau0) <= n-2");
  }
  if (delta.size() != p) {
    throw InvalidInput("cp1 delta must have length p");
  }
  if (!mu1.empty() && mu1.size() != p) {
    throw InvalidInput("cp1 mu1 must be empty or length p");
  }
}

}  // namespace breakdate
