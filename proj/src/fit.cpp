#include "breakdate/fit.hpp"

#include <Eigen/Core>
#include <cmath>
#include <string>

#include "breakdate/errors.hpp"

namespace breakdate {

const char* regime_name(Regime regime) {
  switch (regime) {
    case Regime::SubLinear: return "sublinear";
    case Regime::Linear: return "linear";
    case Regime::SuperLinear: return "superlinear";
  }
  return "unknown";
}

DeltaSqEstimate estimate_delta_sq(const ObjectiveProfile& ustat_profile,
                                  std::size_t n) {
  if (ustat_profile.kind != ObjectiveKind::UStat) {
    throw InvalidInput("estimate_delta_sq needs a U-statistic profile");
  }
  const std::size_t k = ustat_profile.arg_k;
  if (k < 2 || k > n - 2) {
    throw InvalidInput("estimate_delta_sq: argmax split out of range");
  }
  const double denom =
      static_cast<double>(k - 1) * static_cast<double>(n - k - 1);
  const double raw = ustat_profile.optimum_value() / denom;
  return {raw > 0.0 ? raw : 0.0, raw, raw < 0.0};
}

double estimate_frob_sq(const Panel& data, std::size_t k) {
  const std::size_t n = data.n();
  const std::size_t p = data.p();
  if (k < 2 || k + 2 > n) {
    throw InvalidInput("estimate_frob_sq needs 2 <= k <= n-2, got k=" +
                       std::to_string(k));
  }
  using Eigen::MatrixXd;
  Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                 Eigen::RowMajor>>
      x(data.values().data(), static_cast<Eigen::Index>(n),
        static_cast<Eigen::Index>(p));
  const auto pre = x.topRows(static_cast<Eigen::Index>(k));
  const auto post = x.bottomRows(static_cast<Eigen::Index>(n - k));
  const Eigen::RowVectorXd sum_pre = pre.colwise().sum();
  const Eigen::RowVectorXd sum_post = post.colwise().sum();

  // Leave-one-out deviation: X_i - (S - X_i)/(m - 1).
  MatrixXd u = (pre * (static_cast<double>(k) / (k - 1.0))).rowwise() -
               sum_pre / (k - 1.0);
  MatrixXd v =
      (post * (static_cast<double>(n - k) / (n - k - 1.0))).rowwise() -
      sum_post / (n - k - 1.0);
  const MatrixXd cross = u * v.transpose();
  return cross.array().square().sum() /
         (static_cast<double>(k) * static_cast<double>(n - k));
}

ChangePointFit fit(const Panel& data) {
  const std::size_t n = data.n();
  if (n < 6) throw InvalidInput("fit needs n >= 6");

  const ObjectiveProfile profile = scan_ustat(data);
  const DeltaSqEstimate delta = estimate_delta_sq(profile, n);
  const double frob = estimate_frob_sq(data, profile.arg_k);
  if (!(frob > 0.0)) {
    throw FlatPanelError("jackknife Frobenius estimate is not positive");
  }

  ChangePointFit out;
  out.n = n;
  out.p = data.p();
  out.k_hat = profile.arg_k;
  out.tau_hat = profile.arg_tau;
  out.delta_sq_hat = delta.value;
  out.delta_sq_raw = delta.raw;
  out.delta_clamped = delta.clamped;
  out.frob_sq_hat = frob;
  out.a_n_hat = static_cast<double>(n) * static_cast<double>(n) *
                delta.value * delta.value / frob;
  const double ratio = out.a_n_hat / static_cast<double>(n);
  out.regime = ratio < 0.1 ? Regime::SubLinear
               : ratio <= 10.0 ? Regime::Linear
                               : Regime::SuperLinear;
  out.log_n_over_a_n = std::log(static_cast<double>(n)) / out.a_n_hat;
  return out;
}

}  // namespace breakdate
