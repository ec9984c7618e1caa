#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "breakdate/cov.hpp"
#include "breakdate/fit.hpp"
#include "breakdate/panel.hpp"

namespace breakdate {

enum class CiMethod { U1, U2, U3, U4, U5, LS1, LS2 };

const char* ci_method_name(CiMethod method);
CiMethod ci_method_from_name(const std::string& name);

enum class DeltaShape { UniformVector, SparseFive };

struct BootstrapConfig {
  int B = 200;
  std::uint64_t seed = 0;
  double level = 0.95;
  CovMethod cov_method = CovMethod::RothmanPD;
  SigmaPdOptions cov_options;
  DeltaShape delta_shape = DeltaShape::UniformVector;
  double c_star = 0.05;  // LS2 trimming fraction
  int threads = 1;
  // Test hook: use this covariance instead of estimating one.
  std::optional<Eigen::MatrixXd> sigma_override;
};

struct IntervalResult {
  CiMethod method;
  double lo = 0.0;
  double hi = 0.0;
  double level = 0.95;
  int B = 0;  // 0 for plug-in methods
  std::map<std::string, double> diagnostics;

  bool covers(double tau) const { return lo <= tau && tau <= hi; }
  double length() const { return hi - lo; }
};

// Plug-in interval from the limiting law:
//   [tau_hat - q_{1-a/2}(xi(tau_hat))/a_n, tau_hat - q_{a/2}(xi(tau_hat))/a_n],
// clamped to [0,1]. Uses a_n_hat from the fit; a caller-supplied true a_n
// switches the label to the oracle variant (simulation only).
IntervalResult ci_plugin(const ChangePointFit& fit_result, double level = 0.95,
                         std::optional<double> oracle_a_n = std::nullopt);

// Parametric bootstrap around the centered two-mean model: delta_hat is a
// norm-matched uniform (or 5-spike) vector with ||delta_hat||^2 = Delta_hat,
// noise N(0, Sigma_hat); percentile interval from tau*_b - tau_hat.
IntervalResult ci_boot_parametric_u4(const Panel& data,
                                     const ChangePointFit& fit_result,
                                     const BootstrapConfig& config);

// Parametric bootstrap around the fitted segment means at k_hat (the
// two-mean residual model), break re-estimated by the U-statistic scan.
IntervalResult ci_boot_parametric_u3(const Panel& data,
                                     const ChangePointFit& fit_result,
                                     const BootstrapConfig& config);

// Nonparametric bootstrap: rows resampled with replacement within the
// pre- and post-break segments separately.
IntervalResult ci_boot_nonparametric_u5(const Panel& data,
                                        const ChangePointFit& fit_result,
                                        const BootstrapConfig& config);

// Least-squares plug-in interval (signal-to-noise ratio A_p with the
// half-width 11/A_p read on the split-index scale). 95% only.
IntervalResult ci_ls1(const Panel& data, double level = 0.95);

// Least-squares parametric bootstrap with trimmed scan: break from SSR
// over [c* n, (1-c*) n], bootstrap panels around the fitted segment
// means, per-replicate offset h from the fixed-mean profile.
IntervalResult ci_ls2(const Panel& data, const BootstrapConfig& config);

// Convenience dispatcher; oracle_a_n feeds U1 only.
IntervalResult construct_interval(CiMethod method, const Panel& data,
                                  const BootstrapConfig& config,
                                  std::optional<double> oracle_a_n = std::nullopt);

// Fixed-mean split profile used by the LS2 replicates:
//   L(m) = (1/n) [ sum_{t<=m} ||X_t - mu_pre||^2 + sum_{t>m} ||X_t - mu_post||^2 ]
// for m in [m_lo, m_hi]; exposed for oracle checks.
std::vector<double> fixed_mean_ssr_profile(const Panel& data,
                                           const std::vector<double>& mu_pre,
                                           const std::vector<double>& mu_post,
                                           std::size_t m_lo, std::size_t m_hi);

}  // namespace breakdate
