#include "breakdate/intervals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "breakdate/errors.hpp"
#include "breakdate/parallel.hpp"
#include "breakdate/quantile.hpp"
#include "breakdate/rng.hpp"
#include "breakdate/scan.hpp"
#include "breakdate/xi_dist.hpp"

namespace breakdate {

namespace {

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

std::vector<double> segment_mean(const Panel& data, std::size_t begin,
                                 std::size_t end) {
  std::vector<double> mean(data.p(), 0.0);
  for (std::size_t t = begin; t < end; ++t) {
    const auto row = data.row(t);
    for (std::size_t j = 0; j < data.p(); ++j) mean[j] += row[j];
  }
  const double m = static_cast<double>(end - begin);
  for (double& v : mean) v /= m;
  return mean;
}

CovEstimate resolve_sigma(const Panel& data, std::size_t k,
                          const BootstrapConfig& config) {
  if (config.sigma_override) {
    CovEstimate out;
    out.sigma = *config.sigma_override;
    out.method = config.cov_method;
    return out;
  }
  SigmaPdOptions options = config.cov_options;
  return estimate_cov(data, k, config.cov_method, options);
}

// Percentile interval [center - q_{1-a/2}(diff), center - q_{a/2}(diff)].
IntervalResult percentile_interval(CiMethod method, double center,
                                   std::vector<double> diffs, double level,
                                   int B) {
  std::sort(diffs.begin(), diffs.end());
  const double a = (1.0 - level) / 2.0;
  const double q_lo = quantile_type7_sorted(diffs, a);
  const double q_hi = quantile_type7_sorted(diffs, 1.0 - a);
  IntervalResult out;
  out.method = method;
  out.level = level;
  out.B = B;
  out.lo = clamp01(center - q_hi);
  out.hi = clamp01(center - q_lo);
  out.diagnostics["q_lo"] = q_lo;
  out.diagnostics["q_hi"] = q_hi;
  return out;
}

void check_level(double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw InvalidInput("confidence level must lie in (0,1)");
  }
}

StreamTag boot_tag(CiMethod method) {
  switch (method) {
    case CiMethod::U3: return kTagBootstrapU3;
    case CiMethod::U4: return kTagBootstrapU4;
    case CiMethod::U5: return kTagBootstrapU5;
    case CiMethod::LS2: return kTagBootstrapLs2;
    default: throw InvalidInput("not a bootstrap method");
  }
}

// Shared driver for the Gaussian parametric bootstraps U3/U4: panels are
// `shift_at_k` rows of pre-mean plus noise, then post rows; the break is
// re-estimated by the U-statistic scan with the same tie-break.
IntervalResult gaussian_bootstrap(CiMethod method, const Panel& data,
                                  const std::vector<double>& mu_pre,
                                  const std::vector<double>& mu_post,
                                  std::size_t k, double center,
                                  const BootstrapConfig& config) {
  const std::size_t n = data.n();
  const std::size_t p = data.p();
  const CovEstimate sigma = resolve_sigma(data, k, config);
  const GaussianSampler sampler(sigma.sigma);
  const int B = config.B;
  if (B < 1) throw InvalidInput("bootstrap needs B >= 1");

  std::vector<double> taus(B);
  const StreamTag tag = boot_tag(method);
  parallel_for(static_cast<std::size_t>(B), config.threads, [&](std::size_t b) {
    RngStream stream = RngStream::derive(config.seed, {tag, b});
    std::vector<double> values(n * p);
    sampler.fill(stream, n, values.data());
    for (std::size_t t = 0; t < n; ++t) {
      const std::vector<double>& mu = t < k ? mu_pre : mu_post;
      double* row = values.data() + t * p;
      for (std::size_t j = 0; j < p; ++j) row[j] += mu[j];
    }
    const Panel boot(n, p, std::move(values));
    taus[b] = estimate_ustat(boot).tau_hat;
  });

  std::vector<double> diffs(B);
  for (int b = 0; b < B; ++b) diffs[b] = taus[b] - center;
  IntervalResult out =
      percentile_interval(method, center, std::move(diffs), config.level, B);
  out.diagnostics["lambda2"] = sigma.lambda2;
  out.diagnostics["sigma_min_eigenvalue"] = sigma.min_eigenvalue;
  return out;
}

}  // namespace

const char* ci_method_name(CiMethod method) {
  switch (method) {
    case CiMethod::U1: return "u1";
    case CiMethod::U2: return "u2";
    case CiMethod::U3: return "u3";
    case CiMethod::U4: return "u4";
    case CiMethod::U5: return "u5";
    case CiMethod::LS1: return "ls1";
    case CiMethod::LS2: return "ls2";
  }
  return "unknown";
}

CiMethod ci_method_from_name(const std::string& name) {
  if (name == "u1") return CiMethod::U1;
  if (name == "u2") return CiMethod::U2;
  if (name == "u3") return CiMethod::U3;
  if (name == "u4") return CiMethod::U4;
  if (name == "u5") return CiMethod::U5;
  if (name == "ls1") return CiMethod::LS1;
  if (name == "ls2") return CiMethod::LS2;
  throw InvalidInput("unknown interval method '" + name + "'");
}

IntervalResult ci_plugin(const ChangePointFit& fit_result, double level,
                         std::optional<double> oracle_a_n) {
  check_level(level);
  const double a_n = oracle_a_n.value_or(fit_result.a_n_hat);
  if (!(a_n >= 0.0) || !std::isfinite(a_n)) {
    throw InvalidInput("plug-in interval needs a finite nonnegative rate");
  }
  const XiDistribution xi(fit_result.tau_hat);
  const double alpha = 1.0 - level;
  const double q_hi = xi.quantile(1.0 - alpha / 2.0);
  const double q_lo = xi.quantile(alpha / 2.0);

  IntervalResult out;
  out.method = oracle_a_n ? CiMethod::U1 : CiMethod::U2;
  out.level = level;
  out.B = 0;
  if (a_n == 0.0) {  // no usable signal: the interval is everything
    out.lo = 0.0;
    out.hi = 1.0;
  } else {
    out.lo = clamp01(fit_result.tau_hat - q_hi / a_n);
    out.hi = clamp01(fit_result.tau_hat - q_lo / a_n);
  }
  out.diagnostics["a_n"] = a_n;
  out.diagnostics["q_lo"] = q_lo;
  out.diagnostics["q_hi"] = q_hi;
  return out;
}

IntervalResult ci_boot_parametric_u4(const Panel& data,
                                     const ChangePointFit& fit_result,
                                     const BootstrapConfig& config) {
  check_level(config.level);
  const std::size_t n = data.n();
  if (n < 6) throw InvalidInput("parametric bootstrap needs n >= 6");
  const std::size_t p = data.p();
  const std::size_t k = fit_result.k_hat;

  std::vector<double> delta_hat(p, 0.0);
  const double norm = std::sqrt(fit_result.delta_sq_hat);
  if (config.delta_shape == DeltaShape::UniformVector) {
    const double v = norm / std::sqrt(static_cast<double>(p));
    std::fill(delta_hat.begin(), delta_hat.end(), v);
  } else {
    const std::size_t spikes = std::min<std::size_t>(5, p);
    const double v = norm / std::sqrt(static_cast<double>(spikes));
    for (std::size_t j = 0; j < spikes; ++j) delta_hat[j] = v;
  }

  std::vector<double> zero(p, 0.0);
  IntervalResult out = gaussian_bootstrap(CiMethod::U4, data, zero, delta_hat,
                                          k, fit_result.tau_hat, config);
  if (fit_result.delta_sq_hat == 0.0) out.diagnostics["degenerate_delta"] = 1.0;
  return out;
}

IntervalResult ci_boot_parametric_u3(const Panel& data,
                                     const ChangePointFit& fit_result,
                                     const BootstrapConfig& config) {
  check_level(config.level);
  const std::size_t n = data.n();
  if (n < 6) throw InvalidInput("parametric bootstrap needs n >= 6");
  const std::size_t k = fit_result.k_hat;
  const std::vector<double> mu_pre = segment_mean(data, 0, k);
  const std::vector<double> mu_post = segment_mean(data, k, n);
  return gaussian_bootstrap(CiMethod::U3, data, mu_pre, mu_post, k,
                            fit_result.tau_hat, config);
}

IntervalResult ci_boot_nonparametric_u5(const Panel& data,
                                        const ChangePointFit& fit_result,
                                        const BootstrapConfig& config) {
  check_level(config.level);
  const std::size_t n = data.n();
  const std::size_t p = data.p();
  const std::size_t k = fit_result.k_hat;
  if (k == 0 || k >= n) {
    throw InvalidInput("nonparametric bootstrap needs both segments nonempty");
  }
  const int B = config.B;
  if (B < 1) throw InvalidInput("bootstrap needs B >= 1");

  std::vector<double> taus(B);
  parallel_for(static_cast<std::size_t>(B), config.threads, [&](std::size_t b) {
    RngStream stream = RngStream::derive(config.seed, {kTagBootstrapU5, b});
    std::vector<double> values(n * p);
    for (std::size_t t = 0; t < n; ++t) {
      const std::size_t src = t < k ? stream.next_below(k)
                                    : k + stream.next_below(n - k);
      const auto row = data.row(src);
      std::copy(row.begin(), row.end(), values.begin() + t * p);
    }
    const Panel boot(n, p, std::move(values));
    taus[b] = estimate_ustat(boot).tau_hat;
  });

  std::vector<double> diffs(B);
  for (int b = 0; b < B; ++b) diffs[b] = taus[b] - fit_result.tau_hat;
  return percentile_interval(CiMethod::U5, fit_result.tau_hat,
                             std::move(diffs), config.level, B);
}

IntervalResult ci_ls1(const Panel& data, double level) {
  if (level != 0.95) {
    throw InvalidInput("the least-squares plug-in interval is tabulated for "
                       "level 0.95 only");
  }
  const std::size_t n = data.n();
  const std::size_t p = data.p();
  const PointEstimate ls = estimate_ls(data);
  const std::size_t k = ls.k_hat;

  const std::vector<double> mu_pre = segment_mean(data, 0, k);
  const std::vector<double> mu_post = segment_mean(data, k, n);

  double diff_sq = 0.0;
  double denom = 0.0;
  for (std::size_t j = 0; j < p; ++j) {
    double ssq = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double c = data(t, j) - (t < k ? mu_pre[j] : mu_post[j]);
      ssq += c * c;
    }
    const double sigma_j_sq = ssq / static_cast<double>(n - 2);
    const double d = mu_post[j] - mu_pre[j];
    diff_sq += d * d;
    denom += d * d * sigma_j_sq;
  }
  if (diff_sq == 0.0) {
    throw DegenerateSignalError("segment means are identical");
  }

  IntervalResult out;
  out.method = CiMethod::LS1;
  out.level = level;
  out.B = 0;
  if (denom == 0.0) {  // noiseless: infinite signal-to-noise, point interval
    out.lo = out.hi = ls.tau_hat;
    out.diagnostics["a_p_hat"] = std::numeric_limits<double>::infinity();
    return out;
  }
  const double a_p = diff_sq * diff_sq / denom;
  // 11/A_p is a split-count offset; the paper's tau-scale floor would
  // round it to zero almost surely.
  const double w = 11.0 / a_p;
  const double nd = static_cast<double>(n);
  out.lo = clamp01((static_cast<double>(k) - std::floor(w)) / nd);
  out.hi = clamp01((static_cast<double>(k) + std::ceil(w)) / nd);
  out.diagnostics["a_p_hat"] = a_p;
  return out;
}

std::vector<double> fixed_mean_ssr_profile(const Panel& data,
                                           const std::vector<double>& mu_pre,
                                           const std::vector<double>& mu_post,
                                           std::size_t m_lo, std::size_t m_hi) {
  const std::size_t n = data.n();
  const std::size_t p = data.p();
  if (m_lo < 1 || m_hi >= n || m_lo > m_hi) {
    throw InvalidInput("fixed_mean_ssr_profile range out of bounds");
  }
  const PrefixSums ps(data);
  double mu_pre_sq = 0.0, mu_post_sq = 0.0;
  for (std::size_t j = 0; j < p; ++j) {
    mu_pre_sq += mu_pre[j] * mu_pre[j];
    mu_post_sq += mu_post[j] * mu_post[j];
  }
  const auto total = ps.total();
  double total_dot_post = 0.0;
  for (std::size_t j = 0; j < p; ++j) total_dot_post += total[j] * mu_post[j];
  const double sq_total = ps.sqnorm_cum(n);

  std::vector<double> values(m_hi - m_lo + 1);
  for (std::size_t m = m_lo; m <= m_hi; ++m) {
    const auto sm = ps.cum(m);
    double sm_pre = 0.0, sm_post = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      sm_pre += sm[j] * mu_pre[j];
      sm_post += sm[j] * mu_post[j];
    }
    const double md = static_cast<double>(m);
    const double head = ps.sqnorm_cum(m) - 2.0 * sm_pre + md * mu_pre_sq;
    const double tail = (sq_total - ps.sqnorm_cum(m)) -
                        2.0 * (total_dot_post - sm_post) +
                        static_cast<double>(n - m) * mu_post_sq;
    values[m - m_lo] = (head + tail) / static_cast<double>(n);
  }
  return values;
}

IntervalResult ci_ls2(const Panel& data, const BootstrapConfig& config) {
  check_level(config.level);
  const std::size_t n = data.n();
  const std::size_t p = data.p();
  const double c = config.c_star;
  if (!(c > 0.0 && c < 0.5)) throw InvalidInput("c_star must lie in (0, 0.5)");
  if (static_cast<double>(n) * c < 1.0) {
    throw InvalidInput("trimming needs n * c_star >= 1");
  }

  const ObjectiveProfile ssr = scan_ssr(data);
  const std::size_t trim_lo = std::max<std::size_t>(
      ssr.k_min, static_cast<std::size_t>(std::floor(c * n)));
  const std::size_t trim_hi = std::min<std::size_t>(
      ssr.k_max, static_cast<std::size_t>(std::floor((1.0 - c) * n)));
  if (trim_hi < trim_lo + 2) {
    throw InvalidInput("trimming leaves fewer than 3 admissible splits");
  }
  std::size_t k = trim_lo;
  for (std::size_t m = trim_lo; m <= trim_hi; ++m) {
    if (ssr.value_at(m) < ssr.value_at(k)) k = m;
  }
  const double tau = static_cast<double>(k) / static_cast<double>(n);

  const std::vector<double> mu_pre = segment_mean(data, 0, k);
  const std::vector<double> mu_post = segment_mean(data, k, n);
  const CovEstimate sigma = resolve_sigma(data, k, config);
  const GaussianSampler sampler(sigma.sigma);

  // h ranges over the open interval (n(c - tau), n(1 - c - tau)); on the
  // split-index scale m = k + h that is (nc, n(1-c)).
  const std::size_t m_lo = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(c * n)) + 1);
  const std::size_t m_hi = std::min<std::size_t>(
      n - 1,
      static_cast<std::size_t>(std::ceil((1.0 - c) * n)) - 1);
  if (m_hi < m_lo + 2) {
    throw InvalidInput("trimming leaves fewer than 3 admissible splits");
  }

  const int B = config.B;
  if (B < 1) throw InvalidInput("bootstrap needs B >= 1");
  std::vector<double> h_hats(B);
  parallel_for(static_cast<std::size_t>(B), config.threads, [&](std::size_t b) {
    RngStream stream = RngStream::derive(config.seed, {kTagBootstrapLs2, b});
    std::vector<double> values(n * p);
    sampler.fill(stream, n, values.data());
    for (std::size_t t = 0; t < n; ++t) {
      const std::vector<double>& mu = t < k ? mu_pre : mu_post;
      double* row = values.data() + t * p;
      for (std::size_t j = 0; j < p; ++j) row[j] += mu[j];
    }
    const Panel boot(n, p, std::move(values));
    const std::vector<double> profile =
        fixed_mean_ssr_profile(boot, mu_pre, mu_post, m_lo, m_hi);
    std::size_t best = 0;
    for (std::size_t i = 1; i < profile.size(); ++i) {
      if (profile[i] < profile[best]) best = i;
    }
    h_hats[b] = static_cast<double>(m_lo + best) - static_cast<double>(k);
  });

  std::sort(h_hats.begin(), h_hats.end());
  const double a = (1.0 - config.level) / 2.0;
  const double q_lo = quantile_type7_sorted(h_hats, a);
  const double q_hi = quantile_type7_sorted(h_hats, 1.0 - a);
  IntervalResult out;
  out.method = CiMethod::LS2;
  out.level = config.level;
  out.B = B;
  const double nd = static_cast<double>(n);
  out.lo = clamp01(tau - q_hi / nd);
  out.hi = clamp01(tau - q_lo / nd);
  out.diagnostics["q_lo"] = q_lo;
  out.diagnostics["q_hi"] = q_hi;
  out.diagnostics["k_bbm"] = static_cast<double>(k);
  out.diagnostics["lambda2"] = sigma.lambda2;
  return out;
}

IntervalResult construct_interval(CiMethod method, const Panel& data,
                                  const BootstrapConfig& config,
                                  std::optional<double> oracle_a_n) {
  switch (method) {
    case CiMethod::U1: {
      if (!oracle_a_n) {
        throw InvalidInput("the oracle interval needs the true rate a_n");
      }
      const ChangePointFit f = fit(data);
      return ci_plugin(f, config.level, oracle_a_n);
    }
    case CiMethod::U2: {
      const ChangePointFit f = fit(data);
      return ci_plugin(f, config.level);
    }
    case CiMethod::U3:
      return ci_boot_parametric_u3(data, fit(data), config);
    case CiMethod::U4:
      return ci_boot_parametric_u4(data, fit(data), config);
    case CiMethod::U5:
      return ci_boot_nonparametric_u5(data, fit(data), config);
    case CiMethod::LS1:
      return ci_ls1(data, config.level);
    case CiMethod::LS2:
      return ci_ls2(data, config);
  }
  throw InvalidInput("unknown interval method");
}

}  // namespace breakdate
