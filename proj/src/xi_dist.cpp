#include "breakdate/xi_dist.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "breakdate/errors.hpp"
#include "breakdate/parallel.hpp"
#include "breakdate/quantile.hpp"
#include "breakdate/rng.hpp"

namespace breakdate {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kInvSqrtPi = 0.56418958354775628695;

double erfcx(double z) {
  if (z < 25.0) return std::exp(z * z) * std::erfc(z);
  // Asymptotic expansion; relative error < 1e-12 for z >= 25.
  const double iz2 = 1.0 / (z * z);
  return kInvSqrtPi / z *
         (1.0 + iz2 * (-0.5 + iz2 * (0.75 + iz2 * -1.875)));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / kSqrt2); }

// Density of zeta = tau0(1-tau0) xi(tau0) at s, written in x = sqrt(|s|):
//   h = 1.5 e^{x^2} Phi(-1.5 x) - 0.5 Phi(-0.5 x),
// with the exponentially growing product evaluated through erfcx.
double std_density_x(double x) {
  const double t1 = 0.75 * std::exp(-0.125 * x * x) * erfcx(1.5 * x / kSqrt2);
  const double t2 = 0.5 * normal_cdf(-0.5 * x);
  return t1 - t2;
}

double std_density(double s) { return std_density_x(std::sqrt(std::abs(s))); }

// Integrand of the CDF after substituting s = x^2, which removes the
// sqrt singularity of dh/ds at the origin: g(x) = 2 x h(x^2).
double std_cdf_integrand(double x) { return 2.0 * x * std_density_x(x); }

// Cached standardized CDF on a uniform x grid. x_max^2 = 462.25 leaves
// tail mass below 1e-24, far past the 1e-6 quantiles.
struct StdXiTable {
  static constexpr double kStepX = 0.005;
  static constexpr std::size_t kKnots = 4301;  // x in [0, 21.5]
  std::vector<double> cdf;                     // F(x_i^2), size kKnots

  StdXiTable() : cdf(kKnots) {
    cdf[0] = 0.5;
    for (std::size_t i = 1; i < kKnots; ++i) {
      const double a = (i - 1) * kStepX;
      const double b = i * kStepX;
      const double mid = 0.5 * (a + b);
      cdf[i] = cdf[i - 1] + (b - a) / 6.0 *
                                (std_cdf_integrand(a) + 4.0 * std_cdf_integrand(mid) +
                                 std_cdf_integrand(b));
    }
  }

  double x_max() const { return (kKnots - 1) * kStepX; }

  // F(s) for s >= 0; one Simpson panel from the bracketing knot.
  double cdf_at(double s) const {
    const double x = std::sqrt(s);
    if (x >= x_max()) return cdf.back();
    const std::size_t i = static_cast<std::size_t>(x / kStepX);
    const double a = i * kStepX;
    const double mid = 0.5 * (a + x);
    return cdf[i] + (x - a) / 6.0 *
                        (std_cdf_integrand(a) + 4.0 * std_cdf_integrand(mid) +
                         std_cdf_integrand(x));
  }

  // Smallest s >= 0 with F(s) = q, for q in [0.5, 1).
  double upper_quantile(double q) const {
    auto it = std::lower_bound(cdf.begin(), cdf.end(), q);
    if (it == cdf.end()) return x_max() * x_max();
    if (it == cdf.begin()) return 0.0;
    double hi_x = (it - cdf.begin()) * kStepX;
    double lo_x = hi_x - kStepX;
    for (int iter = 0; iter < 80; ++iter) {
      const double mid = 0.5 * (lo_x + hi_x);
      if (cdf_at(mid * mid) < q) {
        lo_x = mid;
      } else {
        hi_x = mid;
      }
      if (hi_x - lo_x < 1e-13 * (1.0 + hi_x)) break;
    }
    const double x = 0.5 * (lo_x + hi_x);
    return x * x;
  }
};

const StdXiTable& std_table() {
  static const StdXiTable table;
  return table;
}

double check_tau0(double tau0) {
  if (!(tau0 > 0.0 && tau0 < 1.0)) {
    throw InvalidInput("tau0 must lie in (0,1)");
  }
  return tau0 * (1.0 - tau0);
}

}  // namespace

XiDistribution::XiDistribution(double tau0)
    : tau0_(tau0), u_(check_tau0(tau0)) {
  std_table();  // build the shared grid eagerly
}

double XiDistribution::density(double t) const {
  return u_ * std_density(u_ * t);
}

double XiDistribution::cdf(double t) const {
  const double s = u_ * t;
  if (s >= 0.0) return std_table().cdf_at(s);
  return 1.0 - std_table().cdf_at(-s);
}

double XiDistribution::quantile(double alpha) const {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw InvalidInput("quantile level must lie in (0,1)");
  }
  if (alpha >= 0.5) return std_table().upper_quantile(alpha) / u_;
  return -std_table().upper_quantile(1.0 - alpha) / u_;
}

double xi_density(double t, double tau0) {
  return XiDistribution(tau0).density(t);
}

double xi_quantile(double alpha, double tau0) {
  return XiDistribution(tau0).quantile(alpha);
}

std::vector<double> xi_sample_mc(double tau0, std::size_t reps,
                                 std::uint64_t seed,
                                 const XiMcOptions& options) {
  const double u = check_tau0(tau0);
  const double gamma_max =
      options.gamma_max > 0.0 ? options.gamma_max : 40.0 / u;
  const double step = options.grid_step > 0.0
                          ? options.grid_step
                          : 0.01 * std::min(1.0, 1.0 / u);
  if (!(gamma_max > 0.0) || !(step > 0.0)) {
    throw InvalidInput("xi_sample_mc grid parameters must be positive");
  }
  const std::size_t n_grid =
      static_cast<std::size_t>(std::ceil(gamma_max / step));
  const double bm_scale = options.noise_scale * 2.0 * kSqrt2 / std::sqrt(u);
  const double inc_sd = std::sqrt(step);

  std::vector<double> samples(reps);
  parallel_for(reps, options.threads, [&](std::size_t r) {
    RngStream stream = RngStream::derive(seed, {kTagXiPath, r});
    double best_val = 0.0;  // L(0) = 0
    double best_gamma = 0.0;
    for (int side = 0; side < 2; ++side) {
      const double sign = side == 0 ? 1.0 : -1.0;
      double w = 0.0;
      for (std::size_t j = 1; j <= n_grid; ++j) {
        w += inc_sd * stream.next_gauss();
        const double gamma = sign * static_cast<double>(j) * step;
        const double val = kSqrt2 * std::abs(gamma) + bm_scale * w;
        if (val < best_val) {
          best_val = val;
          best_gamma = gamma;
        }
      }
    }
    samples[r] = best_gamma;
  });
  return samples;
}

QuantileTable build_quantile_table(const std::vector<double>& alphas,
                                   const std::vector<double>& taus,
                                   QuantileMethod method, std::size_t mc_reps,
                                   std::uint64_t seed, int threads) {
  QuantileTable table;
  table.taus = taus;
  table.alphas = alphas;
  table.method = method;
  table.values.resize(taus.size() * alphas.size());
  if (method == QuantileMethod::DensityInversion) {
    for (std::size_t i = 0; i < taus.size(); ++i) {
      const XiDistribution dist(taus[i]);
      for (std::size_t j = 0; j < alphas.size(); ++j) {
        table.values[i * alphas.size() + j] = dist.quantile(alphas[j]);
      }
    }
  } else {
    table.reps = mc_reps;
    for (std::size_t i = 0; i < taus.size(); ++i) {
      XiMcOptions options;
      options.threads = threads;
      std::vector<double> samples =
          xi_sample_mc(taus[i], mc_reps, seed + i, options);
      std::sort(samples.begin(), samples.end());
      for (std::size_t j = 0; j < alphas.size(); ++j) {
        table.values[i * alphas.size() + j] =
            quantile_type7_sorted(samples, alphas[j]);
      }
    }
  }
  return table;
}

void write_quantile_table_csv(const std::string& path,
                              const QuantileTable& table) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write '" + path + "'");
  out << "tau,alpha,quantile,method,reps\n";
  const char* method_name =
      table.method == QuantileMethod::DensityInversion ? "density" : "mc";
  char buf[40];
  for (std::size_t i = 0; i < table.taus.size(); ++i) {
    for (std::size_t j = 0; j < table.alphas.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.10g", table.at(i, j));
      out << table.taus[i] << ',' << table.alphas[j] << ',' << buf << ','
          << method_name << ',' << table.reps << '\n';
    }
  }
}

}  // namespace breakdate
