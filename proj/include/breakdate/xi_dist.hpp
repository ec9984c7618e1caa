#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace breakdate {

// Limiting law xi(tau0) of the normalized break estimator: the argmin of
// sqrt(2)|g| + (2 sqrt(2)/sqrt(tau0(1-tau0))) W*(g) with W* a two-sided
// Brownian motion. Density in closed form; CDF and quantiles by numeric
// inversion. tau0(1-tau0) * xi(tau0) has a tau0-free law, so one cached
// standardized CDF grid serves every tau0.
class XiDistribution {
 public:
  explicit XiDistribution(double tau0);

  double tau0() const { return tau0_; }

  double density(double t) const;
  double cdf(double t) const;
  // Inverts the cached CDF; |cdf(quantile(a)) - a| <= 1e-6.
  double quantile(double alpha) const;

 private:
  double tau0_;
  double u_;  // tau0 (1 - tau0)
};

double xi_density(double t, double tau0);
double xi_quantile(double alpha, double tau0);

struct XiMcOptions {
  // <= 0 picks the defaults 40/(tau0(1-tau0)) and
  // 0.01 * min(1, 1/(tau0(1-tau0))).
  double gamma_max = 0.0;
  double grid_step = 0.0;
  double noise_scale = 1.0;  // 0 disables the Brownian part (drift only)
  int threads = 1;
};

// Path-simulation sampler: W* approximated by scaled cumulative sums of
// i.i.d. standard normals on a grid, one argmin per replicate.
// Deterministic given the seed; replicate r draws from stream (seed, r).
std::vector<double> xi_sample_mc(double tau0, std::size_t reps,
                                 std::uint64_t seed,
                                 const XiMcOptions& options = {});

enum class QuantileMethod { DensityInversion, MonteCarlo };

struct QuantileTable {
  std::vector<double> taus;
  std::vector<double> alphas;
  std::vector<double> values;  // row-major taus x alphas
  QuantileMethod method = QuantileMethod::DensityInversion;
  std::size_t reps = 0;       // MC only
  double grid_step = 0.0;     // MC only

  double at(std::size_t tau_index, std::size_t alpha_index) const {
    return values[tau_index * alphas.size() + alpha_index];
  }
};

QuantileTable build_quantile_table(const std::vector<double>& alphas,
                                   const std::vector<double>& taus,
                                   QuantileMethod method,
                                   std::size_t mc_reps = 100000,
                                   std::uint64_t seed = 0, int threads = 1);

// Header tau,alpha,quantile,method,reps.
void write_quantile_table_csv(const std::string& path, const QuantileTable& table);

}  // namespace breakdate
