#include "breakdate/sim.hpp"

#include <chrono>
#include <cmath>

#include "breakdate/errors.hpp"
#include "breakdate/parallel.hpp"
#include "breakdate/rng.hpp"
#include "breakdate/scan.hpp"

namespace breakdate {

namespace {

using Eigen::MatrixXd;

double sq(double x) { return x * x; }

}  // namespace

const char* delta_kind_name(DeltaKind kind) {
  switch (kind) {
    case DeltaKind::Dense: return "dense";
    case DeltaKind::Sparse: return "sparse";
    case DeltaKind::WeakInt: return "weak";
    case DeltaKind::ModerateInt: return "moderate";
    case DeltaKind::StrongInt: return "strong";
  }
  return "unknown";
}

DeltaKind delta_kind_from_name(const std::string& name) {
  if (name == "dense") return DeltaKind::Dense;
  if (name == "sparse") return DeltaKind::Sparse;
  if (name == "weak") return DeltaKind::WeakInt;
  if (name == "moderate") return DeltaKind::ModerateInt;
  if (name == "strong") return DeltaKind::StrongInt;
  throw InvalidInput("unknown delta kind '" + name + "'");
}

std::uint64_t DesignSpec::hash() const {
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a over the cell labels
  auto mix = [&h](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ULL;
  };
  mix(n);
  mix(p);
  mix(static_cast<std::uint64_t>(tau0 * 1e6));
  mix(static_cast<std::uint64_t>(sigma_model));
  mix(static_cast<std::uint64_t>(delta_kind) + 17);
  return h;
}

MatrixXd build_sigma(SigmaModel model, std::size_t p) {
  if (p < 1) throw InvalidInput("build_sigma needs p >= 1");
  const Eigen::Index pi = static_cast<Eigen::Index>(p);
  MatrixXd sigma(pi, pi);
  switch (model) {
    case SigmaModel::Identity:
      sigma.setIdentity();
      break;
    case SigmaModel::Ar1:
      for (Eigen::Index i = 0; i < pi; ++i) {
        for (Eigen::Index j = 0; j < pi; ++j) {
          sigma(i, j) = std::pow(0.8, std::abs(static_cast<double>(i - j)));
        }
      }
      break;
    case SigmaModel::Banded:
      sigma.setZero();
      for (Eigen::Index i = 0; i < pi; ++i) {
        for (Eigen::Index j = 0; j < pi; ++j) {
          const auto d = std::abs(i - j);
          if (d <= 2) sigma(i, j) = std::pow(0.5, static_cast<double>(d));
        }
      }
      break;
    case SigmaModel::CompoundSymmetric:
      sigma.setConstant(0.5);
      sigma.diagonal().setOnes();
      break;
    case SigmaModel::InteractionDiag:
      sigma.setZero();
      for (Eigen::Index i = 0; i < pi; ++i) {
        sigma(i, i) = static_cast<std::size_t>(i) < p / 2 ? 0.1 : 1.0;
      }
      break;
  }
  return sigma;
}

MatrixXd build_sigma(const SigmaSpec& spec, std::size_t p) {
  if (spec.model == SigmaModel::Ar1 && spec.ar_rho != 0.8) {
    const Eigen::Index pi = static_cast<Eigen::Index>(p);
    MatrixXd sigma(pi, pi);
    for (Eigen::Index i = 0; i < pi; ++i) {
      for (Eigen::Index j = 0; j < pi; ++j) {
        sigma(i, j) = std::pow(spec.ar_rho, std::abs(static_cast<double>(i - j)));
      }
    }
    return sigma;
  }
  return build_sigma(spec.model, p);
}

std::vector<double> build_delta_dense(std::size_t p, std::uint64_t seed) {
  RngStream stream(seed);
  std::vector<double> delta(p);
  for (double& v : delta) v = stream.next_double() - 0.5;
  return delta;
}

std::vector<double> build_delta_sparse(std::size_t p, double norm) {
  if (norm < 0.0) throw InvalidInput("sparse delta needs a nonnegative norm");
  std::vector<double> delta(p, 0.0);
  const std::size_t spikes = std::min<std::size_t>(5, p);
  const double v = norm / std::sqrt(static_cast<double>(spikes));
  for (std::size_t j = 0; j < spikes; ++j) delta[j] = v;
  return delta;
}

std::vector<double> build_delta_interaction(DeltaKind kind, std::size_t p) {
  std::vector<double> delta(p, 0.0);
  const std::size_t half = p / 2;
  switch (kind) {
    case DeltaKind::WeakInt: {
      if (half == 0) throw InvalidInput("interaction delta needs p >= 2");
      const double v = 2.0 / std::sqrt(static_cast<double>(half));
      for (std::size_t j = 0; j < half; ++j) delta[j] = v;
      break;
    }
    case DeltaKind::ModerateInt: {
      const double v = 2.0 / std::sqrt(static_cast<double>(p));
      for (std::size_t j = 0; j < p; ++j) delta[j] = v;
      break;
    }
    case DeltaKind::StrongInt: {
      const std::size_t len = p - half;
      const double v = 2.0 / std::sqrt(static_cast<double>(len));
      for (std::size_t j = half; j < p; ++j) delta[j] = v;
      break;
    }
    default:
      throw InvalidInput("not an interaction delta kind");
  }
  return delta;
}

std::vector<double> build_delta(DeltaKind kind, std::size_t n, std::size_t p,
                                std::uint64_t master_seed) {
  switch (kind) {
    case DeltaKind::Dense:
    case DeltaKind::Sparse: {
      RngStream stream = RngStream::derive(master_seed, {kTagDenseDelta, n, p});
      std::vector<double> dense(p);
      for (double& v : dense) v = stream.next_double() - 0.5;
      if (kind == DeltaKind::Dense) return dense;
      double norm_sq = 0.0;
      for (double v : dense) norm_sq += v * v;
      return build_delta_sparse(p, std::sqrt(norm_sq));
    }
    default:
      return build_delta_interaction(kind, p);
  }
}

Panel generate_panel(const Cp1Spec& spec, std::uint64_t seed,
                     double noise_scale) {
  spec.validate();
  const std::size_t n = spec.n;
  const std::size_t p = spec.p;
  std::vector<double> values(n * p, 0.0);
  if (noise_scale != 0.0) {
    const GaussianSampler sampler(build_sigma(spec.sigma, p));
    RngStream stream = RngStream::derive(seed, {kTagPanelNoise});
    sampler.fill(stream, n, values.data());
    if (noise_scale != 1.0) {
      for (double& v : values) v *= noise_scale;
    }
  }
  const std::size_t k0 = spec.k0();
  for (std::size_t t = 0; t < n; ++t) {
    double* row = values.data() + t * p;
    if (!spec.mu1.empty()) {
      for (std::size_t j = 0; j < p; ++j) row[j] += spec.mu1[j];
    }
    if (t >= k0) {
      for (std::size_t j = 0; j < p; ++j) row[j] += spec.delta[j];
    }
  }
  return Panel(n, p, std::move(values));
}

namespace {

Cp1Spec design_to_cp1(const DesignSpec& design, std::uint64_t master_seed,
                      double& delta_norm_sq) {
  Cp1Spec spec;
  spec.n = design.n;
  spec.p = design.p;
  spec.tau0 = design.tau0;
  spec.sigma.model = design.sigma_model;
  spec.delta = build_delta(design.delta_kind, design.n, design.p, master_seed);
  delta_norm_sq = 0.0;
  for (double v : spec.delta) delta_norm_sq += v * v;
  return spec;
}

}  // namespace

McSummary run_point_table(const DesignSpec& design, std::size_t reps,
                          std::uint64_t seed, int threads) {
  const auto start = std::chrono::steady_clock::now();
  McSummary out;
  out.reps = reps;
  Cp1Spec spec = design_to_cp1(design, seed, out.delta_norm_sq);
  const std::uint64_t dhash = design.hash();

  std::vector<double> err_u(reps), err_ls(reps);
  parallel_for(reps, threads, [&](std::size_t r) {
    const Panel panel =
        generate_panel(spec, derive_key(seed, {dhash, kTagRep, r}), 1.0);
    err_u[r] = estimate_ustat(panel).tau_hat - design.tau0;
    err_ls[r] = estimate_ls(panel).tau_hat - design.tau0;
  });

  auto summarize = [reps](const std::vector<double>& err) {
    EstimatorStats stats;
    double mean = 0.0, mean_sq = 0.0;
    for (double e : err) {
      mean += e;
      mean_sq += e * e;
    }
    mean /= static_cast<double>(reps);
    mean_sq /= static_cast<double>(reps);
    stats.bias = mean;
    stats.mse = mean_sq;
    stats.variance = mean_sq - mean * mean;
    return stats;
  };
  out.point["u"] = summarize(err_u);
  out.point["ls"] = summarize(err_ls);
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return out;
}

McSummary run_ci_table(const DesignSpec& design,
                       const std::vector<CiMethod>& methods, std::size_t reps,
                       int B, std::uint64_t seed, int threads,
                       CovMethod cov_method) {
  const auto start = std::chrono::steady_clock::now();
  McSummary out;
  out.reps = reps;
  Cp1Spec spec = design_to_cp1(design, seed, out.delta_norm_sq);
  const std::uint64_t dhash = design.hash();

  // True rate for the oracle interval.
  const MatrixXd sigma = build_sigma(design.sigma_model, design.p);
  const double frob_sq = sigma.squaredNorm();
  const double a_n_true = sq(static_cast<double>(design.n)) *
                          sq(out.delta_norm_sq) / frob_sq;

  struct RepRecord {
    double cover = 0.0;
    double length = 0.0;
    bool failed = false;
  };
  std::vector<std::vector<RepRecord>> records(
      methods.size(), std::vector<RepRecord>(reps));

  parallel_for(reps, threads, [&](std::size_t r) {
    const std::uint64_t rep_seed = derive_key(seed, {dhash, kTagRep, r});
    const Panel panel = generate_panel(spec, rep_seed, 1.0);
    BootstrapConfig config;
    config.B = B;
    config.seed = rep_seed;
    config.cov_method = cov_method;
    config.threads = 1;  // parallelism lives at the replicate level
    for (std::size_t m = 0; m < methods.size(); ++m) {
      RepRecord& rec = records[m][r];
      try {
        const IntervalResult ci = construct_interval(
            methods[m], panel, config,
            methods[m] == CiMethod::U1 ? std::optional<double>(a_n_true)
                                       : std::nullopt);
        rec.cover = ci.covers(design.tau0) ? 1.0 : 0.0;
        rec.length = ci.length();
      } catch (const NumericError&) {
        rec.failed = true;
      }
    }
  });

  for (std::size_t m = 0; m < methods.size(); ++m) {
    MethodStats stats;
    std::size_t ok = 0;
    for (std::size_t r = 0; r < reps; ++r) {
      if (records[m][r].failed) {
        ++stats.failures;
        continue;
      }
      stats.coverage += records[m][r].cover;
      stats.mean_length += records[m][r].length;
      ++ok;
    }
    if (ok > 0) {
      stats.coverage /= static_cast<double>(ok);
      stats.mean_length /= static_cast<double>(ok);
    }
    out.ci[ci_method_name(methods[m])] = stats;
  }
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  return out;
}

}  // namespace breakdate
