#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "breakdate/intervals.hpp"
#include "breakdate/panel.hpp"

namespace breakdate {

enum class DeltaKind { Dense, Sparse, WeakInt, ModerateInt, StrongInt };

const char* delta_kind_name(DeltaKind kind);
DeltaKind delta_kind_from_name(const std::string& name);

// One cell of the simulation grid.
struct DesignSpec {
  std::size_t n = 200;
  std::size_t p = 50;
  double tau0 = 0.5;
  SigmaModel sigma_model = SigmaModel::Identity;
  DeltaKind delta_kind = DeltaKind::Dense;

  std::uint64_t hash() const;
};

// Exact model covariance matrices.
Eigen::MatrixXd build_sigma(SigmaModel model, std::size_t p);
Eigen::MatrixXd build_sigma(const SigmaSpec& spec, std::size_t p);

// Dense: p i.i.d. Unif[-0.5, 0.5] draws. Sparse: 5-spike vector matched to
// the given norm. Interaction kinds: ||delta||^2 = 4 supported on the
// first half / all / second half of the coordinates.
std::vector<double> build_delta_dense(std::size_t p, std::uint64_t seed);
std::vector<double> build_delta_sparse(std::size_t p, double norm);
std::vector<double> build_delta_interaction(DeltaKind kind, std::size_t p);

// Harness entry point: the mean-shift vector for a design. Dense and
// Sparse draw from the sub-stream (master_seed, n, p), fixed across
// Monte-Carlo replicates; the sparse norm matches the dense draw.
std::vector<double> build_delta(DeltaKind kind, std::size_t n, std::size_t p,
                                std::uint64_t master_seed);

// Gaussian CP1 panel: noise N(0, Sigma), shift added after floor(n tau0).
// noise_scale = 0 is the exact-mean test hook.
Panel generate_panel(const Cp1Spec& spec, std::uint64_t seed,
                     double noise_scale = 1.0);

struct EstimatorStats {
  double bias = 0.0;
  double variance = 0.0;
  double mse = 0.0;  // bias^2 + variance, population variance
};

struct MethodStats {
  double coverage = 0.0;
  double mean_length = 0.0;
  std::size_t failures = 0;
};

struct McSummary {
  std::size_t reps = 0;
  double wall_seconds = 0.0;
  double delta_norm_sq = 0.0;  // realized ||delta||^2 of the fixed draw
  std::map<std::string, EstimatorStats> point;  // keys "u", "ls"
  std::map<std::string, MethodStats> ci;        // keys "u1".."ls2"
};

// Monte-Carlo bias/variance/MSE of tau_hat_U and tau_hat_LS. Replicate r
// draws panel noise from stream (seed, design-hash, r); results identical
// for any thread count.
McSummary run_point_table(const DesignSpec& design, std::size_t reps,
                          std::uint64_t seed, int threads);

// Monte-Carlo coverage and mean length per interval method. Per-replicate
// failures (degenerate panels) are counted, not fatal.
McSummary run_ci_table(const DesignSpec& design,
                       const std::vector<CiMethod>& methods, std::size_t reps,
                       int B, std::uint64_t seed, int threads,
                       CovMethod cov_method = CovMethod::RothmanPD);

struct TableOptions {
  std::string scale = "desk";  // desk | full
  std::size_t reps = 0;        // 0 -> scale default
  int B = 200;
  std::uint64_t seed = 20240817;
  int threads = 1;
  std::vector<CiMethod> methods;  // empty -> all seven
};

// Writes table_<id>.csv plus run_manifest.json into out_dir. Ids: 1-2 are
// the point-estimate tables (tau0 = 0.2, 0.5), 3-6 the interval tables
// (ID, AR, BD, CS) and "int" the interaction stress table.
void reproduce_table(const std::string& table_id, const TableOptions& options,
                     const std::string& out_dir);

}  // namespace breakdate
