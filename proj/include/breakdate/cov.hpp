#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "breakdate/panel.hpp"
#include "breakdate/rng.hpp"

namespace breakdate {

enum class CovMethod { SamplePooled, RothmanPD, DiagonalOnly, ShrinkageToDiagonal };

const char* cov_method_name(CovMethod method);
CovMethod cov_method_from_name(const std::string& name);

struct CovEstimate {
  Eigen::MatrixXd sigma;
  CovMethod method = CovMethod::SamplePooled;
  double min_eigenvalue = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  bool cv_used = false;
  bool solver_converged = true;
};

// Sample covariance pooled over the two segments at split k, each segment
// demeaned by its own mean, divisor n-2.
Eigen::MatrixXd pooled_sample_cov(const Panel& data, std::size_t k);

struct RothmanOptions {
  double lambda1 = 1e-4;
  double lambda2 = 0.0;
  double grad_tol = 1e-7;  // stop when the gradient-map norm falls below
  double obj_tol = 0.0;    // optional second stop: relative objective decrease
  int max_iter = 5000;
  double eig_floor = 1e-8;
};

struct RothmanResult {
  Eigen::MatrixXd theta;
  bool converged = false;
  int iterations = 0;
  double grad_map_norm = 0.0;
  std::vector<double> objective_trace;  // one entry per accepted iterate
};

// Positive-definite correlation estimator: minimizes
//   ||Theta - R||_F^2 / 2 - lambda1 log det(Theta) + lambda2 |offdiag(Theta)|_1
// over Theta > 0 by proximal gradient with backtracking line search;
// off-diagonals soft-thresholded, diagonal untouched. Iterates leaving the
// cone are projected back by flooring eigenvalues at eig_floor.
RothmanResult rothman_pd(const Eigen::MatrixXd& R, const RothmanOptions& options);

double rothman_objective(const Eigen::MatrixXd& theta, const Eigen::MatrixXd& R,
                         double lambda1, double lambda2);

struct SigmaPdOptions {
  std::vector<double> lambda2_grid{0.0, 0.01, 0.05, 0.1, 0.2, 0.4};
  int cv_folds = 3;
  double lambda1 = 1e-4;
  RothmanOptions solver;
};

// Full covariance path: pooled S at split k, correlation R, lambda2 by
// K-fold cross-validated Frobenius loss over contiguous-in-time blocks
// within each segment (ties to the smallest lambda2), then
// Sigma = (S+)^{1/2} Theta (S+)^{1/2}.
CovEstimate estimate_sigma_pd(const Panel& data, std::size_t k,
                              const SigmaPdOptions& options = {});

// Dispatcher across the implemented covariance methods.
CovEstimate estimate_cov(const Panel& data, std::size_t k, CovMethod method,
                         const SigmaPdOptions& options = {});

// Cholesky-based N(0, sigma) row sampler. Falls back to an eigenvalue
// floor when sigma is only positive semi-definite.
class GaussianSampler {
 public:
  explicit GaussianSampler(const Eigen::MatrixXd& sigma, double eig_floor = 1e-8);

  std::size_t p() const { return static_cast<std::size_t>(factor_.rows()); }

  // Writes n i.i.d. rows into out (row-major n x p).
  void fill(RngStream& stream, std::size_t n, double* out) const;

 private:
  Eigen::MatrixXd factor_;  // lower-triangular or eigen-based factor
};

// Deterministic given the seed: rows i.i.d. N(0, sigma).
Panel sample_gaussian(const Eigen::MatrixXd& sigma, std::size_t n,
                      std::uint64_t seed);

}  // namespace breakdate
