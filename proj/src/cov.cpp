#include "breakdate/cov.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <string>

#include "breakdate/errors.hpp"

namespace breakdate {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

using RowMajorMap = Eigen::Map<
    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>;

RowMajorMap map_panel(const Panel& data) {
  return RowMajorMap(data.values().data(), static_cast<Eigen::Index>(data.n()),
                     static_cast<Eigen::Index>(data.p()));
}

// log det via Cholesky; returns false when the matrix is not PD.
bool cholesky_logdet(const MatrixXd& m, double& logdet) {
  Eigen::LLT<MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) return false;
  logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return true;
}

void soft_threshold_offdiag(MatrixXd& m, double amount) {
  if (amount <= 0.0) return;
  const Eigen::Index p = m.rows();
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      if (i == j) continue;
      const double v = m(i, j);
      m(i, j) = v > amount ? v - amount : (v < -amount ? v + amount : 0.0);
    }
  }
}

void floor_eigenvalues(MatrixXd& m, double floor) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(m);
  VectorXd vals = eig.eigenvalues().cwiseMax(floor);
  m = eig.eigenvectors() * vals.asDiagonal() * eig.eigenvectors().transpose();
  m = ((m + m.transpose()) * 0.5).eval();
}

double offdiag_l1(const MatrixXd& m) {
  return m.cwiseAbs().sum() - m.diagonal().cwiseAbs().sum();
}

struct SegmentBlock {
  std::size_t pre_begin, pre_end;    // rows [pre_begin, pre_end) of segment 1
  std::size_t post_begin, post_end;  // rows of segment 2 (absolute indices)
};

// Pooled covariance over an arbitrary row subset split at k; each part
// demeaned by its own mean. Divisor: total rows - 2.
MatrixXd pooled_cov_subset(const Panel& data, const std::vector<int>& rows,
                           std::size_t k) {
  const auto x = map_panel(data);
  const Eigen::Index p = x.cols();
  Eigen::RowVectorXd mean_pre = Eigen::RowVectorXd::Zero(p);
  Eigen::RowVectorXd mean_post = Eigen::RowVectorXd::Zero(p);
  std::size_t n_pre = 0, n_post = 0;
  for (int r : rows) {
    if (static_cast<std::size_t>(r) < k) {
      mean_pre += x.row(r);
      ++n_pre;
    } else {
      mean_post += x.row(r);
      ++n_post;
    }
  }
  if (n_pre + n_post < 3) {
    throw InvalidInput("covariance subset needs at least 3 rows");
  }
  if (n_pre) mean_pre /= static_cast<double>(n_pre);
  if (n_post) mean_post /= static_cast<double>(n_post);
  MatrixXd s = MatrixXd::Zero(p, p);
  for (int r : rows) {
    const bool pre = static_cast<std::size_t>(r) < k;
    const Eigen::RowVectorXd d = x.row(r) - (pre ? mean_pre : mean_post);
    s.noalias() += d.transpose() * d;
  }
  return s / static_cast<double>(n_pre + n_post - 2);
}

MatrixXd correlation_from_cov(const MatrixXd& s) {
  const Eigen::Index p = s.rows();
  const double max_diag = s.diagonal().maxCoeff();
  if (!(max_diag > 0.0)) {
    throw DiagonalDegenerateError("pooled covariance has no positive variance");
  }
  VectorXd d = s.diagonal();
  for (Eigen::Index j = 0; j < p; ++j) {
    if (d[j] <= 1e-12 * max_diag) {
      throw DiagonalDegenerateError("column " + std::to_string(j) +
                                    " has (near) zero pooled variance");
    }
  }
  const VectorXd inv_sd = d.cwiseSqrt().cwiseInverse();
  MatrixXd r = inv_sd.asDiagonal() * s * inv_sd.asDiagonal();
  r.diagonal().setOnes();
  r = ((r + r.transpose()) * 0.5).eval();
  return r;
}

}  // namespace

const char* cov_method_name(CovMethod method) {
  switch (method) {
    case CovMethod::SamplePooled: return "pooled";
    case CovMethod::RothmanPD: return "rothman";
    case CovMethod::DiagonalOnly: return "diag";
    case CovMethod::ShrinkageToDiagonal: return "shrink";
  }
  return "unknown";
}

CovMethod cov_method_from_name(const std::string& name) {
  if (name == "pooled") return CovMethod::SamplePooled;
  if (name == "rothman") return CovMethod::RothmanPD;
  if (name == "diag") return CovMethod::DiagonalOnly;
  if (name == "shrink") return CovMethod::ShrinkageToDiagonal;
  throw InvalidInput("unknown covariance method '" + name + "'");
}

Eigen::MatrixXd pooled_sample_cov(const Panel& data, std::size_t k) {
  const std::size_t n = data.n();
  if (k < 2 || k + 2 > n) {
    throw InvalidInput("pooled_sample_cov needs 2 <= k <= n-2");
  }
  std::vector<int> rows(n);
  for (std::size_t i = 0; i < n; ++i) rows[i] = static_cast<int>(i);
  return pooled_cov_subset(data, rows, k);
}

double rothman_objective(const MatrixXd& theta, const MatrixXd& R,
                         double lambda1, double lambda2) {
  double logdet;
  if (!cholesky_logdet(theta, logdet)) {
    return std::numeric_limits<double>::infinity();
  }
  return 0.5 * (theta - R).squaredNorm() - lambda1 * logdet +
         lambda2 * offdiag_l1(theta);
}

RothmanResult rothman_pd(const MatrixXd& R, const RothmanOptions& options) {
  const Eigen::Index p = R.rows();
  if (R.cols() != p) throw InvalidInput("rothman_pd needs a square matrix");
  if (!R.isApprox(R.transpose(), 1e-10)) {
    throw InvalidInput("rothman_pd needs a symmetric matrix");
  }
  if (!(options.lambda1 > 0.0)) {
    throw InvalidInput("rothman_pd needs lambda1 > 0");
  }
  const double l1 = options.lambda1;
  const double l2 = options.lambda2;

  RothmanResult result;
  MatrixXd theta = MatrixXd::Identity(p, p);
  double logdet = 0.0;
  MatrixXd theta_inv = MatrixXd::Identity(p, p);
  auto smooth = [&](double ld, const MatrixXd& t) {
    return 0.5 * (t - R).squaredNorm() - l1 * ld;
  };
  double f_smooth = smooth(logdet, theta);
  result.objective_trace.push_back(f_smooth + l2 * offdiag_l1(theta));

  double step = 1.0;
  for (int iter = 0; iter < options.max_iter; ++iter) {
    const MatrixXd grad = (theta - R) - l1 * theta_inv;
    bool accepted = false;
    MatrixXd cand;
    double cand_logdet = 0.0;
    double cand_smooth = 0.0;
    for (int bt = 0; bt < 60 && !accepted; ++bt) {
      cand = theta - step * grad;
      soft_threshold_offdiag(cand, step * l2);
      cand = ((cand + cand.transpose()) * 0.5).eval();
      if (!cholesky_logdet(cand, cand_logdet)) {
        floor_eigenvalues(cand, options.eig_floor);
        if (!cholesky_logdet(cand, cand_logdet)) {
          step *= 0.5;
          continue;
        }
      }
      cand_smooth = smooth(cand_logdet, cand);
      const MatrixXd diff = cand - theta;
      const double quad = f_smooth + grad.cwiseProduct(diff).sum() +
                          diff.squaredNorm() / (2.0 * step);
      if (cand_smooth <= quad + 1e-12 * std::abs(quad)) {
        accepted = true;
      } else {
        step *= 0.5;
      }
    }
    if (!accepted) break;  // line search stalled at numerical precision

    const double grad_map =
        (theta - cand).norm() / step;
    theta = cand;
    f_smooth = cand_smooth;
    Eigen::LLT<MatrixXd> llt(theta);
    theta_inv = llt.solve(MatrixXd::Identity(p, p));
    result.objective_trace.push_back(f_smooth + l2 * offdiag_l1(theta));
    result.iterations = iter + 1;
    result.grad_map_norm = grad_map;

    const std::size_t m = result.objective_trace.size();
    const double prev = result.objective_trace[m - 2];
    const double cur = result.objective_trace[m - 1];
    const double rel_dec = (prev - cur) / std::max(1.0, std::abs(prev));
    if (grad_map <= options.grad_tol ||
        (options.obj_tol > 0.0 && rel_dec < options.obj_tol)) {
      result.converged = true;
      break;
    }
    step = std::min(step * 2.0, 1.0);  // mild step recovery
  }
  result.theta = theta;
  return result;
}

CovEstimate estimate_sigma_pd(const Panel& data, std::size_t k,
                              const SigmaPdOptions& options) {
  const std::size_t n = data.n();
  if (k < 2 || k + 2 > n) {
    throw InvalidInput("estimate_sigma_pd needs 2 <= k <= n-2");
  }
  const MatrixXd s = pooled_sample_cov(data, k);
  const MatrixXd r = correlation_from_cov(s);

  const int folds = options.cv_folds;
  const std::size_t pre_len = k;
  const std::size_t post_len = n - k;
  const bool cv_feasible =
      folds >= 2 && options.lambda2_grid.size() > 1 &&
      pre_len >= 2 * static_cast<std::size_t>(folds) &&
      post_len >= 2 * static_cast<std::size_t>(folds);

  double best_lambda2 =
      options.lambda2_grid.empty() ? 0.0 : options.lambda2_grid.front();
  bool cv_used = false;
  if (cv_feasible) {
    std::vector<double> losses(options.lambda2_grid.size(), 0.0);
    bool cv_ok = true;
    for (int f = 0; f < folds && cv_ok; ++f) {
      std::vector<int> train_rows, test_rows;
      auto assign = [&](std::size_t begin, std::size_t len) {
        const std::size_t lo = begin + f * len / folds;
        const std::size_t hi = begin + (f + 1) * len / folds;
        for (std::size_t i = begin; i < begin + len; ++i) {
          (i >= lo && i < hi ? test_rows : train_rows).push_back(
              static_cast<int>(i));
        }
      };
      assign(0, pre_len);
      assign(k, post_len);
      MatrixXd r_train, r_test;
      try {
        r_train = correlation_from_cov(pooled_cov_subset(data, train_rows, k));
        r_test = correlation_from_cov(pooled_cov_subset(data, test_rows, k));
      } catch (const DiagonalDegenerateError&) {
        cv_ok = false;  // fall back to the first grid point
        break;
      }
      RothmanOptions solver = options.solver;
      solver.lambda1 = options.lambda1;
      for (std::size_t g = 0; g < options.lambda2_grid.size(); ++g) {
        solver.lambda2 = options.lambda2_grid[g];
        const RothmanResult cv_fit = rothman_pd(r_train, solver);
        losses[g] += (cv_fit.theta - r_test).squaredNorm();
      }
    }
    if (cv_ok) {
      std::size_t best = 0;
      for (std::size_t g = 1; g < losses.size(); ++g) {
        if (losses[g] < losses[best]) best = g;  // ties keep the smaller lambda2
      }
      best_lambda2 = options.lambda2_grid[best];
      cv_used = true;
    }
  }

  RothmanOptions solver = options.solver;
  solver.lambda1 = options.lambda1;
  solver.lambda2 = best_lambda2;
  const RothmanResult sol = rothman_pd(r, solver);

  const VectorXd sd = s.diagonal().cwiseSqrt();
  CovEstimate out;
  out.sigma = sd.asDiagonal() * sol.theta * sd.asDiagonal();
  out.sigma = ((out.sigma + out.sigma.transpose()) * 0.5).eval();
  out.method = CovMethod::RothmanPD;
  out.lambda1 = options.lambda1;
  out.lambda2 = best_lambda2;
  out.cv_used = cv_used;
  out.solver_converged = sol.converged;
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(out.sigma,
                                              Eigen::EigenvaluesOnly);
  out.min_eigenvalue = eig.eigenvalues().minCoeff();
  return out;
}

CovEstimate estimate_cov(const Panel& data, std::size_t k, CovMethod method,
                         const SigmaPdOptions& options) {
  if (method == CovMethod::RothmanPD) {
    return estimate_sigma_pd(data, k, options);
  }
  const MatrixXd s = pooled_sample_cov(data, k);
  CovEstimate out;
  out.method = method;
  switch (method) {
    case CovMethod::SamplePooled:
      out.sigma = s;
      break;
    case CovMethod::DiagonalOnly:
      out.sigma = s.diagonal().asDiagonal();
      break;
    case CovMethod::ShrinkageToDiagonal: {
      const double w = 0.2;
      out.sigma = (1.0 - w) * s;
      out.sigma.diagonal() = s.diagonal();
      break;
    }
    case CovMethod::RothmanPD:
      break;  // handled above
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(out.sigma,
                                              Eigen::EigenvaluesOnly);
  out.min_eigenvalue = eig.eigenvalues().minCoeff();
  return out;
}

GaussianSampler::GaussianSampler(const MatrixXd& sigma, double eig_floor) {
  if (sigma.rows() != sigma.cols()) {
    throw InvalidInput("covariance must be square");
  }
  Eigen::LLT<MatrixXd> llt(sigma);
  if (llt.info() == Eigen::Success) {
    factor_ = llt.matrixL();
    return;
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(sigma);
  if (eig.info() != Eigen::Success) {
    throw NotPsdError("covariance eigendecomposition failed");
  }
  const VectorXd vals = eig.eigenvalues().cwiseMax(eig_floor);
  factor_ = eig.eigenvectors() * vals.cwiseSqrt().asDiagonal();
}

void GaussianSampler::fill(RngStream& stream, std::size_t n, double* out) const {
  const Eigen::Index p = factor_.rows();
  VectorXd z(p);
  for (std::size_t t = 0; t < n; ++t) {
    for (Eigen::Index j = 0; j < p; ++j) z[j] = stream.next_gauss();
    Eigen::Map<VectorXd> row(out + t * p, p);
    row.noalias() = factor_ * z;
  }
}

Panel sample_gaussian(const MatrixXd& sigma, std::size_t n, std::uint64_t seed) {
  const GaussianSampler sampler(sigma);
  std::vector<double> values(n * sampler.p());
  RngStream stream = RngStream::derive(seed, {kTagGaussian});
  sampler.fill(stream, n, values.data());
  return Panel(n, sampler.p(), std::move(values));
}

}  // namespace breakdate
