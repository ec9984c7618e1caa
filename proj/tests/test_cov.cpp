#include <doctest.h>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>

#include "breakdate/cov.hpp"
#include "breakdate/errors.hpp"
#include "breakdate/rng.hpp"

using namespace breakdate;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

Panel gaussian_panel(std::size_t n, std::size_t p, std::uint64_t seed) {
  RngStream stream(seed);
  std::vector<double> values(n * p);
  for (double& v : values) v = stream.next_gauss();
  return Panel(n, p, std::move(values));
}

MatrixXd random_correlation(std::size_t p, std::uint64_t seed) {
  RngStream stream(seed);
  MatrixXd g(2 * p, p);
  for (Eigen::Index i = 0; i < g.rows(); ++i) {
    for (Eigen::Index j = 0; j < g.cols(); ++j) g(i, j) = stream.next_gauss();
  }
  MatrixXd s = g.transpose() * g / static_cast<double>(2 * p);
  const VectorXd inv_sd = s.diagonal().cwiseSqrt().cwiseInverse();
  MatrixXd r = inv_sd.asDiagonal() * s * inv_sd.asDiagonal();
  r.diagonal().setOnes();
  return ((r + r.transpose()) * 0.5).eval();
}

bool is_pd(const MatrixXd& m) {
  return Eigen::LLT<MatrixXd>(m).info() == Eigen::Success;
}

}  // namespace

TEST_CASE("pooled covariance of segment-constant panels is zero") {
  std::vector<double> values;
  for (int t = 0; t < 4; ++t) values.insert(values.end(), {1.0, 2.0});
  for (int t = 0; t < 4; ++t) values.insert(values.end(), {5.0, -1.0});
  const MatrixXd s = pooled_sample_cov(Panel(8, 2, values), 4);
  CHECK(s.norm() == 0.0);
}

TEST_CASE("pooled covariance matches the scalar two-segment formula") {
  const std::size_t n = 20, k = 8;
  const Panel data = gaussian_panel(n, 1, 4);
  double mean_pre = 0.0, mean_post = 0.0;
  for (std::size_t t = 0; t < k; ++t) mean_pre += data(t, 0);
  for (std::size_t t = k; t < n; ++t) mean_post += data(t, 0);
  mean_pre /= k;
  mean_post /= (n - k);
  double ss = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double d = data(t, 0) - (t < k ? mean_pre : mean_post);
    ss += d * d;
  }
  const MatrixXd s = pooled_sample_cov(data, k);
  CHECK(s(0, 0) == doctest::Approx(ss / (n - 2)).epsilon(1e-12));
}

TEST_CASE("pooled covariance is shift invariant") {
  RngStream stream(11);
  const std::size_t n = 10, p = 2;
  std::vector<double> values(n * p);
  for (double& v : values) {
    v = static_cast<double>(static_cast<int>(stream.next_below(8)));
  }
  std::vector<double> moved(values);
  for (std::size_t t = 0; t < n; ++t) {
    moved[t * p] += 5.0;
    moved[t * p + 1] -= 2.0;
  }
  const MatrixXd a = pooled_sample_cov(Panel(n, p, values), 4);
  const MatrixXd b = pooled_sample_cov(Panel(n, p, moved), 4);
  CHECK((a - b).norm() == 0.0);
}

TEST_CASE("rothman solver solves the identity-target case in closed form") {
  for (double lambda1 : {1e-4, 0.1, 1.0}) {
    RothmanOptions options;
    options.lambda1 = lambda1;
    options.lambda2 = 0.0;
    const RothmanResult result = rothman_pd(MatrixXd::Identity(6, 6), options);
    const double theta_star = (1.0 + std::sqrt(1.0 + 4.0 * lambda1)) / 2.0;
    REQUIRE(result.converged);
    for (int i = 0; i < 6; ++i) {
      CHECK(result.theta(i, i) == doctest::Approx(theta_star).epsilon(1e-8));
      for (int j = 0; j < 6; ++j) {
        if (i != j) CHECK(std::abs(result.theta(i, j)) < 1e-10);
      }
    }
  }
}

TEST_CASE("vanishing penalty recovers a PD target") {
  const MatrixXd r = random_correlation(8, 21);
  REQUIRE(is_pd(r));
  RothmanOptions options;
  options.lambda1 = 1e-8;
  options.lambda2 = 0.0;
  options.grad_tol = 1e-9;
  const RothmanResult result = rothman_pd(r, options);
  CHECK((result.theta - r).norm() < 1e-4);
}

TEST_CASE("rothman iterates descend and satisfy first-order optimality") {
  for (std::uint64_t seed : {31u, 32u, 33u}) {
    const MatrixXd r = random_correlation(10, seed);
    RothmanOptions options;
    options.lambda1 = 1e-4;
    options.lambda2 = 0.1;
    const RothmanResult result = rothman_pd(r, options);
    REQUIRE(result.converged);
    CHECK(result.grad_map_norm <= options.grad_tol);
    for (std::size_t i = 1; i < result.objective_trace.size(); ++i) {
      CHECK(result.objective_trace[i] <=
            result.objective_trace[i - 1] + 1e-10);
    }
    // no better than the returned point: two feasible references
    const double f_hat = rothman_objective(result.theta, r, options.lambda1,
                                           options.lambda2);
    CHECK(f_hat <= rothman_objective(MatrixXd::Identity(10, 10), r,
                                     options.lambda1, options.lambda2) + 1e-12);
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(r);
    const MatrixXd floored = eig.eigenvectors() *
                             eig.eigenvalues().cwiseMax(0.05).asDiagonal() *
                             eig.eigenvectors().transpose();
    CHECK(f_hat <= rothman_objective(floored, r, options.lambda1,
                                     options.lambda2) + 1e-12);
    // exact symmetry of the iterate
    CHECK((result.theta - result.theta.transpose()).norm() == 0.0);
  }
}

TEST_CASE("rothman input validation") {
  MatrixXd bad = MatrixXd::Identity(4, 4);
  bad(0, 1) = 0.5;  // asymmetric
  CHECK_THROWS_AS(rothman_pd(bad, {}), InvalidInput);
  RothmanOptions no_logdet;
  no_logdet.lambda1 = 0.0;
  CHECK_THROWS_AS(rothman_pd(MatrixXd::Identity(4, 4), no_logdet), InvalidInput);
}

TEST_CASE("estimate_sigma_pd stays near the identity truth") {
  // n = 400 rows of N(0, I_20) split at k = 200
  const Panel data = gaussian_panel(400, 20, 77);
  const CovEstimate est = estimate_sigma_pd(data, 200);
  REQUIRE(est.method == CovMethod::RothmanPD);
  CHECK(est.cv_used);
  CHECK(is_pd(est.sigma));
  double max_off = 0.0;
  for (int i = 0; i < 20; ++i) {
    for (int j = 0; j < 20; ++j) {
      if (i != j) max_off = std::max(max_off, std::abs(est.sigma(i, j)));
    }
  }
  CHECK(max_off <= 0.15);
}

TEST_CASE("constant columns are rejected as degenerate") {
  std::vector<double> values(12 * 2);
  RngStream stream(3);
  for (std::size_t t = 0; t < 12; ++t) {
    values[t * 2] = stream.next_gauss();
    values[t * 2 + 1] = 4.0;  // constant column
  }
  CHECK_THROWS_AS(estimate_sigma_pd(Panel(12, 2, values), 6),
                  DiagonalDegenerateError);
}

TEST_CASE("every estimate_cov method returns a usable matrix") {
  const Panel data = gaussian_panel(60, 8, 9);
  for (CovMethod method :
       {CovMethod::SamplePooled, CovMethod::RothmanPD, CovMethod::DiagonalOnly,
        CovMethod::ShrinkageToDiagonal}) {
    const CovEstimate est = estimate_cov(data, 30, method);
    CHECK(est.sigma.rows() == 8);
    CHECK((est.sigma - est.sigma.transpose()).norm() < 1e-12);
    if (method != CovMethod::SamplePooled) {
      CHECK(est.min_eigenvalue > 0.0);
    }
  }
  CHECK(cov_method_from_name("rothman") == CovMethod::RothmanPD);
  CHECK_THROWS_AS(cov_method_from_name("nope"), InvalidInput);
}

TEST_CASE("gaussian sampler handles the zero matrix via the eigen floor") {
  const Panel rows = sample_gaussian(MatrixXd::Zero(3, 3), 50, 5);
  for (std::size_t t = 0; t < rows.n(); ++t) {
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(std::abs(rows(t, j)) <= 1e-3);  // sqrt(1e-8) * |z|
    }
  }
}

TEST_CASE("gaussian sampler moments match diag(1,4)") {
  MatrixXd sigma = MatrixXd::Zero(2, 2);
  sigma(0, 0) = 1.0;
  sigma(1, 1) = 4.0;
  const std::size_t n = 100000;
  const Panel rows = sample_gaussian(sigma, n, 123);
  double v0 = 0.0, v1 = 0.0, cross = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    v0 += rows(t, 0) * rows(t, 0);
    v1 += rows(t, 1) * rows(t, 1);
    cross += rows(t, 0) * rows(t, 1);
  }
  v0 /= n;
  v1 /= n;
  cross /= n;
  // var of z^2 is 2 sigma^4
  CHECK(std::abs(v0 - 1.0) <= 3.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(v1 - 4.0) <= 3.0 * 4.0 * std::sqrt(2.0 / n));
  CHECK(std::abs(cross) <= 3.0 * 2.0 * std::sqrt(1.0 / n));
}

TEST_CASE("gaussian sampler is bit-deterministic given the seed") {
  MatrixXd sigma(2, 2);
  sigma << 2.0, 0.7, 0.7, 1.0;
  const Panel a = sample_gaussian(sigma, 40, 99);
  const Panel b = sample_gaussian(sigma, 40, 99);
  for (std::size_t i = 0; i < a.values().size(); ++i) {
    CHECK(a.values()[i] == b.values()[i]);
  }
}
