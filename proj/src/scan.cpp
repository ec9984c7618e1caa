#include "breakdate/scan.hpp"

#include <string>

#include "breakdate/errors.hpp"

namespace breakdate {

namespace {

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) s += a[j] * b[j];
  return s;
}

std::size_t argopt(const std::vector<double>& values, bool maximize) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (maximize ? values[i] > values[best] : values[i] < values[best]) {
      best = i;
    }
  }
  return best;
}

// Both objectives are invariant to a common additive vector. Centering on
// the columnwise minimum keeps that invariance exact in floating point
// (the baseline shifts with the data) without disturbing time reversal,
// and controls cancellation when the panel mean is far from zero.
Panel min_centered(const Panel& data) {
  const std::size_t n = data.n();
  const std::size_t p = data.p();
  std::vector<double> base(data.row(0).begin(), data.row(0).end());
  for (std::size_t t = 1; t < n; ++t) {
    const auto row = data.row(t);
    for (std::size_t j = 0; j < p; ++j) {
      if (row[j] < base[j]) base[j] = row[j];
    }
  }
  std::vector<double> values(data.values());
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t j = 0; j < p; ++j) values[t * p + j] -= base[j];
  }
  return Panel(n, p, std::move(values));
}

}  // namespace

ObjectiveProfile scan_ustat(const Panel& data) {
  const std::size_t n = data.n();
  if (n < 4) throw InvalidInput("scan_ustat needs n >= 4");
  const PrefixSums ps(min_centered(data));
  const auto total = ps.total();
  const double total_sq = dot(total, total);
  const double sqnorm_total = ps.sqnorm_cum(n);

  ObjectiveProfile out;
  out.kind = ObjectiveKind::UStat;
  out.k_min = 2;
  out.k_max = n - 2;
  out.values.resize(out.k_max - out.k_min + 1);
  for (std::size_t k = out.k_min; k <= out.k_max; ++k) {
    const auto sk = ps.cum(k);
    const double sk_sq = dot(sk, sk);
    const double sk_total = dot(sk, total);
    const double a = sk_sq - ps.sqnorm_cum(k);
    const double b =
        total_sq - 2.0 * sk_total + sk_sq - (sqnorm_total - ps.sqnorm_cum(k));
    const double c = sk_total - sk_sq;
    const double kk = static_cast<double>(k);
    const double nk = static_cast<double>(n - k);
    out.values[k - out.k_min] =
        (nk * (nk - 1.0) * a + kk * (kk - 1.0) * b - 2.0 * (kk - 1.0) * (nk - 1.0) * c) /
        (kk * nk);
  }
  out.arg_k = out.k_min + argopt(out.values, /*maximize=*/true);
  out.arg_tau = static_cast<double>(out.arg_k) / static_cast<double>(n);
  return out;
}

ObjectiveProfile scan_ssr(const Panel& data) {
  const std::size_t n = data.n();
  if (n < 2) throw InvalidInput("scan_ssr needs n >= 2");
  const PrefixSums ps(min_centered(data));
  const auto total = ps.total();
  const double sqnorm_total = ps.sqnorm_cum(n);

  ObjectiveProfile out;
  out.kind = ObjectiveKind::LeastSquares;
  out.k_min = 1;
  out.k_max = n - 1;
  out.values.resize(out.k_max - out.k_min + 1);
  std::vector<double> rest(data.p());
  for (std::size_t k = out.k_min; k <= out.k_max; ++k) {
    const auto sk = ps.cum(k);
    double rest_sq = 0.0;
    for (std::size_t j = 0; j < data.p(); ++j) {
      const double r = total[j] - sk[j];
      rest_sq += r * r;
    }
    const double sk_sq = dot(sk, sk);
    out.values[k - out.k_min] =
        sqnorm_total - (sk_sq / static_cast<double>(k) +
                        rest_sq / static_cast<double>(n - k));
  }
  out.arg_k = out.k_min + argopt(out.values, /*maximize=*/false);
  out.arg_tau = static_cast<double>(out.arg_k) / static_cast<double>(n);
  return out;
}

PointEstimate estimate_ustat(const Panel& data) {
  const ObjectiveProfile profile = scan_ustat(data);
  return {profile.arg_k, profile.arg_tau};
}

PointEstimate estimate_ls(const Panel& data) {
  const ObjectiveProfile profile = scan_ssr(data);
  return {profile.arg_k, profile.arg_tau};
}

}  // namespace breakdate
