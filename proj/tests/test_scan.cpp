#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "breakdate/errors.hpp"
#include "breakdate/rng.hpp"
#include "breakdate/scan.hpp"
#include "oracles.hpp"

using namespace breakdate;

namespace {

Panel noiseless_cp1(std::size_t n, std::size_t p, std::size_t k0,
                    double shift) {
  std::vector<double> values(n * p, 0.0);
  for (std::size_t t = k0; t < n; ++t) {
    for (std::size_t j = 0; j < p; ++j) values[t * p + j] = shift;
  }
  return Panel(n, p, std::move(values));
}

Panel random_panel(std::size_t n, std::size_t p, std::uint64_t seed) {
  RngStream stream(seed);
  std::vector<double> values(n * p);
  for (double& v : values) v = stream.next_gauss();
  return Panel(n, p, std::move(values));
}

// Small integer panels make every intermediate quantity exactly
// representable, so invariance checks can assert bitwise equality.
Panel integer_panel(std::size_t n, std::size_t p, std::uint64_t seed) {
  RngStream stream(seed);
  std::vector<double> values(n * p);
  for (double& v : values) {
    v = static_cast<double>(static_cast<int>(stream.next_below(17)) - 8);
  }
  return Panel(n, p, std::move(values));
}

Panel shifted(const Panel& data, const std::vector<double>& c) {
  std::vector<double> values(data.values());
  for (std::size_t t = 0; t < data.n(); ++t) {
    for (std::size_t j = 0; j < data.p(); ++j) values[t * data.p() + j] += c[j];
  }
  return Panel(data.n(), data.p(), std::move(values));
}

Panel reversed(const Panel& data) {
  std::vector<double> values(data.n() * data.p());
  for (std::size_t t = 0; t < data.n(); ++t) {
    const auto row = data.row(data.n() - 1 - t);
    std::copy(row.begin(), row.end(), values.begin() + t * data.p());
  }
  return Panel(data.n(), data.p(), std::move(values));
}

Panel scaled(const Panel& data, double c) {
  std::vector<double> values(data.values());
  for (double& v : values) v *= c;
  return Panel(data.n(), data.p(), std::move(values));
}

}  // namespace

TEST_CASE("identical rows give a flat zero U-statistic profile") {
  std::vector<double> values;
  for (int t = 0; t < 7; ++t) values.insert(values.end(), {2.5, -1.0, 0.25});
  const Panel flat(7, 3, values);
  const ObjectiveProfile profile = scan_ustat(flat);
  CHECK(profile.k_min == 2);
  CHECK(profile.k_max == 5);
  for (double v : profile.values) CHECK(v == 0.0);
  CHECK(profile.arg_k == 2);  // smallest k on a full tie
}

TEST_CASE("noiseless six-point panel matches the hand-computed profile") {
  const Panel data = noiseless_cp1(6, 1, 3, 1.0);
  const ObjectiveProfile profile = scan_ustat(data);
  CHECK(profile.value_at(2) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(profile.value_at(3) == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(profile.value_at(4) == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(profile.arg_k == 3);
  CHECK(profile.arg_tau == doctest::Approx(0.5));

  // the quadruple-sum oracle agrees
  for (std::size_t k = 2; k <= 4; ++k) {
    CHECK(profile.value_at(k) ==
          doctest::Approx(oracles::ustat_quadruple_sum(data, k)).epsilon(1e-12));
  }

  const ObjectiveProfile ssr = scan_ssr(data);
  CHECK(ssr.value_at(3) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(ssr.value_at(2) > 0.0);
  CHECK(ssr.arg_k == 3);
}

TEST_CASE("fast scans match the naive oracles on random panels") {
  RngStream meta(2024);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 4 + meta.next_below(9);   // 4..12
    const std::size_t p = 1 + meta.next_below(5);   // 1..5
    const Panel data = random_panel(n, p, 1000 + rep);
    const ObjectiveProfile ustat = scan_ustat(data);
    for (std::size_t k = 2; k <= n - 2; ++k) {
      const double oracle = oracles::ustat_quadruple_sum(data, k);
      CHECK(ustat.value_at(k) ==
            doctest::Approx(oracle).epsilon(1e-9));
    }
    const ObjectiveProfile ssr = scan_ssr(data);
    for (std::size_t k = 1; k <= n - 1; ++k) {
      CHECK(ssr.value_at(k) ==
            doctest::Approx(oracles::ssr_two_segment_loop(data, k)).epsilon(1e-9));
    }
  }
}

TEST_CASE("all-identical rows give zero SSR") {
  std::vector<double> values;
  for (int t = 0; t < 6; ++t) values.insert(values.end(), {0.5, -0.25});
  const ObjectiveProfile ssr = scan_ssr(Panel(6, 2, values));
  for (double v : ssr.values) CHECK(v == 0.0);
}

TEST_CASE("shift invariance is exact on exactly-representable data") {
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    const Panel data = integer_panel(9, 3, seed);
    const std::vector<double> c{3.0, -5.0, 2.0};
    const Panel moved = shifted(data, c);

    const ObjectiveProfile a = scan_ustat(data);
    const ObjectiveProfile b = scan_ustat(moved);
    for (std::size_t k = a.k_min; k <= a.k_max; ++k) {
      CHECK(a.value_at(k) == b.value_at(k));
    }
    CHECK(a.arg_k == b.arg_k);

    const ObjectiveProfile sa = scan_ssr(data);
    const ObjectiveProfile sb = scan_ssr(moved);
    for (std::size_t k = sa.k_min; k <= sa.k_max; ++k) {
      CHECK(sa.value_at(k) == sb.value_at(k));
    }
  }
}

TEST_CASE("scale equivariance: values scale by c^2, argmax fixed") {
  const Panel data = integer_panel(10, 2, 77);
  const Panel doubled = scaled(data, 2.0);
  const ObjectiveProfile a = scan_ustat(data);
  const ObjectiveProfile b = scan_ustat(doubled);
  for (std::size_t k = a.k_min; k <= a.k_max; ++k) {
    CHECK(b.value_at(k) == 4.0 * a.value_at(k));
  }
  CHECK(a.arg_k == b.arg_k);
}

TEST_CASE("time reversal maps value at k to value at n-k") {
  const Panel data = integer_panel(11, 2, 31);
  const std::size_t n = data.n();
  const Panel rev = reversed(data);
  const ObjectiveProfile a = scan_ustat(data);
  const ObjectiveProfile b = scan_ustat(rev);
  for (std::size_t k = a.k_min; k <= a.k_max; ++k) {
    CHECK(b.value_at(n - k) == a.value_at(k));
  }
  // induced tie-break: the reversed argmax is n - (largest tied k)
  std::size_t largest_tied = a.arg_k;
  for (std::size_t k = a.k_min; k <= a.k_max; ++k) {
    if (a.value_at(k) == a.optimum_value()) largest_tied = k;
  }
  CHECK(b.arg_k == n - largest_tied);

  const ObjectiveProfile sa = scan_ssr(data);
  const ObjectiveProfile sb = scan_ssr(rev);
  for (std::size_t k = sa.k_min; k <= sa.k_max; ++k) {
    CHECK(sb.value_at(n - k) == sa.value_at(k));
  }
}

TEST_CASE("noiseless profile is unimodal around the break") {
  RngStream meta(5150);
  for (int rep = 0; rep < 20; ++rep) {
    const std::size_t n = 6 + meta.next_below(7);  // 6..12
    const std::size_t k0 = 2 + meta.next_below(n - 3);
    const double shift = 0.5 + 0.25 * static_cast<double>(meta.next_below(8));
    const Panel data = noiseless_cp1(n, 2, k0, shift);
    const ObjectiveProfile profile = scan_ustat(data);
    for (std::size_t k = profile.k_min; k + 1 <= std::min(k0, profile.k_max);
         ++k) {
      CHECK(profile.value_at(k + 1) >= profile.value_at(k) - 1e-12);
    }
    for (std::size_t k = std::max(k0, profile.k_min); k + 1 <= profile.k_max;
         ++k) {
      CHECK(profile.value_at(k + 1) <= profile.value_at(k) + 1e-12);
    }
    if (k0 >= profile.k_min && k0 <= profile.k_max) {
      CHECK(profile.arg_k == k0);
    }
  }
}

TEST_CASE("estimators return the argext and tie-break to the smallest k") {
  const Panel data = noiseless_cp1(6, 1, 3, 1.0);
  const PointEstimate u = estimate_ustat(data);
  const PointEstimate ls = estimate_ls(data);
  CHECK(u.k_hat == 3);
  CHECK(u.tau_hat == doctest::Approx(0.5));
  CHECK(ls.k_hat == 3);
  CHECK(ls.tau_hat == doctest::Approx(0.5));

  // mirror-symmetric panel: profile symmetric, smallest tied k wins
  std::vector<double> values{0, 0, 1, 1, 0, 0};
  const Panel sym(6, 1, values);
  const ObjectiveProfile profile = scan_ustat(sym);
  CHECK(profile.value_at(2) == profile.value_at(4));
  const PointEstimate est = estimate_ustat(sym);
  CHECK(est.k_hat <= 4);
  for (std::size_t k = profile.k_min; k <= profile.k_max; ++k) {
    if (profile.value_at(k) == profile.optimum_value()) {
      CHECK(est.k_hat <= k);
    }
  }
}

TEST_CASE("scan preconditions") {
  CHECK_THROWS_AS(Panel(2, 1, std::vector<double>(2, 0.0)), InvalidInput);
}
