#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include "breakdate/csv.hpp"
#include "breakdate/errors.hpp"
#include "breakdate/panel.hpp"
#include "breakdate/rng.hpp"

using namespace breakdate;

namespace {

Panel random_panel(std::size_t n, std::size_t p, std::uint64_t seed) {
  RngStream stream(seed);
  std::vector<double> values(n * p);
  for (double& v : values) v = stream.next_gauss();
  return Panel(n, p, std::move(values));
}

}  // namespace

TEST_CASE("panel validation") {
  CHECK_THROWS_AS(Panel(3, 2, std::vector<double>(6, 0.0)), InvalidInput);
  CHECK_THROWS_AS(Panel(4, 0, {}), InvalidInput);
  CHECK_THROWS_AS(Panel(4, 2, std::vector<double>(7, 0.0)), InvalidInput);
  std::vector<double> bad(8, 0.0);
  bad[3] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(Panel(4, 2, bad), InvalidInput);
  bad[3] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(Panel(4, 2, bad), InvalidInput);
}

TEST_CASE("prefix sums on the zero panel") {
  const Panel zero(4, 2, std::vector<double>(8, 0.0));
  const PrefixSums ps = build_prefix_sums(zero);
  for (std::size_t k = 0; k <= 4; ++k) {
    CHECK(ps.sqnorm_cum(k) == 0.0);
    for (double v : ps.cum(k)) CHECK(v == 0.0);
  }
}

TEST_CASE("prefix sums of a repeated row are linear in k") {
  const std::vector<double> row{1.5, -2.25, 0.5};
  std::vector<double> values;
  for (int t = 0; t < 6; ++t) values.insert(values.end(), row.begin(), row.end());
  const PrefixSums ps(Panel(6, 3, values));
  for (std::size_t k = 0; k <= 6; ++k) {
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(ps.cum(k)[j] == static_cast<double>(k) * row[j]);
    }
  }
}

TEST_CASE("prefix totals match direct summation") {
  const Panel data = random_panel(8, 3, 42);
  const PrefixSums ps(data);
  for (std::size_t j = 0; j < 3; ++j) {
    double direct = 0.0;
    for (std::size_t t = 0; t < 8; ++t) direct += data(t, j);
    CHECK(ps.total()[j] == doctest::Approx(direct).epsilon(1e-14));
  }
  double sq = 0.0;
  for (std::size_t t = 0; t < 8; ++t) {
    for (std::size_t j = 0; j < 3; ++j) sq += data(t, j) * data(t, j);
  }
  CHECK(ps.sqnorm_cum(8) == doctest::Approx(sq).epsilon(1e-14));
  // monotone
  for (std::size_t k = 1; k <= 8; ++k) {
    CHECK(ps.sqnorm_cum(k) >= ps.sqnorm_cum(k - 1));
  }
}

TEST_CASE("segment_sum basics and additivity") {
  const Panel data = random_panel(6, 2, 7);
  const PrefixSums ps(data);

  for (double v : ps.segment_sum(3, 3)) CHECK(v == 0.0);
  const auto whole = ps.segment_sum(0, 6);
  for (std::size_t j = 0; j < 2; ++j) CHECK(whole[j] == ps.total()[j]);

  const auto mid = ps.segment_sum(2, 5);
  for (std::size_t j = 0; j < 2; ++j) {
    double direct = 0.0;
    for (std::size_t t = 2; t < 5; ++t) direct += data(t, j);
    CHECK(mid[j] == doctest::Approx(direct).epsilon(1e-13));
  }

  const auto ab = ps.segment_sum(0, 2);
  const auto bc = ps.segment_sum(2, 6);
  for (std::size_t j = 0; j < 2; ++j) {
    CHECK(ab[j] + bc[j] ==
          doctest::Approx(whole[j]).epsilon(1e-12));
  }

  CHECK_THROWS_AS(ps.segment_sum(4, 2), InvalidInput);
  CHECK_THROWS_AS(ps.segment_sum(0, 7), InvalidInput);
}

TEST_CASE("csv round trip with and without header") {
  const auto dir = std::filesystem::temp_directory_path() / "breakdate_csv";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "panel.csv").string();

  const Panel data = random_panel(5, 3, 11);
  write_panel_csv(path, data);
  const Panel back = load_panel_csv(path);
  REQUIRE(back.n() == 5);
  REQUIRE(back.p() == 3);
  for (std::size_t t = 0; t < 5; ++t) {
    for (std::size_t j = 0; j < 3; ++j) CHECK(back(t, j) == data(t, j));
  }

  {
    std::ofstream out(path);
    out << "x1,x2,x3\n1,2,3\n4,5,6\n7,8,9\n10,11,12\n";
  }
  const Panel with_header = load_panel_csv(path);
  CHECK(with_header.n() == 4);
  CHECK(with_header.p() == 3);
  CHECK(with_header(0, 0) == 1.0);
  CHECK(with_header(3, 2) == 12.0);

  {
    std::ofstream out(path);
    out << "1,2\n3,oops\n5,6\n7,8\n";
  }
  CHECK_THROWS_AS(load_panel_csv(path), InvalidInput);

  {
    std::ofstream out(path);
    out << "1,2\n3\n5,6\n7,8\n";
  }
  CHECK_THROWS_AS(load_panel_csv(path), InvalidInput);
}

TEST_CASE("cp1 spec validation") {
  Cp1Spec spec;
  spec.n = 10;
  spec.p = 2;
  spec.tau0 = 0.5;
  spec.delta = {1.0, 0.0};
  CHECK_NOTHROW(spec.validate());
  spec.tau0 = 0.05;  // k0 = 0
  CHECK_THROWS_AS(spec.validate(), InvalidInput);
  spec.tau0 = 0.5;
  spec.delta = {1.0};
  CHECK_THROWS_AS(spec.validate(), InvalidInput);
}
