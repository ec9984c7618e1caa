#include <doctest.h>

#include <cmath>
#include <vector>

#include "breakdate/parallel.hpp"
#include "breakdate/rng.hpp"

using namespace breakdate;

TEST_CASE("streams are reproducible and path-sensitive") {
  RngStream a = RngStream::derive(123, {kTagRep, 7});
  RngStream b = RngStream::derive(123, {kTagRep, 7});
  RngStream c = RngStream::derive(123, {kTagRep, 8});
  bool differs = false;
  for (int i = 0; i < 16; ++i) {
    const std::uint64_t va = a.next_u64();
    CHECK(va == b.next_u64());
    if (va != c.next_u64()) differs = true;
  }
  CHECK(differs);
}

TEST_CASE("uniform and gaussian moments are sane") {
  RngStream stream(99);
  const int n = 200000;
  double mean = 0.0, var = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = stream.next_double();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    mean += u;
  }
  mean /= n;
  CHECK(std::abs(mean - 0.5) < 0.005);

  mean = 0.0;
  std::vector<double> zs(n);
  for (double& z : zs) z = stream.next_gauss();
  for (double z : zs) mean += z;
  mean /= n;
  for (double z : zs) var += (z - mean) * (z - mean);
  var /= n;
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("next_below stays in range and covers it") {
  RngStream stream(5);
  std::vector<int> seen(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const std::uint64_t v = stream.next_below(7);
    REQUIRE(v < 7);
    ++seen[v];
  }
  for (int count : seen) CHECK(count > 800);
}

TEST_CASE("parallel_for is exception-safe and complete") {
  std::vector<int> hits(1000, 0);
  parallel_for(1000, 4, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits) CHECK(h == 1);

  CHECK_THROWS_AS(
      parallel_for(100, 4,
                   [](std::size_t i) {
                     if (i == 37) throw std::runtime_error("boom");
                   }),
      std::runtime_error);
}
