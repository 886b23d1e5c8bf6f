#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <vector>

#include "tensorcue/combinatorics.hpp"

using namespace tensorcue;
using std::numbers::pi;

namespace {

// Bell triangle: row r starts with the last entry of row r-1; B(r) is the
// first entry of row r.
std::vector<std::uint64_t> bell_by_triangle(int up_to) {
  std::vector<std::uint64_t> bell{1};
  std::vector<std::uint64_t> row{1};
  for (int r = 1; r <= up_to; ++r) {
    std::vector<std::uint64_t> next{row.back()};
    for (std::uint64_t v : row) next.push_back(next.back() + v);
    bell.push_back(next.front());
    row = std::move(next);
  }
  return bell;
}

bool is_valid_partition(const SetPartition& p) {
  std::vector<int> seen(p.k, 0);
  int last_min = -1;
  for (const auto& block : p.blocks) {
    if (block.empty() || !std::is_sorted(block.begin(), block.end())) return false;
    if (block.front() <= last_min) return false;
    last_min = block.front();
    for (int e : block) {
      if (e < 0 || e >= p.k || seen[e]++) return false;
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; });
}

}  // namespace

TEST_CASE("set_partitions small cases") {
  const auto one = set_partitions(1);
  REQUIRE(one.size() == 1);
  CHECK(one.with_blocks(1)[0].blocks == std::vector<std::vector<int>>{{0}});

  const auto two = set_partitions(2);
  REQUIRE(two.size() == 2);
  CHECK(two.with_blocks(1)[0].blocks == std::vector<std::vector<int>>{{0, 1}});
  CHECK(two.with_blocks(2)[0].blocks == std::vector<std::vector<int>>{{0}, {1}});

  CHECK(set_partitions(4).size() == 15);
}

TEST_CASE("partition counts match the Bell triangle and Stirling numbers") {
  const auto bell = bell_by_triangle(10);
  const std::uint64_t expected[] = {1, 2, 5, 15, 52, 203, 877, 4140};
  for (int k = 1; k <= 10; ++k) {
    const auto family = set_partitions(k);
    CHECK(family.size() == bell[k]);
    CHECK(bell_number(k) == bell[k]);
    if (k <= 8) CHECK(family.size() == expected[k - 1]);
    for (int p = 1; p <= k; ++p) CHECK(family.with_blocks(p).size() == stirling2(k, p));
  }
}

TEST_CASE("every enumerated partition is canonical and distinct") {
  for (int k = 1; k <= 7; ++k) {
    const auto family = set_partitions(k);
    std::set<std::vector<std::vector<int>>> distinct;
    for (int p = 1; p <= k; ++p) {
      for (const auto& part : family.with_blocks(p)) {
        CHECK(is_valid_partition(part));
        CHECK(part.block_count() == p);
        distinct.insert(part.blocks);
      }
    }
    CHECK(distinct.size() == family.size());
  }
}

TEST_CASE("insertion enumeration yields the same partitions") {
  for (int k = 1; k <= 7; ++k) {
    std::set<std::vector<std::vector<int>>> a, b;
    const auto family = set_partitions(k);
    for (const auto& group : family.by_blocks) {
      for (const auto& part : group) a.insert(part.blocks);
    }
    for (auto part : detail::set_partitions_by_insertion(k)) {
      for (auto& block : part.blocks) std::sort(block.begin(), block.end());
      std::sort(part.blocks.begin(), part.blocks.end());
      b.insert(part.blocks);
    }
    CHECK(a == b);
  }
}

TEST_CASE("set_partitions rejects out-of-range sizes") {
  CHECK_THROWS_AS(set_partitions(13), capacity_error);
  CHECK_THROWS_AS(set_partitions(0), std::invalid_argument);
}

TEST_CASE("falling factorials") {
  CHECK(falling_factorial(5.0, 2) == 20.0);
  CHECK(falling_factorial(3.0, 4) == 0.0);
  CHECK(falling_factorial(2.5, 3) == doctest::Approx(1.875));
  CHECK(falling_factorial(7.0, 0) == 1.0);
  CHECK(falling_factorial(std::int64_t{5}, 2) == 20);
  CHECK(falling_factorial(std::int64_t{3}, 4) == 0);
  CHECK_THROWS_AS(falling_factorial(std::int64_t{1} << 40, 3), std::overflow_error);
  CHECK_THROWS_AS(falling_factorial(1.0, -1), std::invalid_argument);
}

TEST_CASE("Stirling identity sum_p S(k,p) x^(p) = x^k") {
  CHECK(stirling2(3, 1) == 1);
  CHECK(stirling2(3, 2) == 3);
  CHECK(stirling2(3, 3) == 1);
  CHECK(stirling_identity_residual(3, 4.0) == 0.0);
  CHECK(stirling_identity_residual(1, 17.0) == 0.0);
  CHECK(stirling_identity_residual(1, -2.25) == 0.0);
  CHECK(stirling_identity_residual(5, 2.0) == 0.0);
  for (int k = 1; k <= 8; ++k) {
    for (int x = 0; x <= 10; ++x) CHECK(stirling_identity_residual(k, x) == 0.0);
  }
  CHECK(stirling_identity_residual(6, 3.7) < 1e-9);
}

TEST_CASE("rho_superposed_sine values") {
  for (int m : {1, 2, 5, 100}) {
    const std::vector<double> one{0.4};
    CHECK(rho_superposed_sine(m, one) == doctest::Approx(1.0).epsilon(1e-14));
  }
  const std::vector<double> half{0.0, 0.5};
  CHECK(rho_superposed_sine(1, half) == doctest::Approx(1.0 - 4.0 / (pi * pi)).epsilon(1e-14));
  const std::vector<double> unit{0.0, 1.0};
  CHECK(rho_superposed_sine(2, unit) == doctest::Approx(1.0 - 2.0 / (pi * pi)).epsilon(1e-14));
  CHECK(rho_superposed_sine(2, unit) == doctest::Approx(0.797357).epsilon(1e-6));
  std::vector<double> nine(9, 0.0);
  CHECK_THROWS_AS(rho_superposed_sine(2, nine), capacity_error);
}

TEST_CASE("rho_superposed_pair values and agreement with the partition sum") {
  CHECK(rho_superposed_pair(1, 0.0) == 0.0);
  CHECK(rho_superposed_pair(2, 0.0) == 0.5);
  CHECK(rho_superposed_pair(3, 3.0) == doctest::Approx(1.0).epsilon(1e-15));
  for (int m = 1; m <= 30; ++m) {
    CHECK(rho_superposed_pair(m, 0.0) == doctest::Approx(1.0 - 1.0 / m).epsilon(1e-15));
    for (int i = 0; i < 50; ++i) {
      const double d = 0.173 * i;
      const std::vector<double> pts{0.0, d};
      CHECK(std::abs(rho_superposed_sine(m, pts) - rho_superposed_pair(m, d)) < 1e-12);
    }
  }
}

TEST_CASE("superposition k=3 against a hand expansion") {
  // p=1: (1/m^2) rho3(x/m); p=2: (m-1)/m^2 * sum over the three pair/singleton
  // splits of rho2; p=3: (m-1)(m-2)/m^2.
  const int m = 4;
  const std::vector<double> x{0.0, 0.7, 1.9};
  auto s = [&](double u) { return sine_q(u / m); };
  const double r01 = 1 - s(x[1] - x[0]) * s(x[1] - x[0]);
  const double r02 = 1 - s(x[2] - x[0]) * s(x[2] - x[0]);
  const double r12 = 1 - s(x[2] - x[1]) * s(x[2] - x[1]);
  const std::vector<double> scaled{x[0] / m, x[1] / m, x[2] / m};
  const double r3 = rho_sine<double>(scaled);
  const double expected = r3 / (m * m) + (m - 1.0) / (m * m) * (r01 + r02 + r12) +
                          (m - 1.0) * (m - 2.0) / (m * m);
  CHECK(rho_superposed_sine(m, x) == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("superposition is permutation symmetric and routes agree") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> coord(-4.0, 4.0);
  for (int t = 0; t < 300; ++t) {
    const int k = 1 + t % 6;
    const int m = 1 + static_cast<int>(gen() % 12);
    std::vector<double> x(k);
    for (double& v : x) v = coord(gen);
    const double a = rho_superposed_sine(m, x);
    CHECK(std::abs(a - detail::rho_superposed_sine_by_insertion(m, x)) <= 1e-12);
    CHECK(a >= 0.0);
    CHECK(a <= 1.0 + 1e-9);
    std::shuffle(x.begin(), x.end(), gen);
    CHECK(rho_superposed_sine(m, x) == doctest::Approx(a).epsilon(1e-11).scale(1.0));
  }
}

TEST_CASE("superposition tends to the Poisson value 1 at rate 1/m") {
  const std::vector<std::vector<double>> configs{{0.0, 0.3}, {0.0, 0.4, 1.1}, {0.0, 0.25, 0.5, 0.9}};
  for (const auto& x : configs) {
    double prev = 2.0;
    for (int m = 1; m <= 256; m *= 2) {
      const double dev = std::abs(rho_superposed_sine(m, x) - 1.0);
      CHECK(dev < prev);
      CHECK(dev * m <= static_cast<double>(x.size() * x.size()));
      prev = dev;
    }
    // leading order: 1 - C(k, 2) / m, since q(d/m) -> 1
    const double pairs = 0.5 * x.size() * (x.size() - 1.0);
    CHECK(prev * 256 == doctest::Approx(pairs).epsilon(0.05));
  }
}
