#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <map>

#include "angular/numerics.hpp"
#include "angular/objectives.hpp"

using namespace angular;

TEST_CASE("elementwise_map2") {
  const ParamVector a{1, 2};
  const ParamVector b{3, 4};
  CHECK(elementwise_map2(a, b, [](double x, double y) { return x + y; }) == ParamVector{4, 6});
  CHECK(elementwise_map2(a, a, [](double x, double y) { return x - y; }) == ParamVector{0, 0});
  CHECK(elementwise_map2({0.5}, {0.5}, [](double x, double y) { return std::min(x, y); }) ==
        ParamVector{0.5});
  CHECK(a == ParamVector{1, 2});
  CHECK(b == ParamVector{3, 4});
  CHECK_THROWS_AS(elementwise_map2({1, 2}, {1}, [](double x, double) { return x; }),
                  std::invalid_argument);
}

TEST_CASE("mean") {
  CHECK(mean(ParamVector{1, 2, 3}) == 2.0);
  CHECK(mean(ParamVector{5}) == 5.0);
  CHECK(mean(ParamVector{-1, 1}) == 0.0);
  CHECK_THROWS_AS(mean(ParamVector{}), std::invalid_argument);
}

TEST_CASE("vector helpers") {
  CHECK(dot(ParamVector{1, 2, 3}, ParamVector{4, 5, 6}) == 32.0);
  CHECK(norm2(ParamVector{3, 4}) == 5.0);
  CHECK(max_abs(ParamVector{-7, 2}) == 7.0);
  CHECK(all_finite(ParamVector{1, 2}));
  CHECK_FALSE(all_finite(ParamVector{1, std::numeric_limits<double>::quiet_NaN()}));
  CHECK_FALSE(all_finite(ParamVector{std::numeric_limits<double>::infinity()}));
  CHECK_THROWS_AS(require_finite(ParamVector{0, HUGE_VAL}, "x"), NonFiniteError);
  CHECK_NOTHROW(require_finite(ParamVector{0, 1}, "x"));
}

TEST_CASE("finite differences") {
  SUBCASE("quadratic is exact up to rounding") {
    const auto g = finite_diff_grad([](const ParamVector& x) { return x[0] * x[0]; }, {3.0}, 1e-5);
    CHECK(std::abs(g[0] - 6.0) < 1e-6);
  }
  SUBCASE("constant function") {
    const auto g = finite_diff_grad([](const ParamVector&) { return 4.2; }, {1.0, -2.0, 7.5});
    CHECK(g == ParamVector{0, 0, 0});
  }
  SUBCASE("rosenbrock at origin") {
    const auto g = finite_diff_grad([](const ParamVector& x) { return rosenbrock(x); }, {0.0, 0.0});
    CHECK(std::abs(g[0] + 2.0) < 1e-4);
    CHECK(std::abs(g[1]) < 1e-4);
  }
  SUBCASE("input untouched") {
    const ParamVector x{0.25, -0.5};
    const ParamVector copy = x;
    finite_diff_grad([](const ParamVector& v) { return v[0] * v[1]; }, x);
    CHECK(x == copy);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(finite_diff_grad([](const ParamVector& x) { return x[0]; }, {1.0}, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(finite_diff_grad([](const ParamVector& x) { return std::log(x[0]); }, {0.0}),
                    NonFiniteError);
  }
}

TEST_CASE("gradient relative error") {
  CHECK(gradient_relative_error({1, 2}, {1, 2}) == 0.0);
  CHECK(gradient_relative_error({0, 0}, {1e-6, 0}) == doctest::Approx(1e-6));
  CHECK(gradient_relative_error({100, 0}, {101, 0}) == doctest::Approx(1.0 / 101.0));
}

TEST_CASE("rng reproducibility") {
  Rng a(1234);
  Rng b(1234);
  for (int i = 0; i < 10000; ++i) REQUIRE(a.next_u64() == b.next_u64());
  Rng c(99);
  Rng d(99);
  for (int i = 0; i < 10000; ++i) {
    REQUIRE(c.uniform() == d.uniform());
    REQUIRE(c.normal() == d.normal());
    REQUIRE(c.below(17) == d.below(17));
  }
  Rng e(1);
  Rng f(2);
  CHECK(e.next_u64() != f.next_u64());
}

TEST_CASE("rng engine is the standard mt19937_64") {
  // The standard requires the 10000th output for the default seed.
  Rng r(5489);
  std::uint64_t x = 0;
  for (int i = 0; i < 10000; ++i) x = r.next_u64();
  CHECK(x == 9981545732273789042ULL);
}

TEST_CASE("rng distributions") {
  Rng r(7);
  constexpr int n = 200000;
  double sum = 0.0;
  double sum_sq = 0.0;
  double usum = 0.0;
  std::map<std::uint64_t, int> counts;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    usum += u;
    const double z = r.normal();
    sum += z;
    sum_sq += z * z;
    const auto k = r.below(5);
    REQUIRE(k < 5);
    ++counts[k];
  }
  CHECK(usum / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(std::abs(sum / n) < 0.01);
  CHECK(sum_sq / n == doctest::Approx(1.0).epsilon(0.02));
  for (const auto& [k, c] : counts) CHECK(c == doctest::Approx(n / 5.0).epsilon(0.03));
  const double x = r.uniform(-2.0, 3.0);
  CHECK(x >= -2.0);
  CHECK(x < 3.0);
}

TEST_CASE("shuffle is a permutation") {
  Rng r(3);
  std::vector<int> v(50);
  for (int i = 0; i < 50; ++i) v[i] = i;
  r.shuffle(v);
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) CHECK(sorted[i] == i);
  bool moved = false;
  for (int i = 0; i < 50; ++i) moved = moved || v[i] != i;
  CHECK(moved);
}
