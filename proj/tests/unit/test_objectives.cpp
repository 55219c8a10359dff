#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "angular/objectives.hpp"

using namespace angular;

namespace {

double left_limit(double (*f)(double), double b) { return f(b); }
double right_limit(double (*f)(double), double b) {
  return f(std::nextafter(b, INFINITY));
}

void check_gradients(const Objective& obj, std::size_t points, std::uint64_t seed) {
  Rng rng(seed);
  std::size_t checked = 0;
  while (checked < points) {
    ParamVector x(obj.dim);
    for (std::size_t i = 0; i < obj.dim; ++i) x[i] = rng.uniform(obj.domain[i].lo, obj.domain[i].hi);
    bool near = false;
    for (double xi : x) {
      for (double b : obj.nonsmooth_points) near = near || std::abs(xi - b) < 1e-3;
    }
    if (near) continue;
    const double err = gradient_relative_error(obj.grad(x), finite_diff_grad(obj.eval, x));
    REQUIRE(err <= 1e-5);
    ++checked;
  }
}

}  // namespace

TEST_CASE("f1 values") {
  CHECK(f1(-0.3) == 0.0);
  CHECK(f1(0.2) == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(f1(-1.0) == doctest::Approx(0.49).epsilon(1e-15));
  CHECK(f1_derivative(-1.0) == doctest::Approx(-1.4));
  CHECK(f1_derivative(0.0) == doctest::Approx(0.6));
  CHECK(f1_derivative(0.5) == doctest::Approx(0.6));
}

TEST_CASE("f1 is continuous at 0") {
  CHECK(std::abs(left_limit(f1, 0.0) - right_limit(f1, 0.0)) < 1e-9);
  CHECK(f1(0.0) == doctest::Approx(0.09));
}

TEST_CASE("f2 values") {
  CHECK(f2(-0.9) == doctest::Approx(0.85).epsilon(1e-14));
  CHECK(f2(0.0) == 0.85);
  CHECK(f2_derivative(-2.0) == -40.0);
  CHECK(f2_derivative(-0.9) == -40.0);
  const double x = 0.3;
  CHECK(f2_derivative(x) ==
        doctest::Approx(3 * x * x + std::sin(8 * x) + 8 * x * std::cos(8 * x)));
}

TEST_CASE("f2 jump at -0.9 matches the documented gap") {
  const double left = left_limit(f2, -0.9);
  const double right = right_limit(f2, -0.9);
  const double expected_right = -0.729 + (-0.9) * std::sin(-7.2) + 0.85;
  CHECK(right == doctest::Approx(expected_right).epsilon(1e-12));
  CHECK(right == doctest::Approx(0.8353010774642377).epsilon(1e-12));
  CHECK(right - left == doctest::Approx(-0.0146989225357623).epsilon(1e-9));
}

TEST_CASE("f3 values and continuity") {
  CHECK(f3(0.0) == 0.0);
  CHECK(f3(-1.0) == 1.0);
  CHECK(f3(0.45) == doctest::Approx(0.30));
  for (double b : make_f3().nonsmooth_points) {
    CHECK(std::abs(left_limit(f3, b) - right_limit(f3, b)) < 1e-9);
  }
  CHECK(f3_derivative(-1.0) == -2.0);
  CHECK(f3_derivative(-0.45) == 1.0);
  CHECK(f3_derivative(-0.2) == -0.875);
  CHECK(f3_derivative(0.2) == 0.875);
  CHECK(f3_derivative(0.45) == -1.0);
  CHECK(f3_derivative(1.0) == 2.0);
}

TEST_CASE("boundary convention selects the left branch") {
  CHECK(f1_derivative(0.0) == doctest::Approx(2 * 0.3));
  CHECK(f3_derivative(0.0) == -0.875);
  CHECK(f3_derivative(-0.5) == -1.0);
  CHECK(f3_derivative(0.5) == -1.0);
}

TEST_CASE("rosenbrock values") {
  CHECK(rosenbrock({1, 1}) == 0.0);
  CHECK(rosenbrock({0, 0}) == 1.0);
  CHECK(rosenbrock({-1, 1}) == 4.0);
  CHECK(rosenbrock({1, 1, 1, 1, 1}) == 0.0);
  CHECK(rosenbrock_grad({1, 1, 1, 1}) == ParamVector{0, 0, 0, 0});
  CHECK(rosenbrock_grad({0, 0}) == ParamVector{-2, 0});
  CHECK_THROWS_AS(rosenbrock({1}), std::invalid_argument);
  CHECK_THROWS_AS(rosenbrock_grad({1}), std::invalid_argument);
}

TEST_CASE("quadratic values") {
  CHECK(quadratic({0.5, -2}, {0.5, -2}) == 0.0);
  CHECK(quadratic({1, 0}, {0, 0}) == 1.0);
  CHECK(quadratic_grad({2}, {0}) == ParamVector{4});
  CHECK_THROWS_AS(quadratic({1, 2}, {1}), std::invalid_argument);
  CHECK_THROWS_AS(quadratic_grad({1, 2}, {1}), std::invalid_argument);
}

TEST_CASE("known minima evaluate to their values") {
  const std::vector<Objective> objs = {make_f1(),          make_f2(),          make_f3(),
                                       make_rosenbrock(2), make_rosenbrock(7), make_quadratic({0.3, -0.7, 1.1})};
  for (const auto& obj : objs) {
    CAPTURE(obj.name);
    REQUIRE_FALSE(obj.known_minima.empty());
    for (const auto& km : obj.known_minima) {
      CHECK(std::abs(obj.eval(km.location) - km.value) <= 1e-12);
      CHECK(obj.grad(km.location).size() == obj.dim);
    }
  }
}

TEST_CASE("f2 minima are stationary points") {
  const Objective obj = make_f2();
  for (const auto& km : obj.known_minima) {
    CHECK(std::abs(f2_derivative(km.location[0])) < 1e-12);
  }
  CHECK(obj.global_minimum()->value < 1e-3);
}

TEST_CASE("analytic gradients match finite differences") {
  check_gradients(make_f1(), 200, 1);
  check_gradients(make_f2(), 200, 2);
  check_gradients(make_f3(), 200, 3);
  for (std::size_t n : {2, 5, 10}) check_gradients(make_rosenbrock(n), 100, 10 + n);
  check_gradients(make_quadratic({0.1, -0.4, 0.9, 0.0}), 100, 4);
}

TEST_CASE("make_objective") {
  CHECK(make_objective("f1").dim == 1);
  CHECK(make_objective("rosenbrock", 5).dim == 5);
  CHECK(make_objective("quadratic", 0, {1, 2}).dim == 2);
  CHECK_THROWS_AS(make_objective("rastrigin"), std::invalid_argument);
  CHECK_THROWS_AS(make_objective("rosenbrock", 1), std::invalid_argument);
  const Objective r = make_rosenbrock(2);
  CHECK(r.domain[0].lo == -2.048);
  CHECK(r.domain[1].hi == 2.048);
}
