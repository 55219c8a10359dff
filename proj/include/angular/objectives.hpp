#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "angular/numerics.hpp"

namespace angular {

// One-dimensional piecewise test functions. Branch boundaries follow the
// "x <= b takes the left branch" convention; at a boundary the derivative of
// the selected branch is returned.

/// (x+0.3)^2 for x <= 0, (x-0.2)^2 + 0.05 for x > 0. Continuous at 0
/// (both sides evaluate to 0.09).
double f1(double x);
double f1_derivative(double x);

/// -40x - 35.15 for x <= -0.9, x^3 + x sin(8x) + 0.85 for x > -0.9.
/// Not continuous at -0.9: the left branch gives 0.85 and the right-hand
/// limit is 0.8353010774642377, a jump of -0.0146989225357623.
double f2(double x);
double f2_derivative(double x);

/// Six-branch piecewise function with boundaries -0.5, -0.4, 0, 0.4, 0.5.
/// Continuous at every boundary.
double f3(double x);
double f3_derivative(double x);

inline constexpr double kRosenbrockA = 1.0;
inline constexpr double kRosenbrockB = 100.0;

/// sum_i b (x_{i+1} - x_i^2)^2 + (a - x_i)^2. Requires x.size() >= 2.
double rosenbrock(const ParamVector& x, double a = kRosenbrockA, double b = kRosenbrockB);
ParamVector rosenbrock_grad(const ParamVector& x, double a = kRosenbrockA,
                            double b = kRosenbrockB);

/// ||x - center||^2.
double quadratic(const ParamVector& x, const ParamVector& center);
ParamVector quadratic_grad(const ParamVector& x, const ParamVector& center);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct KnownMinimum {
  ParamVector location;
  double value = 0.0;
};

/// A differentiable test problem driven by the harness.
struct Objective {
  std::string name;
  std::size_t dim = 0;
  std::function<double(const ParamVector&)> eval;
  std::function<ParamVector(const ParamVector&)> grad;
  std::vector<Interval> domain;
  /// The first entry is the global minimum.
  std::vector<KnownMinimum> known_minima;
  /// Coordinates where the function or its derivative has a kink or jump.
  std::vector<double> nonsmooth_points;

  const KnownMinimum* global_minimum() const {
    return known_minima.empty() ? nullptr : &known_minima.front();
  }
};

Objective make_f1();
Objective make_f2();
Objective make_f3();
Objective make_rosenbrock(std::size_t dim, double a = kRosenbrockA, double b = kRosenbrockB);
Objective make_quadratic(ParamVector center);

/// Builds the named objective: "f1", "f2", "f3", "rosenbrock" (uses dim),
/// "quadratic" (uses center; dim must match when both are given).
Objective make_objective(const std::string& name, std::size_t dim = 0,
                         const ParamVector& center = {});

}  // namespace angular
