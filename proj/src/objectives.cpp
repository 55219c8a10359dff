#include "angular/objectives.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace angular {

double f1(double x) {
  if (x <= 0.0) {
    return (x + 0.3) * (x + 0.3);
  }
  return (x - 0.2) * (x - 0.2) + 0.05;
}

double f1_derivative(double x) {
  if (x <= 0.0) {
    return 2.0 * (x + 0.3);
  }
  return 2.0 * (x - 0.2);
}

double f2(double x) {
  if (x <= -0.9) {
    return -40.0 * x - 35.15;
  }
  return x * x * x + x * std::sin(8.0 * x) + 0.85;
}

double f2_derivative(double x) {
  if (x <= -0.9) {
    return -40.0;
  }
  return 3.0 * x * x + std::sin(8.0 * x) + 8.0 * x * std::cos(8.0 * x);
}

double f3(double x) {
  if (x <= -0.5) return x * x;
  if (x <= -0.4) return 0.75 + x;
  if (x <= 0.0) return -7.0 * x / 8.0;
  if (x <= 0.4) return 7.0 * x / 8.0;
  if (x <= 0.5) return 0.75 - x;
  return x * x;
}

double f3_derivative(double x) {
  if (x <= -0.5) return 2.0 * x;
  if (x <= -0.4) return 1.0;
  if (x <= 0.0) return -7.0 / 8.0;
  if (x <= 0.4) return 7.0 / 8.0;
  if (x <= 0.5) return -1.0;
  return 2.0 * x;
}

double rosenbrock(const ParamVector& x, double a, double b) {
  if (x.size() < 2) {
    throw std::invalid_argument("rosenbrock: dimension must be at least 2");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double valley = x[i + 1] - x[i] * x[i];
    const double offset = a - x[i];
    sum += b * valley * valley + offset * offset;
  }
  return sum;
}

ParamVector rosenbrock_grad(const ParamVector& x, double a, double b) {
  if (x.size() < 2) {
    throw std::invalid_argument("rosenbrock_grad: dimension must be at least 2");
  }
  ParamVector g(x.size(), 0.0);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    const double valley = x[i + 1] - x[i] * x[i];
    // d/dx_i of b*valley^2 + (a - x_i)^2, and d/dx_{i+1} of b*valley^2.
    g[i] += -4.0 * b * x[i] * valley - 2.0 * (a - x[i]);
    g[i + 1] += 2.0 * b * valley;
  }
  return g;
}

double quadratic(const ParamVector& x, const ParamVector& center) {
  require_same_size(x.size(), center.size(), "quadratic");
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - center[i];
    sum += d * d;
  }
  return sum;
}

ParamVector quadratic_grad(const ParamVector& x, const ParamVector& center) {
  require_same_size(x.size(), center.size(), "quadratic_grad");
  ParamVector g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    g[i] = 2.0 * (x[i] - center[i]);
  }
  return g;
}

namespace {

Objective scalar_objective(std::string name, double (*f)(double), double (*df)(double)) {
  Objective obj;
  obj.name = std::move(name);
  obj.dim = 1;
  obj.eval = [f](const ParamVector& x) {
    require_same_size(x.size(), 1, "scalar objective");
    return f(x[0]);
  };
  obj.grad = [df](const ParamVector& x) {
    require_same_size(x.size(), 1, "scalar objective gradient");
    return ParamVector{df(x[0])};
  };
  obj.domain = {{-1.0, 1.0}};
  return obj;
}

}  // namespace

Objective make_f1() {
  Objective obj = scalar_objective("f1", &f1, &f1_derivative);
  obj.known_minima = {{{-0.3}, 0.0}, {{0.2}, 0.05}};
  obj.nonsmooth_points = {0.0};
  return obj;
}

Objective make_f2() {
  Objective obj = scalar_objective("f2", &f2, &f2_derivative);
  // Stationary points of the cubic branch, located to 40 digits offline.
  obj.known_minima = {
      {{-0.64291859891526175}, 1.1977146994464420e-4},
      {{0.0}, 0.85},
      {{0.58805347607924605}, 0.46531810345742706},
  };
  obj.nonsmooth_points = {-0.9};
  return obj;
}

Objective make_f3() {
  Objective obj = scalar_objective("f3", &f3, &f3_derivative);
  obj.known_minima = {{{0.0}, 0.0}, {{-0.5}, 0.25}, {{0.5}, 0.25}};
  obj.nonsmooth_points = {-0.5, -0.4, 0.0, 0.4, 0.5};
  return obj;
}

Objective make_rosenbrock(std::size_t dim, double a, double b) {
  if (dim < 2) {
    throw std::invalid_argument("make_rosenbrock: dimension must be at least 2");
  }
  Objective obj;
  obj.name = "rosenbrock";
  obj.dim = dim;
  obj.eval = [a, b](const ParamVector& x) { return rosenbrock(x, a, b); };
  obj.grad = [a, b](const ParamVector& x) { return rosenbrock_grad(x, a, b); };
  obj.domain.assign(dim, Interval{-2.048, 2.048});
  // Closed form only for a = 1 (any dim) and for dim = 2 (the point (a, a^2)).
  if (a == 1.0) {
    obj.known_minima = {{ParamVector(dim, 1.0), 0.0}};
  } else if (dim == 2) {
    obj.known_minima = {{ParamVector{a, a * a}, 0.0}};
  }
  return obj;
}

Objective make_quadratic(ParamVector center) {
  if (center.empty()) {
    throw std::invalid_argument("make_quadratic: center must be non-empty");
  }
  Objective obj;
  obj.name = "quadratic";
  obj.dim = center.size();
  obj.eval = [center](const ParamVector& x) { return quadratic(x, center); };
  obj.grad = [center](const ParamVector& x) { return quadratic_grad(x, center); };
  for (double c : center) obj.domain.push_back({c - 5.0, c + 5.0});
  obj.known_minima = {{center, 0.0}};
  return obj;
}

Objective make_objective(const std::string& name, std::size_t dim, const ParamVector& center) {
  if (name == "f1") return make_f1();
  if (name == "f2") return make_f2();
  if (name == "f3") return make_f3();
  if (name == "rosenbrock") return make_rosenbrock(dim == 0 ? 2 : dim);
  if (name == "quadratic") {
    if (dim != 0 && !center.empty() && dim != center.size()) {
      throw std::invalid_argument("make_objective: quadratic center does not match dim");
    }
    if (center.empty()) return make_quadratic(ParamVector(dim == 0 ? 1 : dim, 0.0));
    return make_quadratic(center);
  }
  throw std::invalid_argument("unknown objective: " + name);
}

}  // namespace angular
