#include "angular/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace angular {

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u = 0.0;
  double v = 0.0;
  double s = 0.0;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double scale = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * scale;
  has_spare_ = true;
  return u * scale;
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) {
    throw std::invalid_argument("Rng::below: n must be positive");
  }
  // Largest multiple of n representable; draws above it are rejected.
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % n);
  std::uint64_t x = 0;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

void require_same_size(std::size_t a, std::size_t b, const std::string& what) {
  if (a != b) {
    throw std::invalid_argument(what + ": length mismatch (" + std::to_string(a) +
                                " vs " + std::to_string(b) + ")");
  }
}

ParamVector elementwise_map2(const ParamVector& a, const ParamVector& b,
                             const std::function<double(double, double)>& f) {
  require_same_size(a.size(), b.size(), "elementwise_map2");
  ParamVector out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    out[i] = f(a[i], b[i]);
  }
  return out;
}

double mean(std::span<const double> a) {
  if (a.empty()) {
    throw std::invalid_argument("mean: empty vector");
  }
  double sum = 0.0;
  for (double x : a) sum += x;
  return sum / static_cast<double>(a.size());
}

double dot(std::span<const double> a, std::span<const double> b) {
  require_same_size(a.size(), b.size(), "dot");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum;
}

double norm2(std::span<const double> a) {
  double sum = 0.0;
  for (double x : a) sum += x * x;
  return std::sqrt(sum);
}

double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

bool all_finite(std::span<const double> a) noexcept {
  return std::all_of(a.begin(), a.end(), [](double x) { return std::isfinite(x); });
}

void require_finite(std::span<const double> a, const std::string& what) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!std::isfinite(a[i])) {
      throw NonFiniteError(what + ": non-finite value at index " + std::to_string(i));
    }
  }
}

ParamVector finite_diff_grad(const ScalarFn& f, const ParamVector& x, double h) {
  if (!(h > 0.0)) {
    throw std::invalid_argument("finite_diff_grad: step must be positive");
  }
  ParamVector probe = x;
  ParamVector grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double up = f(probe);
    probe[i] = x[i] - h;
    const double down = f(probe);
    probe[i] = x[i];
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw NonFiniteError("finite_diff_grad: non-finite evaluation at coordinate " +
                           std::to_string(i));
    }
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

double gradient_relative_error(const ParamVector& analytic, const ParamVector& numeric) {
  require_same_size(analytic.size(), numeric.size(), "gradient_relative_error");
  double diff = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    diff = std::max(diff, std::abs(analytic[i] - numeric[i]));
  }
  const double scale = std::max({max_abs(analytic), max_abs(numeric), 1.0});
  return diff / scale;
}

}  // namespace angular
