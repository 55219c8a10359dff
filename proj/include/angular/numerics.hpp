#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace angular {

/// Flat parameter vector. All update rules operate on this layout.
using ParamVector = std::vector<double>;

using ScalarFn = std::function<double(const ParamVector&)>;

/// Raised when a value that must be finite is NaN or Inf.
class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Deterministic generator: MT19937-64 (std::mt19937_64, seeded with the
/// 64-bit seed directly). The engine's output sequence is fixed by the C++
/// standard; the derived draws below use only integer arithmetic and
/// IEEE-754 operations so streams match across platforms and standard
/// libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via the Marsaglia polar method.
  double normal();

  /// Uniform integer in [0, n). Rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t n);

  /// Fisher-Yates shuffle driven by below().
  template <typename T>
  void shuffle(std::vector<T>& items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

ParamVector elementwise_map2(const ParamVector& a, const ParamVector& b,
                             const std::function<double(double, double)>& f);

double mean(std::span<const double> a);
double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);
double max_abs(std::span<const double> a);

bool all_finite(std::span<const double> a) noexcept;

/// Throws NonFiniteError naming `what` and the first offending index.
void require_finite(std::span<const double> a, const std::string& what);

void require_same_size(std::size_t a, std::size_t b, const std::string& what);

inline constexpr double kDefaultFiniteDiffStep = 1e-6;

/// Central-difference gradient, one coordinate at a time.
ParamVector finite_diff_grad(const ScalarFn& f, const ParamVector& x,
                             double h = kDefaultFiniteDiffStep);

/// ||a - b||_inf / max(||a||_inf, ||b||_inf, 1). The unit floor keeps the
/// measure meaningful where the true gradient vanishes.
double gradient_relative_error(const ParamVector& analytic,
                               const ParamVector& numeric);

}  // namespace angular
