#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "angular/numerics.hpp"

namespace angular {

enum class Rule { sgd, sgdm, rmsprop, adam, adamw, radam, diffgrad, adabelief, angulargrad };

enum class AngleVariant { cos, tan };

std::string_view to_string(Rule rule) noexcept;
std::string_view to_string(AngleVariant variant) noexcept;
Rule parse_rule(std::string_view name);
AngleVariant parse_angle_variant(std::string_view name);

/// Hyperparameters for every rule. Fields a rule does not read are ignored.
struct OptimizerConfig {
  Rule rule = Rule::adam;
  double alpha = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  /// Momentum fraction for SGDM: m = gamma m + (1 - gamma) g.
  double momentum_gamma = 0.9;
  /// RMSProp smoothing constant.
  double rmsprop_rho = 0.99;
  /// Decoupled weight decay. Built into AdamW, applied as a wrapper elsewhere.
  double weight_decay_lambda = 0.0;
  double lambda1 = 0.5;
  double lambda2 = 0.5;
  /// Hypergradient learning rate; 0 disables learning-rate adaptation.
  double hypergrad_omega = 0.0;
  AngleVariant angle_variant = AngleVariant::cos;
  bool gc_enabled = false;
  /// Test hook: replaces the angular coefficient with a constant.
  std::optional<double> phi_override;

  bool uses_moments() const noexcept;

  /// Throws std::invalid_argument on out-of-range hyperparameters, including
  /// beta1^2 / sqrt(beta2) >= 1 for moment-based rules.
  void validate() const;
};

struct OptimizerState {
  std::size_t t = 0;
  ParamVector m;
  ParamVector v;
  /// AdaBelief's EMA of (g - m)^2.
  ParamVector s;
  ParamVector prev_grad;
  ParamVector prev_angle;
  ParamVector momentum_buf;
  /// Learning rate in effect; starts at config.alpha, moved by HGD and
  /// learning-rate milestones.
  double alpha_t = 0.0;
  /// Per-coordinate multiplier applied in the last step: phi for
  /// AngularGrad, xi for diffGrad, 1 for the rest.
  ParamVector last_scale;

  std::size_t dim() const noexcept { return m.size(); }
};

OptimizerState make_state(const OptimizerConfig& config, std::size_t dim);

/// A step whose output contains NaN or Inf.
class NonFiniteStepError : public NonFiniteError {
 public:
  NonFiniteStepError(std::size_t iteration, std::size_t coordinate, Rule rule);

  std::size_t iteration() const noexcept { return iteration_; }
  std::size_t coordinate() const noexcept { return coordinate_; }
  Rule rule() const noexcept { return rule_; }

 private:
  std::size_t iteration_;
  std::size_t coordinate_;
  Rule rule_;
};

/// Elementwise angle between consecutive gradient slopes,
/// atan(|g - g_prev| / |1 + g g_prev|), in [0, pi/2]. A zero denominator
/// maps to pi/2.
ParamVector angle_between(const ParamVector& grad, const ParamVector& prev_grad);

double angular_coefficient(double a_min, AngleVariant variant, double lambda1,
                           double lambda2) noexcept;

/// phi = tanh(|cos(A)| or |tan(A)|) * lambda1 + lambda2. tan at pi/2 is
/// treated as +inf, giving lambda1 + lambda2.
ParamVector angular_coefficient(const ParamVector& a_min, AngleVariant variant,
                                double lambda1, double lambda2);

/// 1 / (1 + exp(-|g_prev - g|)).
double diffgrad_friction(double grad, double prev_grad) noexcept;

/// grad - mean(grad).
ParamVector gc_transform(const ParamVector& grad);

/// alpha_prev + omega * (grad . prev_grad).
double hgd_adapt(double alpha_prev, const ParamVector& grad, const ParamVector& prev_grad,
                 double omega);

double radam_rho_inf(double beta2) noexcept;
double radam_rho(std::size_t t, double beta2) noexcept;
/// Variance rectification term; only meaningful when radam_rho(t) > 4.
double radam_rectifier(std::size_t t, double beta2) noexcept;

// Individual update rules. Each advances state.t by one, updates the state
// vectors it owns, records prev_grad, and returns the new parameters. The
// rate used is state.alpha_t.
ParamVector sgd_step(OptimizerState& state, const OptimizerConfig& config,
                     const ParamVector& params, const ParamVector& grad);
ParamVector sgdm_step(OptimizerState& state, const OptimizerConfig& config,
                      const ParamVector& params, const ParamVector& grad);
ParamVector rmsprop_step(OptimizerState& state, const OptimizerConfig& config,
                         const ParamVector& params, const ParamVector& grad);
ParamVector adam_step(OptimizerState& state, const OptimizerConfig& config,
                      const ParamVector& params, const ParamVector& grad);
ParamVector adamw_step(OptimizerState& state, const OptimizerConfig& config,
                       const ParamVector& params, const ParamVector& grad);
ParamVector radam_step(OptimizerState& state, const OptimizerConfig& config,
                       const ParamVector& params, const ParamVector& grad);
ParamVector diffgrad_step(OptimizerState& state, const OptimizerConfig& config,
                          const ParamVector& params, const ParamVector& grad);
ParamVector adabelief_step(OptimizerState& state, const OptimizerConfig& config,
                           const ParamVector& params, const ParamVector& grad);
ParamVector angulargrad_step(OptimizerState& state, const OptimizerConfig& config,
                             const ParamVector& params, const ParamVector& grad);

/// Full update: gradient centralization, hypergradient rate adaptation,
/// the configured rule, and decoupled weight decay for rules other than
/// AdamW. Throws std::invalid_argument on dimension mismatch and
/// NonFiniteStepError when the result is not finite (state is left as the
/// rule updated it; the run is expected to stop).
ParamVector step(OptimizerState& state, const OptimizerConfig& config,
                 const ParamVector& params, const ParamVector& grad);

/// Owns a config and its state.
class Optimizer {
 public:
  Optimizer(OptimizerConfig config, std::size_t dim);

  ParamVector step(const ParamVector& params, const ParamVector& grad) {
    return angular::step(state_, config_, params, grad);
  }

  const OptimizerConfig& config() const noexcept { return config_; }
  const OptimizerState& state() const noexcept { return state_; }

  double learning_rate() const noexcept { return state_.alpha_t; }
  void set_learning_rate(double alpha) noexcept { state_.alpha_t = alpha; }

 private:
  OptimizerConfig config_;
  OptimizerState state_;
};

}  // namespace angular
