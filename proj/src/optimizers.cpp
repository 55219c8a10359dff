#include "angular/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace angular {

std::string_view to_string(Rule rule) noexcept {
  switch (rule) {
    case Rule::sgd: return "sgd";
    case Rule::sgdm: return "sgdm";
    case Rule::rmsprop: return "rmsprop";
    case Rule::adam: return "adam";
    case Rule::adamw: return "adamw";
    case Rule::radam: return "radam";
    case Rule::diffgrad: return "diffgrad";
    case Rule::adabelief: return "adabelief";
    case Rule::angulargrad: return "angulargrad";
  }
  return "unknown";
}

std::string_view to_string(AngleVariant variant) noexcept {
  return variant == AngleVariant::cos ? "cos" : "tan";
}

Rule parse_rule(std::string_view name) {
  for (Rule r : {Rule::sgd, Rule::sgdm, Rule::rmsprop, Rule::adam, Rule::adamw, Rule::radam,
                 Rule::diffgrad, Rule::adabelief, Rule::angulargrad}) {
    if (to_string(r) == name) return r;
  }
  throw std::invalid_argument("unknown optimizer rule: " + std::string(name));
}

AngleVariant parse_angle_variant(std::string_view name) {
  if (name == "cos") return AngleVariant::cos;
  if (name == "tan") return AngleVariant::tan;
  throw std::invalid_argument("unknown angle variant: " + std::string(name));
}

bool OptimizerConfig::uses_moments() const noexcept {
  switch (rule) {
    case Rule::adam:
    case Rule::adamw:
    case Rule::radam:
    case Rule::diffgrad:
    case Rule::adabelief:
    case Rule::angulargrad:
      return true;
    default:
      return false;
  }
}

void OptimizerConfig::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("OptimizerConfig: " + msg); };
  if (!std::isfinite(alpha)) fail("alpha must be finite");
  if (!(beta1 >= 0.0 && beta1 < 1.0)) fail("beta1 must lie in [0, 1)");
  if (!(beta2 >= 0.0 && beta2 < 1.0)) fail("beta2 must lie in [0, 1)");
  if (!(epsilon > 0.0)) fail("epsilon must be positive");
  if (!(momentum_gamma >= 0.0 && momentum_gamma < 1.0)) fail("momentum_gamma must lie in [0, 1)");
  if (!(rmsprop_rho >= 0.0 && rmsprop_rho < 1.0)) fail("rmsprop_rho must lie in [0, 1)");
  if (!(weight_decay_lambda >= 0.0)) fail("weight_decay_lambda must be non-negative");
  if (!(hypergrad_omega >= 0.0)) fail("hypergrad_omega must be non-negative");
  if (!(lambda1 >= 0.0 && lambda1 <= 1.0)) fail("lambda1 must lie in [0, 1]");
  if (!(lambda2 >= 0.0 && lambda2 <= 1.0)) fail("lambda2 must lie in [0, 1]");
  if (uses_moments() && !(beta1 * beta1 / std::sqrt(beta2) < 1.0)) {
    fail("beta1^2 / sqrt(beta2) must be below 1");
  }
}

OptimizerState make_state(const OptimizerConfig& config, std::size_t dim) {
  OptimizerState state;
  state.m.assign(dim, 0.0);
  state.v.assign(dim, 0.0);
  state.s.assign(dim, 0.0);
  state.prev_grad.assign(dim, 0.0);
  state.prev_angle.assign(dim, 0.0);
  state.momentum_buf.assign(dim, 0.0);
  state.last_scale.assign(dim, 1.0);
  state.alpha_t = config.alpha;
  return state;
}

NonFiniteStepError::NonFiniteStepError(std::size_t iteration, std::size_t coordinate, Rule rule)
    : NonFiniteError("non-finite parameter after step " + std::to_string(iteration) +
                     " at coordinate " + std::to_string(coordinate) + " (rule " +
                     std::string(to_string(rule)) + ")"),
      iteration_(iteration),
      coordinate_(coordinate),
      rule_(rule) {}

ParamVector angle_between(const ParamVector& grad, const ParamVector& prev_grad) {
  require_same_size(grad.size(), prev_grad.size(), "angle_between");
  ParamVector out(grad.size());
  for (std::size_t i = 0; i < grad.size(); ++i) {
    const double num = std::abs(grad[i] - prev_grad[i]);
    const double den = std::abs(1.0 + grad[i] * prev_grad[i]);
    out[i] = den == 0.0 ? std::numbers::pi / 2.0 : std::atan(num / den);
  }
  return out;
}

double angular_coefficient(double a_min, AngleVariant variant, double lambda1,
                           double lambda2) noexcept {
  double squashed = 0.0;
  if (variant == AngleVariant::cos) {
    squashed = std::tanh(std::abs(std::cos(a_min)));
  } else if (a_min >= std::numbers::pi / 2.0) {
    squashed = 1.0;
  } else {
    squashed = std::tanh(std::abs(std::tan(a_min)));
  }
  return squashed * lambda1 + lambda2;
}

ParamVector angular_coefficient(const ParamVector& a_min, AngleVariant variant, double lambda1,
                                double lambda2) {
  ParamVector phi(a_min.size());
  for (std::size_t i = 0; i < a_min.size(); ++i) {
    phi[i] = angular_coefficient(a_min[i], variant, lambda1, lambda2);
  }
  return phi;
}

double diffgrad_friction(double grad, double prev_grad) noexcept {
  return 1.0 / (1.0 + std::exp(-std::abs(prev_grad - grad)));
}

ParamVector gc_transform(const ParamVector& grad) {
  const double mu = mean(grad);
  ParamVector out(grad.size());
  for (std::size_t i = 0; i < grad.size(); ++i) out[i] = grad[i] - mu;
  return out;
}

double hgd_adapt(double alpha_prev, const ParamVector& grad, const ParamVector& prev_grad,
                 double omega) {
  return alpha_prev + omega * dot(grad, prev_grad);
}

double radam_rho_inf(double beta2) noexcept { return 2.0 / (1.0 - beta2) - 1.0; }

double radam_rho(std::size_t t, double beta2) noexcept {
  const double tt = static_cast<double>(t);
  const double b2t = std::pow(beta2, tt);
  return radam_rho_inf(beta2) - 2.0 * tt * b2t / (1.0 - b2t);
}

double radam_rectifier(std::size_t t, double beta2) noexcept {
  const double rho_inf = radam_rho_inf(beta2);
  const double rho_t = radam_rho(t, beta2);
  return std::sqrt((rho_t - 4.0) * (rho_t - 2.0) * rho_inf /
                   ((rho_inf - 4.0) * (rho_inf - 2.0) * rho_t));
}

namespace {

void check_step_inputs(const OptimizerState& state, const ParamVector& params,
                       const ParamVector& grad) {
  require_same_size(params.size(), grad.size(), "optimizer step (params vs grad)");
  require_same_size(params.size(), state.dim(), "optimizer step (params vs state)");
}

ParamVector finish(OptimizerState& state, Rule rule, ParamVector out, const ParamVector& grad) {
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!std::isfinite(out[i])) throw NonFiniteStepError(state.t, i, rule);
  }
  state.prev_grad = grad;
  return out;
}

struct BiasCorrection {
  double first;
  double second;
};

// Advances t and the Adam moments; returns the bias-correction denominators.
BiasCorrection advance_moments(OptimizerState& state, const OptimizerConfig& config,
                               const ParamVector& grad) {
  ++state.t;
  const double b1 = config.beta1;
  const double b2 = config.beta2;
  for (std::size_t i = 0; i < grad.size(); ++i) {
    state.m[i] = b1 * state.m[i] + (1.0 - b1) * grad[i];
    state.v[i] = b2 * state.v[i] + (1.0 - b2) * grad[i] * grad[i];
  }
  const double tt = static_cast<double>(state.t);
  return {1.0 - std::pow(b1, tt), 1.0 - std::pow(b2, tt)};
}

// theta - alpha * scale[i] * m_hat / (sqrt(v_hat) + eps). With scale == nullptr
// the multiplication is skipped entirely so plain Adam stays bit-exact.
ParamVector scaled_adam_update(const OptimizerState& state, const OptimizerConfig& config,
                               const ParamVector& params, BiasCorrection bc,
                               const ParamVector* scale) {
  ParamVector out(params.size());
  const double alpha = state.alpha_t;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double m_hat = state.m[i] / bc.first;
    const double v_hat = state.v[i] / bc.second;
    const double denom = std::sqrt(v_hat) + config.epsilon;
    if (scale != nullptr) {
      out[i] = params[i] - alpha * (*scale)[i] * m_hat / denom;
    } else {
      out[i] = params[i] - alpha * m_hat / denom;
    }
  }
  return out;
}

}  // namespace

ParamVector sgd_step(OptimizerState& state, const OptimizerConfig& /*config*/,
                     const ParamVector& params, const ParamVector& grad) {
  check_step_inputs(state, params, grad);
  ++state.t;
  ParamVector out(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) out[i] = params[i] - state.alpha_t * grad[i];
  std::fill(state.last_scale.begin(), state.last_scale.end(), 1.0);
  return finish(state, Rule::sgd, std::move(out), grad);
}

ParamVector sgdm_step(OptimizerState& state, const OptimizerConfig& config,
                      const ParamVector& params, const ParamVector& grad) {
  check_step_inputs(state, params, grad);
  ++state.t;
  const double gamma = config.momentum_gamma;
  ParamVector out(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.momentum_buf[i] = gamma * state.momentum_buf[i] + (1.0 - gamma) * grad[i];
    out[i] = params[i] - state.alpha_t * state.momentum_buf[i];
  }
  std::fill(state.last_scale.begin(), state.last_scale.end(), 1.0);
  return finish(state, Rule::sgdm, std::move(out), grad);
}

ParamVector rmsprop_step(OptimizerState& state, const OptimizerConfig& config,
                         const ParamVector& params, const ParamVector& grad) {
  check_step_inputs(state, params, grad);
  ++state.t;
  const double rho = config.rmsprop_rho;
  ParamVector out(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.v[i] = rho * state.v[i] + (1.0 - rho) * grad[i] * grad[i];
    out[i] = params[i] - state.alpha_t * grad[i] / (std::sqrt(state.v[i]) + config.epsilon);
  }
  std::fill(state.last_scale.begin(), state.last_scale.end(), 1.0);
  return finish(state, Rule::rmsprop, std::move(out), grad);
}

ParamVector adam_step(OptimizerState& state, const OptimizerConfig& config,
                      const ParamVector& params, const ParamVector& grad) {
  check_step_inputs(state, params, grad);
  const BiasCorrection bc = advance_moments(state, config, grad);
  ParamVector out = scaled_adam_update(state, config, params, bc, nullptr);
  std::fill(state.last_scale.begin(), state.last_scale.end(), 1.0);
  return finish(state, Rule::adam, std::move(out), grad);
}

ParamVector adamw_step(OptimizerState& state, const OptimizerConfig& config,
                       const ParamVector& params, const ParamVector& grad) {
  check_step_inputs(state, params, grad);
  const BiasCorrection bc = advance_moments(state, config, grad);
  ParamVector out = scaled_adam_update(state, config, params, bc, nullptr);
  // Decoupled decay shrinks toward zero (the printed "+ lambda theta" sign
  // would grow the weights).
  if (config.weight_decay_lambda != 0.0) {
    const double decay = state.alpha_t * config.weight_decay_lambda;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] -= decay * params[i];
  }
  std::fill(state.last_scale.begin(), state.last_scale.end(), 1.0);
  return finish(state, Rule::adamw, std::move(out), grad);
}

ParamVector radam_step(OptimizerState& state, const OptimizerConfig& config,
                       const ParamVector& params, const ParamVector& grad) {
  check_step_inputs(state, params, grad);
  const BiasCorrection bc = advance_moments(state, config, grad);
  const double rho_t = radam_rho(state.t, config.beta2);
  ParamVector out(params.size());
  if (rho_t > 4.0) {
    const double r_t = radam_rectifier(state.t, config.beta2);
    for (std::size_t i = 0; i < params.size(); ++i) {
      const double m_hat = state.m[i] / bc.first;
      const double v_hat = state.v[i] / bc.second;
      out[i] = params[i] - state.alpha_t * r_t * m_hat / (std::sqrt(v_hat) + config.epsilon);
    }
  } else {
    // Warm-up: bias-corrected momentum without the adaptive denominator.
    for (std::size_t i = 0; i < params.size(); ++i) {
      out[i] = params[i] - state.alpha_t * state.m[i] / bc.first;
    }
  }
  std::fill(state.last_scale.begin(), state.last_scale.end(), 1.0);
  return finish(state, Rule::radam, std::move(out), grad);
}

ParamVector diffgrad_step(OptimizerState& state, const OptimizerConfig& config,
                          const ParamVector& params, const ParamVector& grad) {
  check_step_inputs(state, params, grad);
  ParamVector xi(grad.size());
  for (std::size_t i = 0; i < grad.size(); ++i) xi[i] = diffgrad_friction(grad[i], state.prev_grad[i]);
  const BiasCorrection bc = advance_moments(state, config, grad);
  ParamVector out = scaled_adam_update(state, config, params, bc, &xi);
  state.last_scale = std::move(xi);
  return finish(state, Rule::diffgrad, std::move(out), grad);
}

ParamVector adabelief_step(OptimizerState& state, const OptimizerConfig& config,
                           const ParamVector& params, const ParamVector& grad) {
  check_step_inputs(state, params, grad);
  ++state.t;
  const double b1 = config.beta1;
  const double b2 = config.beta2;
  const double tt = static_cast<double>(state.t);
  const double bc1 = 1.0 - std::pow(b1, tt);
  const double bc2 = 1.0 - std::pow(b2, tt);
  ParamVector out(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = b1 * state.m[i] + (1.0 - b1) * grad[i];
    const double residual = grad[i] - state.m[i];
    state.s[i] = b2 * state.s[i] + (1.0 - b2) * residual * residual;
    const double m_hat = state.m[i] / bc1;
    const double s_hat = state.s[i] / bc2;
    out[i] = params[i] - state.alpha_t * m_hat / (std::sqrt(s_hat) + config.epsilon);
  }
  std::fill(state.last_scale.begin(), state.last_scale.end(), 1.0);
  return finish(state, Rule::adabelief, std::move(out), grad);
}

ParamVector angulargrad_step(OptimizerState& state, const OptimizerConfig& config,
                             const ParamVector& params, const ParamVector& grad) {
  check_step_inputs(state, params, grad);
  ParamVector angle = angle_between(grad, state.prev_grad);
  ParamVector phi(grad.size());
  if (config.phi_override) {
    std::fill(phi.begin(), phi.end(), *config.phi_override);
  } else {
    for (std::size_t i = 0; i < grad.size(); ++i) {
      const double a_min = std::min(state.prev_angle[i], angle[i]);
      phi[i] = angular_coefficient(a_min, config.angle_variant, config.lambda1, config.lambda2);
    }
  }
  const BiasCorrection bc = advance_moments(state, config, grad);
  ParamVector out = scaled_adam_update(state, config, params, bc, &phi);
  state.prev_angle = std::move(angle);
  state.last_scale = std::move(phi);
  return finish(state, Rule::angulargrad, std::move(out), grad);
}

ParamVector step(OptimizerState& state, const OptimizerConfig& config, const ParamVector& params,
                 const ParamVector& grad) {
  check_step_inputs(state, params, grad);
  const ParamVector centered = config.gc_enabled ? gc_transform(grad) : ParamVector{};
  const ParamVector& g = config.gc_enabled ? centered : grad;

  if (config.hypergrad_omega != 0.0) {
    state.alpha_t = hgd_adapt(state.alpha_t, g, state.prev_grad, config.hypergrad_omega);
  }

  ParamVector out;
  switch (config.rule) {
    case Rule::sgd: out = sgd_step(state, config, params, g); break;
    case Rule::sgdm: out = sgdm_step(state, config, params, g); break;
    case Rule::rmsprop: out = rmsprop_step(state, config, params, g); break;
    case Rule::adam: out = adam_step(state, config, params, g); break;
    case Rule::adamw: out = adamw_step(state, config, params, g); break;
    case Rule::radam: out = radam_step(state, config, params, g); break;
    case Rule::diffgrad: out = diffgrad_step(state, config, params, g); break;
    case Rule::adabelief: out = adabelief_step(state, config, params, g); break;
    case Rule::angulargrad: out = angulargrad_step(state, config, params, g); break;
    default: throw std::invalid_argument("step: unknown rule");
  }

  if (config.rule != Rule::adamw && config.weight_decay_lambda != 0.0) {
    const double decay = state.alpha_t * config.weight_decay_lambda;
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] -= decay * params[i];
      if (!std::isfinite(out[i])) throw NonFiniteStepError(state.t, i, config.rule);
    }
  }
  return out;
}

Optimizer::Optimizer(OptimizerConfig config, std::size_t dim)
    : config_(std::move(config)), state_(make_state(config_, dim)) {
  config_.validate();
}

}  // namespace angular
