#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "angular/cli.hpp"

namespace angular::cli {

namespace {

using nlohmann::json;

const std::set<std::string>& optimizer_keys() {
  static const std::set<std::string> keys = {
      "name",         "rule",          "alpha",      "beta1",
      "beta2",        "epsilon",       "momentum_gamma", "rmsprop_rho",
      "weight_decay_lambda", "lambda1", "lambda2",   "hypergrad_omega",
      "angle_variant", "gc_enabled"};
  return keys;
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {
      "sgd",      "sgdm",      "rmsprop",         "adam",           "adamw",
      "radam",    "diffgrad",  "adabelief",       "angulargrad_cos", "angulargrad_tan"};
  return names;
}

NamedOptimizer preset_optimizer(const std::string& name) {
  NamedOptimizer opt;
  opt.name = name;
  OptimizerConfig& c = opt.config;
  if (name == "sgd") {
    c.rule = Rule::sgd;
  } else if (name == "sgdm") {
    c.rule = Rule::sgdm;
    c.alpha = 1e-2;
    c.momentum_gamma = 0.9;
  } else if (name == "rmsprop") {
    c.rule = Rule::rmsprop;
    c.rmsprop_rho = 0.99;
  } else if (name == "adam") {
    c.rule = Rule::adam;
  } else if (name == "adamw") {
    c.rule = Rule::adamw;
  } else if (name == "radam") {
    c.rule = Rule::radam;
  } else if (name == "diffgrad") {
    c.rule = Rule::diffgrad;
  } else if (name == "adabelief") {
    c.rule = Rule::adabelief;
  } else if (name == "angulargrad_cos" || name == "angulargrad") {
    c.rule = Rule::angulargrad;
    c.angle_variant = AngleVariant::cos;
  } else if (name == "angulargrad_tan") {
    c.rule = Rule::angulargrad;
    c.angle_variant = AngleVariant::tan;
  } else {
    throw ConfigError("unknown optimizer: " + name);
  }
  return opt;
}

void apply_optimizer_fields(OptimizerConfig& config, const json& fields) {
  if (!fields.is_object()) throw ConfigError("optimizer settings must be a JSON object");
  try {
    for (const auto& [key, value] : fields.items()) {
      if (optimizer_keys().count(key) == 0) throw ConfigError("unknown optimizer field: " + key);
      if (key == "name") continue;
      if (key == "rule") {
        config.rule = parse_rule(value.get<std::string>());
      } else if (key == "angle_variant") {
        config.angle_variant = parse_angle_variant(value.get<std::string>());
      } else if (key == "gc_enabled") {
        config.gc_enabled = value.get<bool>();
      } else {
        const double x = value.get<double>();
        if (key == "alpha") config.alpha = x;
        else if (key == "beta1") config.beta1 = x;
        else if (key == "beta2") config.beta2 = x;
        else if (key == "epsilon") config.epsilon = x;
        else if (key == "momentum_gamma") config.momentum_gamma = x;
        else if (key == "rmsprop_rho") config.rmsprop_rho = x;
        else if (key == "weight_decay_lambda") config.weight_decay_lambda = x;
        else if (key == "lambda1") config.lambda1 = x;
        else if (key == "lambda2") config.lambda2 = x;
        else if (key == "hypergrad_omega") config.hypergrad_omega = x;
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad optimizer field: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

json load_config(const std::optional<std::filesystem::path>& path) {
  if (!path) return json::object();
  std::ifstream in(*path);
  if (!in) throw ConfigError("cannot open config file " + path->string());
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path->string() + ": " + e.what());
  }
  if (!cfg.is_object()) throw ConfigError("config root must be a JSON object");
  return cfg;
}

std::vector<NamedOptimizer> resolve_optimizers(const json& config,
                                               const std::vector<std::string>& default_names,
                                               const json& protocol,
                                               const std::optional<std::vector<std::string>>& filter) {
  const json shared = config.value("defaults", json::object());
  auto from_name = [&](const std::string& name) {
    NamedOptimizer opt = preset_optimizer(name);
    apply_optimizer_fields(opt.config, protocol);
    apply_optimizer_fields(opt.config, shared);
    return opt;
  };

  std::vector<NamedOptimizer> list;
  if (config.contains("optimizers")) {
    const json& entries = config.at("optimizers");
    if (!entries.is_array()) throw ConfigError("\"optimizers\" must be an array");
    for (const json& entry : entries) {
      if (entry.is_string()) {
        list.push_back(from_name(entry.get<std::string>()));
        continue;
      }
      if (!entry.is_object() || !entry.contains("name") || !entry.at("name").is_string()) {
        throw ConfigError("optimizer entries must be names or objects with a \"name\"");
      }
      const auto name = entry.at("name").get<std::string>();
      NamedOptimizer opt;
      const auto& presets = preset_names();
      if (std::find(presets.begin(), presets.end(), name) != presets.end()) {
        opt = preset_optimizer(name);
      } else if (entry.contains("rule")) {
        opt.name = name;
      } else {
        throw ConfigError("unknown optimizer: " + name + " (custom entries need a \"rule\")");
      }
      apply_optimizer_fields(opt.config, protocol);
      apply_optimizer_fields(opt.config, shared);
      apply_optimizer_fields(opt.config, entry);
      list.push_back(std::move(opt));
    }
  } else {
    for (const auto& name : default_names) list.push_back(from_name(name));
  }

  if (filter) {
    std::vector<NamedOptimizer> chosen;
    for (const auto& name : *filter) {
      auto it = std::find_if(list.begin(), list.end(),
                             [&](const NamedOptimizer& o) { return o.name == name; });
      chosen.push_back(it != list.end() ? *it : from_name(name));
    }
    list = std::move(chosen);
  }
  if (list.empty()) throw ConfigError("no optimizers selected");
  for (std::size_t i = 0; i < list.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (list[i].name == list[j].name) throw ConfigError("duplicate optimizer: " + list[i].name);
    }
    try {
      list[i].config.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(list[i].name + ": " + e.what());
    }
  }
  return list;
}

}  // namespace angular::cli
