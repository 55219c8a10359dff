#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "angular/harness.hpp"

namespace angular::cli {

enum ExitCode : int {
  kSuccess = 0,
  kDivergence = 1,
  kConfigError = 2,
  kCheckFailure = 3,
};

/// Bad config file, flag value or optimizer name.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Parsed flags. Precedence: built-in protocol < config file < flags.
struct CliOptions {
  std::optional<std::filesystem::path> config;
  std::filesystem::path out = "out";
  std::optional<std::vector<std::uint64_t>> seeds;
  std::optional<std::vector<std::string>> optimizers;
  std::optional<std::size_t> iters;
  bool allow_divergence = false;
  bool log_scale = false;
  /// Trajectory files for `plot`.
  std::vector<std::filesystem::path> inputs;
};

/// sgd, sgdm, rmsprop, adam, adamw, radam, diffgrad, adabelief,
/// angulargrad_cos, angulargrad_tan.
const std::vector<std::string>& preset_names();

/// Default hyperparameters for a named optimizer: SGDM at 1e-2 with
/// momentum 0.9, everything else at 1e-3, beta = (0.9, 0.999),
/// eps = 1e-8, no weight decay.
NamedOptimizer preset_optimizer(const std::string& name);

/// Applies the keys of `fields` (alpha, beta1, ..., rule, angle_variant,
/// gc_enabled) to `config`. Unknown keys throw ConfigError.
void apply_optimizer_fields(OptimizerConfig& config, const nlohmann::json& fields);

/// Reads the config file, or returns an empty object when none is given.
nlohmann::json load_config(const std::optional<std::filesystem::path>& path);

/// Builds the optimizer list: the config's "optimizers" (names or objects)
/// or `default_names`, each layered as preset < `protocol` < config
/// "defaults" < entry fields, then narrowed by --optimizers. Unknown names
/// throw ConfigError before anything runs.
std::vector<NamedOptimizer> resolve_optimizers(const nlohmann::json& config,
                                               const std::vector<std::string>& default_names,
                                               const nlohmann::json& protocol,
                                               const std::optional<std::vector<std::string>>& filter);

/// Toy protocol: F1, F2, F3 from theta = -1 for 300 iterations with
/// alpha = 0.1, beta1 = 0.95, beta2 = 0.999, SGDM momentum 0.95.
ExperimentSpec toy_spec(const std::string& task);
const std::vector<std::string>& toy_optimizer_names();
nlohmann::json toy_protocol();

/// Rosenbrock protocol: start (-2, 2), a = 1, b = 100, 5000 iterations,
/// preset learning rates.
ExperimentSpec rosenbrock_spec();
const std::vector<std::string>& rosenbrock_optimizer_names();

/// Regret protocol: quadratic in 10-D with center drawn uniformly from
/// [-1, 1]^10 (seed 0), theta0 = 0, alpha = 0.01, 4000 iterations.
ExperimentSpec regret_spec();
const std::vector<std::string>& regret_optimizer_names();
nlohmann::json regret_protocol();

/// MLP protocol: 3 blobs, 300 per class, separation 4, [2, 16, 3] tanh
/// network, 50 epochs, batch 32, seeds 0..4, preset learning rates.
MlpTask mlp_task();
const std::vector<std::string>& mlp_optimizer_names();

int cmd_toy(const CliOptions& options, std::ostream& log);
int cmd_rosenbrock(const CliOptions& options, std::ostream& log);
int cmd_mlp(const CliOptions& options, std::ostream& log);
int cmd_regret(const CliOptions& options, std::ostream& log);
int cmd_gradcheck(const CliOptions& options, std::ostream& log);
int cmd_plot(const CliOptions& options, std::ostream& log);

struct GradcheckResult {
  std::string target;
  double worst_relative_error = 0.0;
  double tolerance = 0.0;
  std::size_t points = 0;

  bool passed() const { return worst_relative_error <= tolerance; }
};

/// The finite-difference sweep behind cmd_gradcheck.
std::vector<GradcheckResult> run_gradcheck(std::uint64_t seed = 0);

/// Parses argv with CLI11 and dispatches; returns the process exit code.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace angular::cli
