#include <ostream>

#include <CLI11.hpp>

#include "angular/cli.hpp"

namespace angular::cli {

namespace {

void add_common_flags(CLI::App& sub, CliOptions& options, std::vector<std::uint64_t>& seeds,
                      std::vector<std::string>& optimizers, std::size_t& iters) {
  sub.add_option("--config", options.config, "JSON config file")->check(CLI::ExistingFile);
  sub.add_option("--out", options.out, "output directory")->capture_default_str();
  sub.add_option("--seeds", seeds, "comma-separated seeds")->delimiter(',');
  sub.add_option("--optimizers", optimizers, "comma-separated optimizer names")->delimiter(',');
  sub.add_option("--iters", iters, "iterations (epochs for mlp)")->check(CLI::PositiveNumber);
  sub.add_flag("--allow-divergence", options.allow_divergence, "exit 0 even if a run diverges");
  sub.add_flag("--log-scale", options.log_scale, "log-scale loss axes");
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"angular_optim: gradient optimizer experiments"};
  app.require_subcommand(1);

  CliOptions options;
  std::vector<std::uint64_t> seeds;
  std::vector<std::string> optimizers;
  std::size_t iters = 0;

  struct Command {
    const char* name;
    const char* help;
    int (*fn)(const CliOptions&, std::ostream&);
  };
  const Command commands[] = {
      {"toy", "scalar test functions F1, F2, F3", cmd_toy},
      {"rosenbrock", "2-D Rosenbrock trajectories", cmd_rosenbrock},
      {"mlp", "MLP on Gaussian blobs", cmd_mlp},
      {"regret", "online regret on a quadratic", cmd_regret},
      {"gradcheck", "finite-difference gradient checks", cmd_gradcheck},
      {"plot", "plot trajectory CSVs", cmd_plot},
  };
  std::vector<CLI::App*> subs;
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    add_common_flags(*sub, options, seeds, optimizers, iters);
    if (std::string_view(c.name) == "plot") {
      sub->add_option("inputs", options.inputs, "trajectory CSV files")->check(CLI::ExistingFile);
    }
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    app.exit(e, out, err);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kConfigError;
  }

  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (!subs[i]->parsed()) continue;
    if (subs[i]->count("--seeds") > 0) options.seeds = seeds;
    if (subs[i]->count("--optimizers") > 0) options.optimizers = optimizers;
    if (subs[i]->count("--iters") > 0) options.iters = iters;
    return commands[i].fn(options, out);
  }
  return kConfigError;
}

}  // namespace angular::cli
