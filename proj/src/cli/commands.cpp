#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <set>

#include "angular/cli.hpp"
#include "angular/format.hpp"
#include "angular/report.hpp"
#include "angular/svg.hpp"

namespace angular::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::set<std::string>& top_level_keys() {
  static const std::set<std::string> keys = {
      "task",     "tasks",         "dim",           "center", "center_seed",
      "optimizers", "defaults",    "iterations",    "seeds",  "theta0",
      "record_params", "lr_milestones", "grid",     "mlp"};
  return keys;
}

void check_top_level(const json& cfg) {
  for (const auto& [key, value] : cfg.items()) {
    if (top_level_keys().count(key) == 0) throw ConfigError("unknown config field: " + key);
  }
}

template <typename T>
T get_field(const json& cfg, const char* key) {
  try {
    return cfg.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field \"") + key + "\": " + e.what());
  }
}

std::vector<LrMilestone> parse_milestones(const json& node) {
  std::vector<LrMilestone> out;
  if (!node.is_array()) throw ConfigError("\"lr_milestones\" must be an array");
  for (const json& m : node) {
    LrMilestone ms;
    try {
      if (m.is_array() && m.size() == 2) {
        ms.iteration = m[0].get<std::size_t>();
        ms.divisor = m[1].get<double>();
      } else {
        ms.iteration = m.at("iteration").get<std::size_t>();
        ms.divisor = m.at("divisor").get<double>();
      }
    } catch (const json::exception& e) {
      throw ConfigError(std::string("bad lr milestone: ") + e.what());
    }
    out.push_back(ms);
  }
  return out;
}

// Layers config-file fields and then flags over a protocol spec.
void apply_spec_overrides(ExperimentSpec& spec, const json& cfg, const CliOptions& options) {
  if (cfg.contains("iterations")) spec.iterations = get_field<std::size_t>(cfg, "iterations");
  if (cfg.contains("seeds")) spec.seeds = get_field<std::vector<std::uint64_t>>(cfg, "seeds");
  if (cfg.contains("theta0")) spec.theta0 = get_field<ParamVector>(cfg, "theta0");
  if (cfg.contains("record_params")) spec.record_params = get_field<bool>(cfg, "record_params");
  if (cfg.contains("lr_milestones")) spec.lr_milestones = parse_milestones(cfg.at("lr_milestones"));
  if (options.iters) spec.iterations = *options.iters;
  if (options.seeds) spec.seeds = *options.seeds;
  if (spec.iterations < 1) throw ConfigError("iterations must be >= 1");
  if (spec.seeds.empty()) throw ConfigError("seeds must be non-empty");
}

void validate_spec(const ExperimentSpec& spec) {
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

void write_artifact(const fs::path& path, std::string_view contents) {
  write_file_atomic(path, contents);
}

std::string run_file_name(const std::string& prefix, const std::string& optimizer,
                          std::uint64_t seed) {
  return prefix + "_" + optimizer + "_s" + std::to_string(seed) + ".csv";
}

bool report_divergence(const std::string& label, const std::string& optimizer, RunStatus status,
                       const std::string& message, std::ostream& log) {
  if (status == RunStatus::completed) return false;
  log << "  [diverged] " << label << " / " << optimizer << ": " << message << '\n';
  return true;
}

int finish(bool diverged, const CliOptions& options, std::ostream& log) {
  if (diverged && !options.allow_divergence) {
    log << "one or more runs diverged (use --allow-divergence to accept)\n";
    return kDivergence;
  }
  return kSuccess;
}

// Runs a command body, mapping configuration problems to exit code 2.
template <typename Body>
int guarded(std::ostream& log, Body&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
  } catch (const json::exception& e) {
    log << "config error: " << e.what() << '\n';
  } catch (const std::invalid_argument& e) {
    log << "config error: " << e.what() << '\n';
  } catch (const fs::filesystem_error& e) {
    log << "output error: " << e.what() << '\n';
  }
  return kConfigError;
}

void prepare_out(const CliOptions& options) { fs::create_directories(options.out); }

svg::Series loss_series(const Trajectory& traj, const std::string& name) {
  svg::Series s;
  s.name = name;
  for (const auto& row : traj.rows) {
    s.xs.push_back(static_cast<double>(row.t));
    s.ys.push_back(row.loss);
  }
  return s;
}

std::string series_name(const std::string& optimizer, std::uint64_t seed, std::size_t n_seeds) {
  return n_seeds == 1 ? optimizer : optimizer + " s" + std::to_string(seed);
}

json summaries_json(const ExperimentResult& result, const Threshold& threshold,
                    const std::vector<NamedOptimizer>& order) {
  json j;
  j["threshold"] = threshold_json(threshold);
  j["std_convention"] = "sample (n-1)";
  json& per = j["optimizers"] = json::object();
  for (const auto& opt : order) per[opt.name] = summary_json(aggregate(result.at(opt.name), threshold));
  return j;
}

}  // namespace

// --- protocols ----------------------------------------------------------------

const std::vector<std::string>& toy_optimizer_names() {
  static const std::vector<std::string> names = {"sgdm",      "adam",            "diffgrad",
                                                 "adabelief", "angulargrad_cos", "angulargrad_tan"};
  return names;
}

json toy_protocol() {
  return {{"alpha", 0.1},
          {"beta1", 0.95},
          {"beta2", 0.999},
          {"epsilon", 1e-8},
          {"momentum_gamma", 0.95}};
}

ExperimentSpec toy_spec(const std::string& task) {
  ExperimentSpec spec;
  spec.task = task;
  spec.dim = 1;
  spec.iterations = 300;
  spec.seeds = {0};
  spec.theta0 = ParamVector{-1.0};
  spec.record_params = true;
  for (const auto& name : toy_optimizer_names()) {
    NamedOptimizer opt = preset_optimizer(name);
    apply_optimizer_fields(opt.config, toy_protocol());
    spec.optimizers.push_back(opt);
  }
  return spec;
}

const std::vector<std::string>& rosenbrock_optimizer_names() {
  static const std::vector<std::string> names = {"sgd",       "rmsprop",  "adam",
                                                 "adamw",     "diffgrad", "adabelief",
                                                 "angulargrad_cos", "angulargrad_tan"};
  return names;
}

ExperimentSpec rosenbrock_spec() {
  ExperimentSpec spec;
  spec.task = "rosenbrock";
  spec.dim = 2;
  spec.iterations = 5000;
  spec.seeds = {0};
  spec.theta0 = ParamVector{-2.0, 2.0};
  spec.record_params = true;
  for (const auto& name : rosenbrock_optimizer_names()) {
    spec.optimizers.push_back(preset_optimizer(name));
  }
  return spec;
}

const std::vector<std::string>& regret_optimizer_names() {
  static const std::vector<std::string> names = {"adam", "diffgrad", "adabelief",
                                                 "angulargrad_cos", "angulargrad_tan"};
  return names;
}

json regret_protocol() { return {{"alpha", 0.01}}; }

namespace {

ParamVector draw_center(std::size_t dim, std::uint64_t seed) {
  Rng rng(seed);
  ParamVector c(dim);
  for (double& x : c) x = rng.uniform(-1.0, 1.0);
  return c;
}

}  // namespace

ExperimentSpec regret_spec() {
  ExperimentSpec spec;
  spec.task = "quadratic";
  spec.dim = 10;
  spec.center = draw_center(10, 0);
  spec.iterations = 4000;
  spec.seeds = {0};
  spec.theta0 = ParamVector(10, 0.0);
  spec.record_params = false;
  for (const auto& name : regret_optimizer_names()) {
    NamedOptimizer opt = preset_optimizer(name);
    apply_optimizer_fields(opt.config, regret_protocol());
    spec.optimizers.push_back(opt);
  }
  return spec;
}

const std::vector<std::string>& mlp_optimizer_names() {
  static const std::vector<std::string> names = {"sgdm",      "adam",            "adamw",
                                                 "diffgrad",  "adabelief",       "angulargrad_cos",
                                                 "angulargrad_tan"};
  return names;
}

MlpTask mlp_task() { return MlpTask{}; }

// --- toy ----------------------------------------------------------------------

int cmd_toy(const CliOptions& options, std::ostream& log) {
  return guarded(log, [&] {
    const json cfg = load_config(options.config);
    check_top_level(cfg);
    std::vector<std::string> tasks = {"f1", "f2", "f3"};
    if (cfg.contains("tasks")) tasks = get_field<std::vector<std::string>>(cfg, "tasks");
    for (const auto& t : tasks) {
      if (t != "f1" && t != "f2" && t != "f3") throw ConfigError("toy tasks are f1, f2, f3");
    }
    const auto optimizers =
        resolve_optimizers(cfg, toy_optimizer_names(), toy_protocol(), options.optimizers);
    prepare_out(options);

    bool diverged = false;
    json summary;
    summary["protocol"] = toy_protocol();
    for (const auto& task : tasks) {
      ExperimentSpec spec = toy_spec(task);
      spec.optimizers = optimizers;
      apply_spec_overrides(spec, cfg, options);
      validate_spec(spec);
      const ExperimentResult result = run_experiment(spec);
      const Objective objective = spec.objective();

      std::vector<svg::Series> losses;
      std::vector<svg::Series> thetas;
      for (const auto& opt : optimizers) {
        for (const auto& traj : result.at(opt.name)) {
          write_artifact(options.out / run_file_name(task, opt.name, traj.seed),
                         trajectory_csv(traj));
          diverged |= report_divergence(task, opt.name, traj.status, traj.message, log);
          const auto label = series_name(opt.name, traj.seed, spec.seeds.size());
          losses.push_back(loss_series(traj, label));
          svg::Series th;
          th.name = label;
          for (const auto& row : traj.rows) {
            if (row.theta.empty()) continue;
            th.xs.push_back(static_cast<double>(row.t));
            th.ys.push_back(row.theta[0]);
          }
          thetas.push_back(std::move(th));
          const double final_loss = traj.rows.empty() ? traj.initial_loss : traj.rows.back().loss;
          log << task << ' ' << label << ": final theta " << format_double(traj.final_theta[0])
              << ", final loss " << format_double(final_loss) << '\n';
        }
      }
      summary[task] = summaries_json(result, default_threshold(objective), optimizers);
      svg::PlotOptions lo{task + ": loss vs iteration", "iteration", "loss", false,
                          options.log_scale};
      write_artifact(options.out / (task + "_loss.svg"), svg::line_plot(losses, lo));
      svg::PlotOptions to{task + ": theta vs iteration", "iteration", "theta", false, false};
      write_artifact(options.out / (task + "_theta.svg"), svg::line_plot(thetas, to));
    }
    write_artifact(options.out / "toy_summary.json", summary.dump(2) + "\n");
    return finish(diverged, options, log);
  });
}

// --- rosenbrock -----------------------------------------------------------------

int cmd_rosenbrock(const CliOptions& options, std::ostream& log) {
  return guarded(log, [&] {
    const json cfg = load_config(options.config);
    check_top_level(cfg);
    ExperimentSpec spec = rosenbrock_spec();
    spec.optimizers =
        resolve_optimizers(cfg, rosenbrock_optimizer_names(), json::object(), options.optimizers);
    apply_spec_overrides(spec, cfg, options);
    spec.dim = spec.theta0 ? spec.theta0->size() : spec.dim;
    if (cfg.contains("dim")) spec.dim = get_field<std::size_t>(cfg, "dim");
    spec.record_params = true;
    validate_spec(spec);
    prepare_out(options);

    const ExperimentResult result = run_experiment(spec);
    const Objective objective = spec.objective();
    const Threshold threshold = default_threshold(objective);
    bool diverged = false;
    std::vector<svg::Series> paths;
    std::vector<svg::Series> losses;
    for (const auto& opt : spec.optimizers) {
      const auto& runs = result.at(opt.name);
      for (const auto& traj : runs) {
        write_artifact(options.out / run_file_name("rosenbrock", opt.name, traj.seed),
                       trajectory_csv(traj));
        diverged |= report_divergence("rosenbrock", opt.name, traj.status, traj.message, log);
        losses.push_back(loss_series(traj, series_name(opt.name, traj.seed, spec.seeds.size())));
      }
      const Trajectory& first = runs.front();
      svg::Series path;
      path.name = opt.name;
      path.xs.push_back(first.theta0[0]);
      path.ys.push_back(first.theta0.size() > 1 ? first.theta0[1] : 0.0);
      for (const auto& row : first.rows) {
        path.xs.push_back(row.theta[0]);
        path.ys.push_back(row.theta.size() > 1 ? row.theta[1] : 0.0);
      }
      paths.push_back(std::move(path));
      double dist = 0.0;
      for (std::size_t i = 0; i < first.final_theta.size(); ++i) {
        dist += (first.final_theta[i] - 1.0) * (first.final_theta[i] - 1.0);
      }
      log << "rosenbrock " << opt.name << ": distance to minimum "
          << format_double(std::sqrt(dist)) << '\n';
    }

    if (spec.dim == 2) {
      Interval xr{-2.5, 2.5};
      Interval yr{-1.5, 4.5};
      std::size_t nx = 101;
      std::size_t ny = 121;
      if (cfg.contains("grid")) {
        const json& g = cfg.at("grid");
        try {
          if (g.contains("x")) xr = {g.at("x").at(0).get<double>(), g.at("x").at(1).get<double>()};
          if (g.contains("y")) yr = {g.at("y").at(0).get<double>(), g.at("y").at(1).get<double>()};
          if (g.contains("resolution")) {
            nx = g.at("resolution").at(0).get<std::size_t>();
            ny = g.at("resolution").at(1).get<std::size_t>();
          }
        } catch (const json::exception& e) {
          throw ConfigError(std::string("bad grid settings: ") + e.what());
        }
      }
      const Grid grid = grid_eval(objective, xr, yr, nx, ny);
      write_artifact(options.out / "rosenbrock_grid.csv", grid_csv(grid));
      svg::PlotOptions po{"Rosenbrock trajectories", "x", "y"};
      write_artifact(options.out / "rosenbrock_paths.svg",
                     svg::contour_overlay(grid, paths, po, std::make_pair(1.0, 1.0)));
    }
    svg::PlotOptions lo{"Rosenbrock: loss vs iteration", "iteration", "loss", false, true};
    write_artifact(options.out / "rosenbrock_loss.svg", svg::line_plot(losses, lo));
    write_artifact(options.out / "rosenbrock_summary.json",
                   summaries_json(result, threshold, spec.optimizers).dump(2) + "\n");
    return finish(diverged, options, log);
  });
}

// --- regret ---------------------------------------------------------------------

int cmd_regret(const CliOptions& options, std::ostream& log) {
  return guarded(log, [&] {
    const json cfg = load_config(options.config);
    check_top_level(cfg);
    ExperimentSpec spec = regret_spec();
    spec.optimizers =
        resolve_optimizers(cfg, regret_optimizer_names(), regret_protocol(), options.optimizers);
    if (cfg.contains("dim")) {
      spec.dim = get_field<std::size_t>(cfg, "dim");
      if (spec.dim == 0) throw ConfigError("dim must be positive");
      spec.theta0 = ParamVector(spec.dim, 0.0);
    }
    const std::uint64_t center_seed =
        cfg.contains("center_seed") ? get_field<std::uint64_t>(cfg, "center_seed") : 0;
    spec.center = cfg.contains("center") ? get_field<ParamVector>(cfg, "center")
                                         : draw_center(spec.dim, center_seed);
    if (spec.center.size() != spec.dim) throw ConfigError("center does not match dim");
    apply_spec_overrides(spec, cfg, options);
    validate_spec(spec);
    prepare_out(options);

    const ExperimentResult result = run_experiment(spec);
    const Objective objective = spec.objective();
    bool diverged = false;
    bool check_failed = false;
    json summary;
    summary["center"] = spec.center;
    json& per = summary["optimizers"] = json::object();
    std::vector<svg::Series> curves;
    for (const auto& opt : spec.optimizers) {
      for (const auto& traj : result.at(opt.name)) {
        diverged |= report_divergence("regret", opt.name, traj.status, traj.message, log);
        const RegretRecord rec = compute_regret(traj, objective);
        write_artifact(options.out / run_file_name("regret", opt.name, traj.seed),
                       regret_csv(rec));
        const bool monotone = std::is_sorted(rec.cumulative.begin(), rec.cumulative.end());
        if (!monotone) {
          log << "  [check failed] " << opt.name << ": cumulative regret decreased\n";
          check_failed = true;
        }
        json entry;
        entry["seed"] = traj.seed;
        entry["status"] = std::string(to_string(traj.status));
        entry["theta_star_source"] = std::string(to_string(rec.source));
        entry["cumulative_nondecreasing"] = monotone;
        json& checkpoints = entry["average_regret"] = json::object();
        for (std::size_t t : {250u, 500u, 1000u, 2000u, 4000u}) {
          if (t <= rec.average.size()) checkpoints[std::to_string(t)] = json_number(rec.average[t - 1]);
        }
        if (!rec.cumulative.empty()) entry["final_regret"] = json_number(rec.cumulative.back());
        per[opt.name].push_back(entry);

        svg::Series s;
        s.name = series_name(opt.name, traj.seed, spec.seeds.size());
        for (std::size_t i = 0; i < rec.average.size(); ++i) {
          s.xs.push_back(static_cast<double>(i + 1));
          s.ys.push_back(rec.average[i]);
        }
        if (!rec.average.empty()) {
          log << "regret " << s.name << ": R(T)/T = " << format_double(rec.average.back()) << '\n';
        }
        curves.push_back(std::move(s));
      }
    }
    svg::PlotOptions po{"Average regret R(t)/t", "t", "R(t)/t", true, true};
    write_artifact(options.out / "regret_avg.svg", svg::line_plot(curves, po));
    write_artifact(options.out / "regret_summary.json", summary.dump(2) + "\n");
    if (check_failed) return static_cast<int>(kCheckFailure);
    return finish(diverged, options, log);
  });
}

// --- mlp --------------------------------------------------------------------------

int cmd_mlp(const CliOptions& options, std::ostream& log) {
  return guarded(log, [&] {
    const json cfg = load_config(options.config);
    check_top_level(cfg);
    MlpTask task = mlp_task();
    std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4};
    if (cfg.contains("seeds")) seeds = get_field<std::vector<std::uint64_t>>(cfg, "seeds");
    if (options.seeds) seeds = *options.seeds;
    if (seeds.empty()) throw ConfigError("seeds must be non-empty");
    if (cfg.contains("mlp")) {
      const json& m = cfg.at("mlp");
      try {
        for (const auto& [key, value] : m.items()) {
          if (key == "layer_sizes") task.spec.layer_sizes = value.get<std::vector<std::size_t>>();
          else if (key == "activation") task.spec.activation = parse_activation(value.get<std::string>());
          else if (key == "loss") task.spec.loss = parse_loss(value.get<std::string>());
          else if (key == "n_per_class") task.n_per_class = value.get<std::size_t>();
          else if (key == "classes") task.classes = value.get<std::size_t>();
          else if (key == "separation") task.separation = value.get<double>();
          else if (key == "test_per_class") task.test_per_class = value.get<std::size_t>();
          else if (key == "data_seed") task.data_seed = value.get<std::uint64_t>();
          else if (key == "epochs") task.epochs = value.get<std::size_t>();
          else if (key == "batch_size") task.batch_size = value.get<std::size_t>();
          else throw ConfigError("unknown mlp field: " + key);
        }
      } catch (const json::exception& e) {
        throw ConfigError(std::string("bad mlp settings: ") + e.what());
      }
    }
    if (cfg.contains("lr_milestones")) task.lr_milestones = parse_milestones(cfg.at("lr_milestones"));
    if (options.iters) task.epochs = *options.iters;
    if (task.epochs < 1 || task.batch_size < 1) throw ConfigError("epochs and batch_size must be >= 1");
    const auto optimizers =
        resolve_optimizers(cfg, mlp_optimizer_names(), json::object(), options.optimizers);
    const MlpData data = make_mlp_data(task);
    prepare_out(options);
    {
      std::ostringstream train_csv;
      write_dataset_csv(train_csv, data.train);
      write_artifact(options.out / "mlp_train.csv", train_csv.str());
      std::ostringstream test_csv;
      write_dataset_csv(test_csv, data.test);
      write_artifact(options.out / "mlp_test.csv", test_csv.str());
    }

    const auto runs = run_mlp_experiment(task, optimizers, seeds);
    bool diverged = false;
    json summary;
    summary["std_convention"] = "sample (n-1)";
    json& per = summary["optimizers"] = json::object();
    std::vector<svg::Series> curves;
    for (const auto& opt : optimizers) {
      std::vector<double> losses;
      std::vector<double> train_acc;
      std::vector<double> test_acc;
      json entry;
      entry["seeds"] = json::array();
      entry["final_loss"] = json::array();
      entry["best_loss"] = json::array();
      entry["iters_to_threshold"] = json::array();
      entry["statuses"] = json::array();
      RunStatus status = RunStatus::completed;
      std::vector<double> mean_curve(task.epochs, 0.0);
      std::size_t completed = 0;
      for (const auto& run : runs.at(opt.name)) {
        write_artifact(options.out / run_file_name("mlp", opt.name, run.seed), mlp_epochs_csv(run));
        diverged |= report_divergence("mlp", opt.name, run.status, run.message, log);
        entry["seeds"].push_back(run.seed);
        entry["statuses"].push_back(std::string(to_string(run.status)));
        std::size_t reach = task.epochs + 1;
        double best = std::numeric_limits<double>::infinity();
        for (const auto& e : run.epochs) {
          best = std::min(best, e.train_loss);
          if (reach == task.epochs + 1 && e.train_accuracy >= 0.95) reach = e.epoch;
        }
        entry["best_loss"].push_back(json_number(best));
        entry["iters_to_threshold"].push_back(reach);
        if (run.status != RunStatus::completed || run.epochs.empty()) {
          status = RunStatus::diverged;
          entry["final_loss"].push_back(nullptr);
          continue;
        }
        const auto& last = run.epochs.back();
        entry["final_loss"].push_back(json_number(last.train_loss));
        losses.push_back(last.train_loss);
        train_acc.push_back(last.train_accuracy);
        test_acc.push_back(last.test_accuracy);
        for (std::size_t e = 0; e < run.epochs.size(); ++e) mean_curve[e] += run.epochs[e].train_loss;
        ++completed;
      }
      const auto [loss_mu, loss_sd] = mean_and_sample_std(losses);
      const auto [tr_mu, tr_sd] = mean_and_sample_std(train_acc);
      const auto [te_mu, te_sd] = mean_and_sample_std(test_acc);
      entry["mean"] = json_number(loss_mu);
      entry["std"] = json_number(loss_sd);
      entry["train_accuracy"] = {{"mean", json_number(tr_mu)}, {"std", json_number(tr_sd)}};
      entry["test_accuracy"] = {{"mean", json_number(te_mu)}, {"std", json_number(te_sd)}};
      entry["status"] = std::string(to_string(status));
      entry["threshold"] = {{"kind", "train_accuracy"}, {"value", 0.95}};
      per[opt.name] = entry;
      log << "mlp " << opt.name << ": train loss " << format_double(loss_mu) << " +- "
          << format_double(loss_sd) << ", train acc " << format_double(tr_mu) << '\n';
      if (completed > 0) {
        svg::Series s;
        s.name = opt.name;
        for (std::size_t e = 0; e < task.epochs; ++e) {
          s.xs.push_back(static_cast<double>(e + 1));
          s.ys.push_back(mean_curve[e] / static_cast<double>(completed));
        }
        curves.push_back(std::move(s));
      }
    }
    svg::PlotOptions po{"MLP: mean train loss vs epoch", "epoch", "loss", false, options.log_scale};
    write_artifact(options.out / "mlp_loss.svg", svg::line_plot(curves, po));
    write_artifact(options.out / "mlp_summary.json", summary.dump(2) + "\n");
    return finish(diverged, options, log);
  });
}

// --- gradcheck ------------------------------------------------------------------

std::vector<GradcheckResult> run_gradcheck(std::uint64_t seed) {
  Rng rng(seed);
  std::vector<GradcheckResult> results;
  constexpr double kObjectiveTol = 1e-5;
  constexpr double kMlpTol = 1e-4;
  constexpr double kBranchExclusion = 1e-3;

  auto check_objective = [&](const Objective& obj, const std::string& label, std::size_t points) {
    GradcheckResult r{label, 0.0, kObjectiveTol, 0};
    while (r.points < points) {
      ParamVector x(obj.dim);
      for (std::size_t i = 0; i < obj.dim; ++i) x[i] = rng.uniform(obj.domain[i].lo, obj.domain[i].hi);
      const bool near_branch = std::any_of(x.begin(), x.end(), [&](double xi) {
        return std::any_of(obj.nonsmooth_points.begin(), obj.nonsmooth_points.end(),
                           [&](double b) { return std::abs(xi - b) < kBranchExclusion; });
      });
      if (near_branch) continue;
      const double err = gradient_relative_error(obj.grad(x), finite_diff_grad(obj.eval, x));
      r.worst_relative_error = std::max(r.worst_relative_error, err);
      ++r.points;
    }
    results.push_back(r);
  };

  check_objective(make_f1(), "f1", 200);
  check_objective(make_f2(), "f2", 200);
  check_objective(make_f3(), "f3", 200);
  for (std::size_t n : {2u, 5u, 10u}) {
    check_objective(make_rosenbrock(n), "rosenbrock_" + std::to_string(n), 100);
  }
  ParamVector center(10);
  for (double& c : center) c = rng.uniform(-1.0, 1.0);
  check_objective(make_quadratic(center), "quadratic_10", 100);

  for (LossKind loss : {LossKind::softmax_cross_entropy, LossKind::mse}) {
    const MlpSpec spec{{4, 8, 8, 3}, Activation::tanh, loss};
    Dataset data;
    data.n_features = 4;
    for (std::size_t r = 0; r < 16; ++r) {
      for (std::size_t j = 0; j < 4; ++j) data.features.push_back(rng.normal());
      data.labels.push_back(static_cast<int>(r % 3));
    }
    GradcheckResult r{loss == LossKind::mse ? "mlp_4_8_8_3_mse" : "mlp_4_8_8_3_xent", 0.0, kMlpTol,
                      0};
    for (int trial = 0; trial < 3; ++trial) {
      const MlpParams params = init_params(spec, rng);
      const auto analytic = loss_and_grad(params, spec, data).grad;
      const auto numeric = finite_diff_grad(
          [&](const ParamVector& flat) {
            return loss_only(MlpParams{flat, params.layout}, spec, data);
          },
          params.flat);
      r.worst_relative_error =
          std::max(r.worst_relative_error, gradient_relative_error(analytic, numeric));
      ++r.points;
    }
    results.push_back(r);
  }
  return results;
}

int cmd_gradcheck(const CliOptions& options, std::ostream& log) {
  return guarded(log, [&] {
    const std::uint64_t seed = options.seeds && !options.seeds->empty() ? options.seeds->front() : 0;
    const auto results = run_gradcheck(seed);
    bool ok = true;
    std::string csv = "target,points,worst_relative_error,tolerance,passed\n";
    for (const auto& r : results) {
      log << (r.passed() ? "[ok]   " : "[FAIL] ") << r.target << ": worst relative error "
          << format_double(r.worst_relative_error) << " (tol " << format_double(r.tolerance)
          << ", " << r.points << " points)\n";
      csv += r.target + ',' + std::to_string(r.points) + ',' +
             format_double(r.worst_relative_error) + ',' + format_double(r.tolerance) + ',' +
             (r.passed() ? "true" : "false") + '\n';
      ok = ok && r.passed();
    }
    prepare_out(options);
    write_artifact(options.out / "gradcheck.csv", csv);
    return ok ? static_cast<int>(kSuccess) : static_cast<int>(kCheckFailure);
  });
}

// --- plot -------------------------------------------------------------------------

int cmd_plot(const CliOptions& options, std::ostream& log) {
  return guarded(log, [&] {
    if (options.inputs.empty()) throw ConfigError("plot needs at least one trajectory file");
    std::vector<svg::Series> series;
    for (const auto& path : options.inputs) {
      std::ifstream in(path);
      if (!in) throw ConfigError("cannot open " + path.string());
      Trajectory traj;
      try {
        traj = read_trajectory_csv(in);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(path.string() + ": " + e.what());
      }
      series.push_back(loss_series(traj, path.stem().string()));
    }
    prepare_out(options);
    svg::PlotOptions po{"loss vs iteration", "iteration", "loss", false, options.log_scale};
    write_artifact(options.out / "plot.svg", svg::line_plot(series, po));
    log << "wrote " << (options.out / "plot.svg").string() << " (" << series.size()
        << " series)\n";
    return static_cast<int>(kSuccess);
  });
}

}  // namespace angular::cli
