#include "angular/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

namespace angular {

std::string_view to_string(RunStatus status) noexcept {
  return status == RunStatus::completed ? "completed" : "diverged";
}

std::string_view to_string(ThetaStarSource source) noexcept {
  switch (source) {
    case ThetaStarSource::provided: return "provided";
    case ThetaStarSource::known_minimum: return "known_minimum";
    case ThetaStarSource::best_found: return "best_found";
  }
  return "unknown";
}

void ExperimentSpec::validate() const {
  if (iterations < 1) throw std::invalid_argument("ExperimentSpec: iterations must be >= 1");
  if (optimizers.empty()) throw std::invalid_argument("ExperimentSpec: no optimizers");
  if (seeds.empty()) throw std::invalid_argument("ExperimentSpec: no seeds");
  for (const auto& opt : optimizers) opt.config.validate();
  for (const auto& m : lr_milestones) {
    if (m.iteration < 1 || !(m.divisor > 0.0)) {
      throw std::invalid_argument("ExperimentSpec: milestones need iteration >= 1, divisor > 0");
    }
  }
  const Objective obj = objective();
  if (theta0 && theta0->size() != obj.dim) {
    throw std::invalid_argument("ExperimentSpec: theta0 dimension does not match task");
  }
}

Objective ExperimentSpec::objective() const { return make_objective(task, dim, center); }

namespace {

double apply_milestones(double alpha, std::size_t t, const std::vector<LrMilestone>& milestones) {
  for (const auto& m : milestones) {
    if (m.iteration == t) alpha /= m.divisor;
  }
  return alpha;
}

ParamVector draw_start(const Objective& objective, std::uint64_t seed) {
  Rng rng(seed);
  ParamVector theta(objective.dim);
  for (std::size_t i = 0; i < objective.dim; ++i) {
    theta[i] = rng.uniform(objective.domain[i].lo, objective.domain[i].hi);
  }
  return theta;
}

}  // namespace

Trajectory run_single(const Objective& objective, const NamedOptimizer& optimizer,
                      const ParamVector& theta0, std::size_t iterations,
                      const std::vector<LrMilestone>& milestones, bool record_params,
                      std::uint64_t seed) {
  require_same_size(theta0.size(), objective.dim, "run_single (theta0)");
  Trajectory traj;
  traj.optimizer = optimizer.name;
  traj.seed = seed;
  traj.budget = iterations;
  traj.theta0 = theta0;
  traj.initial_loss = objective.eval(theta0);
  traj.rows.reserve(iterations);

  OptimizerState state = make_state(optimizer.config, theta0.size());
  ParamVector theta = theta0;
  for (std::size_t t = 1; t <= iterations; ++t) {
    state.alpha_t = apply_milestones(state.alpha_t, t, milestones);
    ParamVector next;
    try {
      next = step(state, optimizer.config, theta, objective.grad(theta));
    } catch (const NonFiniteError& e) {
      traj.status = RunStatus::diverged;
      traj.message = e.what();
      break;
    }
    TrajectoryRow row;
    row.t = t;
    row.loss = objective.eval(next);
    row.alpha = state.alpha_t;
    row.phi_mean = mean(state.last_scale);
    double sq = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i) sq += (next[i] - theta[i]) * (next[i] - theta[i]);
    row.step_norm = std::sqrt(sq);
    if (record_params) row.theta = next;
    theta = std::move(next);
    if (!std::isfinite(row.loss)) {
      traj.status = RunStatus::diverged;
      traj.message = "non-finite loss after step " + std::to_string(t) + " (rule " +
                     std::string(to_string(optimizer.config.rule)) + ")";
      break;
    }
    traj.rows.push_back(std::move(row));
  }
  traj.final_theta = theta;
  return traj;
}

std::size_t worker_count() {
  if (const char* env = std::getenv("ANGULAR_OPTIM_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && n > 0) return static_cast<std::size_t>(n);
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& task) {
  const std::size_t workers = std::min(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            task(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
          }
        }
      });
    }
  }
  if (first_error) std::rethrow_exception(first_error);
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const Objective objective = spec.objective();
  const std::size_t n_seeds = spec.seeds.size();
  std::vector<Trajectory> flat(spec.optimizers.size() * n_seeds);
  parallel_for(flat.size(), [&](std::size_t k) {
    const auto& opt = spec.optimizers[k / n_seeds];
    const std::uint64_t seed = spec.seeds[k % n_seeds];
    const ParamVector theta0 = spec.theta0 ? *spec.theta0 : draw_start(objective, seed);
    flat[k] = run_single(objective, opt, theta0, spec.iterations, spec.lr_milestones,
                         spec.record_params, seed);
  });
  ExperimentResult result;
  for (std::size_t k = 0; k < flat.size(); ++k) {
    const auto& name = spec.optimizers[k / n_seeds].name;
    if (k % n_seeds == 0 && result.count(name) != 0) {
      throw std::invalid_argument("ExperimentSpec: duplicate optimizer name " + name);
    }
    result[name].push_back(std::move(flat[k]));
  }
  return result;
}

RegretRecord compute_regret(const Trajectory& trajectory, const Objective& objective,
                            const std::optional<ParamVector>& theta_star) {
  RegretRecord rec;
  if (theta_star) {
    require_same_size(theta_star->size(), objective.dim, "compute_regret (theta*)");
    rec.theta_star = *theta_star;
    rec.source = ThetaStarSource::provided;
  } else if (const KnownMinimum* best = objective.global_minimum()) {
    rec.theta_star = best->location;
    rec.source = ThetaStarSource::known_minimum;
  } else {
    const TrajectoryRow* best_row = nullptr;
    for (const auto& row : trajectory.rows) {
      if (row.theta.empty()) {
        throw std::invalid_argument("compute_regret: best-found theta* needs recorded params");
      }
      if (best_row == nullptr || row.loss < best_row->loss) best_row = &row;
    }
    if (best_row == nullptr) throw std::invalid_argument("compute_regret: empty trajectory");
    rec.theta_star = best_row->theta;
    rec.source = ThetaStarSource::best_found;
  }
  if (!trajectory.final_theta.empty()) {
    require_same_size(trajectory.final_theta.size(), objective.dim, "compute_regret (trajectory)");
  }
  rec.f_star = objective.eval(rec.theta_star);
  rec.cumulative.reserve(trajectory.rows.size());
  rec.average.reserve(trajectory.rows.size());
  double total = 0.0;
  for (const auto& row : trajectory.rows) {
    total += row.loss - rec.f_star;
    rec.cumulative.push_back(total);
    rec.average.push_back(total / static_cast<double>(row.t));
  }
  return rec;
}

ParamVector best_found_theta(const ExperimentResult& result, const Objective& objective) {
  const ParamVector* best = nullptr;
  double best_loss = std::numeric_limits<double>::infinity();
  for (const auto& [name, runs] : result) {
    for (const auto& traj : runs) {
      for (const auto& row : traj.rows) {
        if (!row.theta.empty() && row.loss < best_loss) {
          best_loss = row.loss;
          best = &row.theta;
        }
      }
    }
  }
  if (best == nullptr) throw std::invalid_argument("best_found_theta: no recorded parameters");
  require_same_size(best->size(), objective.dim, "best_found_theta");
  return *best;
}

std::map<std::string, Trajectory> rosenbrock_trace(const std::vector<NamedOptimizer>& optimizers,
                                                   const ParamVector& theta0,
                                                   std::size_t iterations) {
  ExperimentSpec spec;
  spec.task = "rosenbrock";
  spec.dim = theta0.size();
  spec.optimizers = optimizers;
  spec.iterations = iterations;
  spec.theta0 = theta0;
  spec.record_params = true;
  ExperimentResult result = run_experiment(spec);
  std::map<std::string, Trajectory> out;
  for (auto& [name, runs] : result) out.emplace(name, std::move(runs.front()));
  return out;
}

Grid grid_eval(const Objective& objective, Interval x_range, Interval y_range, std::size_t nx,
               std::size_t ny) {
  if (objective.dim != 2) throw std::invalid_argument("grid_eval: objective must be 2-D");
  if (nx < 2 || ny < 2) throw std::invalid_argument("grid_eval: resolution must be >= 2");
  auto axis = [](Interval r, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
      v[i] = r.lo + (r.hi - r.lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    v.back() = r.hi;
    return v;
  };
  Grid grid;
  grid.xs = axis(x_range, nx);
  grid.ys = axis(y_range, ny);
  grid.values.reserve(nx * ny);
  for (double y : grid.ys) {
    for (double x : grid.xs) grid.values.push_back(objective.eval({x, y}));
  }
  return grid;
}

bool Threshold::reached(const TrajectoryRow& row) const {
  if (kind == Kind::loss) return row.loss <= value;
  if (row.theta.empty()) return false;
  double sq = 0.0;
  for (std::size_t i = 0; i < row.theta.size(); ++i) {
    sq += (row.theta[i] - target[i]) * (row.theta[i] - target[i]);
  }
  return std::sqrt(sq) <= value;
}

Threshold default_threshold(const Objective& objective) {
  Threshold th;
  if (objective.name == "rosenbrock" && objective.global_minimum() != nullptr) {
    th.kind = Threshold::Kind::distance;
    th.value = 0.1;
    th.target = objective.global_minimum()->location;
  }
  return th;
}

std::pair<double, double> mean_and_sample_std(const std::vector<double>& values) {
  if (values.empty()) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    return {nan, nan};
  }
  const double mu = mean(values);
  if (values.size() == 1) return {mu, 0.0};
  double ss = 0.0;
  for (double x : values) ss += (x - mu) * (x - mu);
  return {mu, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

RunSummary aggregate(const std::vector<Trajectory>& trajectories, const Threshold& threshold) {
  if (trajectories.empty()) throw std::invalid_argument("aggregate: no trajectories");
  RunSummary summary;
  summary.optimizer = trajectories.front().optimizer;
  std::vector<double> finals;
  for (const auto& traj : trajectories) {
    SeedSummary s;
    s.seed = traj.seed;
    s.status = traj.status;
    s.final_theta = traj.final_theta;
    s.final_loss = traj.rows.empty() ? traj.initial_loss : traj.rows.back().loss;
    s.best_loss = traj.initial_loss;
    s.iters_to_threshold = traj.budget + 1;
    for (const auto& row : traj.rows) {
      s.best_loss = std::min(s.best_loss, row.loss);
      if (s.iters_to_threshold == traj.budget + 1 && threshold.reached(row)) {
        s.iters_to_threshold = row.t;
      }
    }
    if (s.status == RunStatus::completed) {
      finals.push_back(s.final_loss);
    } else {
      summary.status = RunStatus::diverged;
    }
    summary.seeds.push_back(std::move(s));
  }
  std::tie(summary.mean, summary.std) = mean_and_sample_std(finals);
  return summary;
}

double tail_oscillation(const Trajectory& trajectory, std::size_t window) {
  const auto& rows = trajectory.rows;
  if (window == 0 || window > rows.size()) {
    throw std::invalid_argument("tail_oscillation: window must be in [1, trajectory length]");
  }
  const bool use_theta = rows.back().theta.size() == 1;
  std::vector<double> tail;
  tail.reserve(window);
  for (std::size_t i = rows.size() - window; i < rows.size(); ++i) {
    tail.push_back(use_theta ? rows[i].theta[0] : rows[i].loss);
  }
  const double mu = mean(tail);
  double ss = 0.0;
  for (double x : tail) ss += (x - mu) * (x - mu);
  return std::sqrt(ss / static_cast<double>(tail.size()));
}

// --- MLP training -----------------------------------------------------------

MlpData make_mlp_data(const MlpTask& task) {
  task.spec.validate();
  if (task.spec.layer_sizes.front() != 2 || task.spec.layer_sizes.back() != task.classes) {
    throw std::invalid_argument("MlpTask: blobs need input width 2 and output width = classes");
  }
  Rng rng(task.data_seed);
  MlpData data;
  data.train = make_blobs(rng, task.n_per_class, task.classes, task.separation);
  data.train.split = Split::train;
  if (task.test_per_class > 0) {
    data.test = make_blobs(rng, task.test_per_class, task.classes, task.separation);
    data.test.split = Split::test;
  }
  return data;
}

MlpRun train_mlp(const MlpTask& task, const MlpData& data, const NamedOptimizer& optimizer,
                 std::uint64_t seed) {
  if (task.batch_size == 0) throw std::invalid_argument("MlpTask: batch_size must be >= 1");
  MlpRun run;
  run.optimizer = optimizer.name;
  run.seed = seed;
  Rng rng(seed);
  MlpParams params = init_params(task.spec, rng);
  OptimizerState state = make_state(optimizer.config, params.flat.size());

  std::vector<std::size_t> order(data.train.rows());
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t epoch = 1; epoch <= task.epochs; ++epoch) {
    state.alpha_t = apply_milestones(state.alpha_t, epoch, task.lr_milestones);
    rng.shuffle(order);
    double batch_loss_sum = 0.0;
    std::size_t batches = 0;
    try {
      for (std::size_t start = 0; start < order.size(); start += task.batch_size) {
        const std::size_t stop = std::min(order.size(), start + task.batch_size);
        const std::span<const std::size_t> batch(order.data() + start, stop - start);
        const LossAndGrad lg = loss_and_grad(params, task.spec, data.train, batch);
        batch_loss_sum += lg.loss;
        ++batches;
        params.flat = step(state, optimizer.config, params.flat, lg.grad);
      }
    } catch (const NonFiniteError& e) {
      run.status = RunStatus::diverged;
      run.message = e.what();
      break;
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.batch_loss_mean = batch_loss_sum / static_cast<double>(batches);
    rec.train_loss = loss_only(params, task.spec, data.train);
    rec.train_accuracy = accuracy(params, task.spec, data.train);
    if (data.test.rows() > 0) {
      rec.test_loss = loss_only(params, task.spec, data.test);
      rec.test_accuracy = accuracy(params, task.spec, data.test);
    }
    rec.alpha = state.alpha_t;
    run.epochs.push_back(rec);
  }
  return run;
}

std::map<std::string, std::vector<MlpRun>> run_mlp_experiment(
    const MlpTask& task, const std::vector<NamedOptimizer>& optimizers,
    const std::vector<std::uint64_t>& seeds) {
  if (optimizers.empty() || seeds.empty()) {
    throw std::invalid_argument("run_mlp_experiment: need optimizers and seeds");
  }
  for (const auto& opt : optimizers) opt.config.validate();
  const MlpData data = make_mlp_data(task);
  std::vector<MlpRun> flat(optimizers.size() * seeds.size());
  parallel_for(flat.size(), [&](std::size_t k) {
    flat[k] = train_mlp(task, data, optimizers[k / seeds.size()], seeds[k % seeds.size()]);
  });
  std::map<std::string, std::vector<MlpRun>> out;
  for (std::size_t k = 0; k < flat.size(); ++k) {
    out[optimizers[k / seeds.size()].name].push_back(std::move(flat[k]));
  }
  return out;
}

}  // namespace angular
