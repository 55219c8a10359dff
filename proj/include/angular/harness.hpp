#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "angular/models.hpp"
#include "angular/numerics.hpp"
#include "angular/objectives.hpp"
#include "angular/optimizers.hpp"

namespace angular {

struct NamedOptimizer {
  std::string name;
  OptimizerConfig config;
};

/// Divides the learning rate by `divisor` immediately before step
/// `iteration` (1-based; epochs for MLP training).
struct LrMilestone {
  std::size_t iteration = 0;
  double divisor = 10.0;
};

struct ExperimentSpec {
  /// Objective name understood by make_objective().
  std::string task = "f1";
  std::size_t dim = 1;
  /// Quadratic center; ignored by other tasks.
  ParamVector center;
  std::vector<NamedOptimizer> optimizers;
  std::size_t iterations = 300;
  std::vector<std::uint64_t> seeds{0};
  /// Fixed start. When absent each seed draws uniformly from the domain.
  std::optional<ParamVector> theta0;
  bool record_params = true;
  std::vector<LrMilestone> lr_milestones;

  void validate() const;
  Objective objective() const;
};

enum class RunStatus { completed, diverged };
std::string_view to_string(RunStatus status) noexcept;

/// State after step t.
struct TrajectoryRow {
  std::size_t t = 0;
  double loss = 0.0;
  /// Learning rate used by step t.
  double alpha = 0.0;
  double phi_mean = 1.0;
  double step_norm = 0.0;
  /// Empty unless parameter recording is on.
  ParamVector theta;
};

struct Trajectory {
  std::string optimizer;
  std::uint64_t seed = 0;
  std::size_t budget = 0;
  ParamVector theta0;
  double initial_loss = 0.0;
  ParamVector final_theta;
  std::vector<TrajectoryRow> rows;
  RunStatus status = RunStatus::completed;
  std::string message;
};

/// Keyed by optimizer name; one trajectory per seed in spec order.
using ExperimentResult = std::map<std::string, std::vector<Trajectory>>;

/// Runs one optimizer from theta0. A non-finite step or loss ends the run
/// with status diverged; the rows before it are kept.
Trajectory run_single(const Objective& objective, const NamedOptimizer& optimizer,
                      const ParamVector& theta0, std::size_t iterations,
                      const std::vector<LrMilestone>& milestones, bool record_params,
                      std::uint64_t seed = 0);

ExperimentResult run_experiment(const ExperimentSpec& spec);

/// Worker threads for independent runs: ANGULAR_OPTIM_THREADS when set and
/// positive, otherwise hardware concurrency.
std::size_t worker_count();

/// Runs task(i) for i in [0, n) on up to worker_count() threads. The first
/// exception thrown by any task is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& task);

enum class ThetaStarSource { provided, known_minimum, best_found };
std::string_view to_string(ThetaStarSource source) noexcept;

struct RegretRecord {
  /// R(t) for t = 1..T.
  std::vector<double> cumulative;
  /// R(t) / t.
  std::vector<double> average;
  ParamVector theta_star;
  double f_star = 0.0;
  ThetaStarSource source = ThetaStarSource::known_minimum;
};

/// R(T) = sum_t [f(theta_t) - f(theta*)] over the trajectory rows. Without
/// an explicit theta* the objective's global minimum is used, and failing
/// that the best recorded iterate.
RegretRecord compute_regret(const Trajectory& trajectory, const Objective& objective,
                            const std::optional<ParamVector>& theta_star = std::nullopt);

/// Lowest-loss recorded iterate across all runs.
ParamVector best_found_theta(const ExperimentResult& result, const Objective& objective);

/// 2-D traces with full parameter snapshots, one per optimizer.
std::map<std::string, Trajectory> rosenbrock_trace(const std::vector<NamedOptimizer>& optimizers,
                                                   const ParamVector& theta0,
                                                   std::size_t iterations);

struct Grid {
  std::vector<double> xs;
  std::vector<double> ys;
  /// values[iy * xs.size() + ix].
  std::vector<double> values;

  double at(std::size_t ix, std::size_t iy) const { return values[iy * xs.size() + ix]; }
};

/// Evaluates a 2-D objective on an inclusive nx-by-ny lattice.
Grid grid_eval(const Objective& objective, Interval x_range, Interval y_range, std::size_t nx,
               std::size_t ny);

struct Threshold {
  enum class Kind { loss, distance };
  Kind kind = Kind::loss;
  double value = 1e-3;
  /// Target point for distance thresholds.
  ParamVector target;

  bool reached(const TrajectoryRow& row) const;
};

/// Loss <= 1e-3 for the scalar functions, distance <= 0.1 to the minimum
/// for Rosenbrock, loss <= 1e-3 otherwise.
Threshold default_threshold(const Objective& objective);

struct SeedSummary {
  std::uint64_t seed = 0;
  double final_loss = 0.0;
  double best_loss = 0.0;
  /// First t meeting the threshold, or budget + 1.
  std::size_t iters_to_threshold = 0;
  ParamVector final_theta;
  RunStatus status = RunStatus::completed;
};

struct RunSummary {
  std::string optimizer;
  std::vector<SeedSummary> seeds;
  /// Mean and sample (n - 1) standard deviation of final loss over
  /// completed seeds. std is 0 for a single seed; both are NaN when no seed
  /// completed.
  double mean = 0.0;
  double std = 0.0;
  RunStatus status = RunStatus::completed;
};

RunSummary aggregate(const std::vector<Trajectory>& trajectories, const Threshold& threshold);

/// Mean and sample standard deviation; std = 0 for one value.
std::pair<double, double> mean_and_sample_std(const std::vector<double>& values);

/// Population standard deviation of theta over the last `window` rows when
/// the run is one-dimensional with recorded parameters, otherwise of loss.
double tail_oscillation(const Trajectory& trajectory, std::size_t window);

// --- MLP training -----------------------------------------------------------

struct MlpTask {
  MlpSpec spec{{2, 16, 3}, Activation::tanh, LossKind::softmax_cross_entropy};
  std::size_t n_per_class = 300;
  std::size_t classes = 3;
  double separation = 4.0;
  std::size_t test_per_class = 100;
  /// Seed of the dataset; run seeds only drive initialisation and shuffling.
  std::uint64_t data_seed = 0;
  std::size_t epochs = 50;
  std::size_t batch_size = 32;
  /// Epoch-based milestones.
  std::vector<LrMilestone> lr_milestones;
};

struct EpochRecord {
  std::size_t epoch = 0;
  /// Mean of the minibatch losses seen during the epoch.
  double batch_loss_mean = 0.0;
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double test_loss = 0.0;
  double test_accuracy = 0.0;
  double alpha = 0.0;
};

struct MlpRun {
  std::string optimizer;
  std::uint64_t seed = 0;
  std::vector<EpochRecord> epochs;
  RunStatus status = RunStatus::completed;
  std::string message;
};

struct MlpData {
  Dataset train;
  Dataset test;
};

MlpData make_mlp_data(const MlpTask& task);

MlpRun train_mlp(const MlpTask& task, const MlpData& data, const NamedOptimizer& optimizer,
                 std::uint64_t seed);

std::map<std::string, std::vector<MlpRun>> run_mlp_experiment(
    const MlpTask& task, const std::vector<NamedOptimizer>& optimizers,
    const std::vector<std::uint64_t>& seeds);

}  // namespace angular
