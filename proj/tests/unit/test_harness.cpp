#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "angular/harness.hpp"
#include "angular/report.hpp"

using namespace angular;

namespace {

NamedOptimizer named(const std::string& name, Rule rule, double alpha,
                     AngleVariant variant = AngleVariant::cos) {
  NamedOptimizer o;
  o.name = name;
  o.config.rule = rule;
  o.config.alpha = alpha;
  o.config.angle_variant = variant;
  return o;
}

ExperimentSpec toy_f1_spec() {
  ExperimentSpec spec;
  spec.task = "f1";
  spec.iterations = 300;
  spec.theta0 = ParamVector{-1.0};
  for (auto o : {named("sgdm", Rule::sgdm, 0.1), named("adam", Rule::adam, 0.1),
                 named("angulargrad_cos", Rule::angulargrad, 0.1)}) {
    o.config.beta1 = 0.95;
    o.config.momentum_gamma = 0.95;
    spec.optimizers.push_back(o);
  }
  return spec;
}

Trajectory synthetic(const std::vector<double>& thetas) {
  Trajectory t;
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    TrajectoryRow row;
    row.t = i + 1;
    row.theta = {thetas[i]};
    row.loss = thetas[i] * thetas[i];
    t.rows.push_back(row);
  }
  t.budget = thetas.size();
  t.initial_loss = thetas.empty() ? 0.0 : thetas.front() * thetas.front() + 1.0;
  t.final_theta = {thetas.empty() ? 0.0 : thetas.back()};
  return t;
}

}  // namespace

TEST_CASE("spec validation") {
  ExperimentSpec spec = toy_f1_spec();
  CHECK_NOTHROW(spec.validate());
  spec.iterations = 0;
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec = toy_f1_spec();
  spec.seeds.clear();
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec = toy_f1_spec();
  spec.optimizers.clear();
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec = toy_f1_spec();
  spec.theta0 = ParamVector{1.0, 2.0};
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
  spec = toy_f1_spec();
  spec.optimizers.push_back(spec.optimizers.front());
  CHECK_THROWS_AS(run_experiment(spec), std::invalid_argument);
}

TEST_CASE("run_experiment on F1") {
  const ExperimentSpec spec = toy_f1_spec();
  const ExperimentResult a = run_experiment(spec);
  const ExperimentResult b = run_experiment(spec);
  CHECK(a.size() == 3);
  for (const auto& [name, runs] : a) {
    REQUIRE(runs.size() == 1);
    const Trajectory& t = runs.front();
    CHECK(t.rows.size() == 300);
    CHECK(t.status == RunStatus::completed);
    CHECK(t.theta0 == ParamVector{-1.0});
    CHECK(t.initial_loss == doctest::Approx(0.49));
    for (std::size_t i = 0; i < t.rows.size(); ++i) CHECK(t.rows[i].t == i + 1);
    CHECK(trajectory_csv(t) == trajectory_csv(b.at(name).front()));
  }
  ExperimentSpec one = spec;
  one.iterations = 1;
  for (const auto& [name, runs] : run_experiment(one)) CHECK(runs.front().rows.size() == 1);
}

TEST_CASE("seeds drive random starts") {
  ExperimentSpec spec;
  spec.task = "rosenbrock";
  spec.dim = 3;
  spec.iterations = 20;
  spec.seeds = {4, 4, 5};
  spec.optimizers = {named("adam", Rule::adam, 1e-2)};
  const auto runs = run_experiment(spec).at("adam");
  REQUIRE(runs.size() == 3);
  CHECK(runs[0].theta0 == runs[1].theta0);
  CHECK(runs[0].theta0 != runs[2].theta0);
  CHECK(trajectory_csv(runs[0]) == trajectory_csv(runs[1]));
  for (double x : runs[2].theta0) {
    CHECK(x >= -2.048);
    CHECK(x <= 2.048);
  }
}

TEST_CASE("parallel execution does not change results") {
  ExperimentSpec spec = toy_f1_spec();
  spec.task = "f3";
  spec.seeds = {0, 1, 2};
  spec.theta0.reset();
  setenv("ANGULAR_OPTIM_THREADS", "1", 1);
  CHECK(worker_count() == 1);
  const auto serial = run_experiment(spec);
  setenv("ANGULAR_OPTIM_THREADS", "4", 1);
  CHECK(worker_count() == 4);
  const auto parallel = run_experiment(spec);
  setenv("ANGULAR_OPTIM_THREADS", "0", 1);
  CHECK(worker_count() >= 1);
  unsetenv("ANGULAR_OPTIM_THREADS");
  for (const auto& [name, runs] : serial) {
    for (std::size_t i = 0; i < runs.size(); ++i) {
      CHECK(trajectory_csv(runs[i]) == trajectory_csv(parallel.at(name)[i]));
    }
  }
}

TEST_CASE("parallel_for rethrows") {
  setenv("ANGULAR_OPTIM_THREADS", "3", 1);
  std::vector<int> hits(10, 0);
  parallel_for(10, [&](std::size_t i) { hits[i] = 1; });
  CHECK(std::count(hits.begin(), hits.end(), 1) == 10);
  CHECK_THROWS_AS(parallel_for(10,
                               [](std::size_t i) {
                                 if (i == 7) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
  unsetenv("ANGULAR_OPTIM_THREADS");
}

TEST_CASE("divergence is recorded per run") {
  ExperimentSpec spec;
  spec.task = "rosenbrock";
  spec.dim = 2;
  spec.theta0 = ParamVector{-2.0, 2.0};
  spec.iterations = 200;
  spec.optimizers = {named("wild", Rule::sgd, 1.0), named("calm", Rule::adam, 1e-3)};
  const auto result = run_experiment(spec);
  const Trajectory& wild = result.at("wild").front();
  CHECK(wild.status == RunStatus::diverged);
  CHECK(wild.rows.size() < 200);
  CHECK_FALSE(wild.message.empty());
  CHECK(result.at("calm").front().status == RunStatus::completed);
  CHECK(result.at("calm").front().rows.size() == 200);
  const RunSummary s = aggregate(result.at("wild"), default_threshold(spec.objective()));
  CHECK(s.status == RunStatus::diverged);
  CHECK(s.seeds.front().status == RunStatus::diverged);
}

TEST_CASE("learning-rate milestones") {
  ExperimentSpec spec;
  spec.task = "quadratic";
  spec.dim = 2;
  spec.center = {0.5, -0.5};
  spec.theta0 = ParamVector{0.0, 0.0};
  spec.iterations = 30;
  spec.lr_milestones = {{10, 10.0}, {20, 4.0}};
  spec.optimizers = {named("sgd", Rule::sgd, 0.01), named("adam", Rule::adam, 0.01)};
  for (const auto& [name, runs] : run_experiment(spec)) {
    const auto& rows = runs.front().rows;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const double ratio = rows[i - 1].alpha / rows[i].alpha;
      if (rows[i].t == 10) CHECK(ratio == doctest::Approx(10.0).epsilon(1e-15));
      else if (rows[i].t == 20) CHECK(ratio == doctest::Approx(4.0).epsilon(1e-15));
      else CHECK(ratio == 1.0);
    }
    CHECK(rows.front().alpha == 0.01);
  }
}

TEST_CASE("trajectory rows") {
  ExperimentSpec spec = toy_f1_spec();
  spec.iterations = 5;
  spec.record_params = false;
  const auto result = run_experiment(spec);
  const auto& rows = result.at("angulargrad_cos").front().rows;
  CHECK(rows.front().theta.empty());
  CHECK(rows.front().phi_mean == doctest::Approx(0.5 * std::tanh(1.0) + 0.5));
  for (const auto& row : rows) {
    CHECK(row.phi_mean >= 0.5);
    CHECK(row.phi_mean <= 1.0);
    CHECK(row.step_norm > 0.0);
  }
  CHECK(result.at("adam").front().rows.front().phi_mean == 1.0);
}

TEST_CASE("compute_regret") {
  const Objective q = make_quadratic({1.0, -1.0});
  SUBCASE("pinned at the minimum") {
    Trajectory t;
    for (std::size_t i = 1; i <= 10; ++i) t.rows.push_back({i, 0.0, 0.1, 1.0, 0.0, {1.0, -1.0}});
    const RegretRecord r = compute_regret(t, q);
    CHECK(r.cumulative.back() == 0.0);
    CHECK(r.source == ThetaStarSource::known_minimum);
  }
  SUBCASE("constant excess") {
    Trajectory t;
    for (std::size_t i = 1; i <= 8; ++i) t.rows.push_back({i, 0.25, 0.1, 1.0, 0.0, {}});
    const RegretRecord r = compute_regret(t, q);
    CHECK(r.cumulative.back() == doctest::Approx(0.25 * 8));
    for (double avg : r.average) CHECK(avg == doctest::Approx(0.25));
  }
  SUBCASE("explicit and best-found theta*") {
    Trajectory t = synthetic({2.0, 1.0, 0.5, 0.75});
    const Objective f = make_f1();
    const RegretRecord provided = compute_regret(t, f, ParamVector{0.0});
    CHECK(provided.source == ThetaStarSource::provided);
    CHECK(provided.f_star == doctest::Approx(0.09));
    CHECK_THROWS_AS(compute_regret(t, f, ParamVector{0.0, 1.0}), std::invalid_argument);
    Objective no_min = f;
    no_min.known_minima.clear();
    const RegretRecord best = compute_regret(t, no_min);
    CHECK(best.source == ThetaStarSource::best_found);
    CHECK(best.theta_star == ParamVector{0.5});
  }
  SUBCASE("dimension mismatch") {
    Trajectory t = synthetic({1.0, 2.0});
    CHECK_THROWS_AS(compute_regret(t, q), std::invalid_argument);
  }
}

TEST_CASE("regret on the convex quadratic") {
  ExperimentSpec spec;
  spec.task = "quadratic";
  spec.dim = 10;
  Rng rng(0);
  for (int i = 0; i < 10; ++i) spec.center.push_back(rng.uniform(-1.0, 1.0));
  spec.theta0 = ParamVector(10, 0.0);
  spec.iterations = 1000;
  spec.record_params = false;
  for (auto o : {named("sgd", Rule::sgd, 0.01), named("sgdm", Rule::sgdm, 0.01),
                 named("rmsprop", Rule::rmsprop, 0.01), named("adam", Rule::adam, 0.01),
                 named("adamw", Rule::adamw, 0.01), named("radam", Rule::radam, 0.01),
                 named("diffgrad", Rule::diffgrad, 0.01), named("adabelief", Rule::adabelief, 0.01),
                 named("ag_cos", Rule::angulargrad, 0.01),
                 named("ag_tan", Rule::angulargrad, 0.01, AngleVariant::tan)}) {
    spec.optimizers.push_back(o);
  }
  const Objective obj = spec.objective();
  for (const auto& [name, runs] : run_experiment(spec)) {
    CAPTURE(name);
    const RegretRecord r = compute_regret(runs.front(), obj);
    CHECK(std::is_sorted(r.cumulative.begin(), r.cumulative.end()));
    if (name.rfind("ag_", 0) == 0) CHECK(r.average[999] < r.average[499]);
  }
}

TEST_CASE("best_found_theta") {
  ExperimentResult result;
  result["a"] = {synthetic({3.0, 2.0})};
  result["b"] = {synthetic({-0.5, 0.25, 1.0})};
  const Objective q = make_quadratic({0.0});
  CHECK(best_found_theta(result, q) == ParamVector{0.25});
}

TEST_CASE("rosenbrock_trace from the minimum stays put") {
  std::vector<NamedOptimizer> opts = {
      named("sgd", Rule::sgd, 1e-3),         named("rmsprop", Rule::rmsprop, 1e-3),
      named("adam", Rule::adam, 1e-3),       named("adamw", Rule::adamw, 1e-3),
      named("diffgrad", Rule::diffgrad, 1e-3), named("adabelief", Rule::adabelief, 1e-3),
      named("ag_cos", Rule::angulargrad, 1e-3),
      named("ag_tan", Rule::angulargrad, 1e-3, AngleVariant::tan)};
  const auto traces = rosenbrock_trace(opts, {1.0, 1.0}, 500);
  CHECK(traces.size() == opts.size());
  for (const auto& [name, t] : traces) {
    CHECK(t.rows.size() == 500);
    for (const auto& row : t.rows) {
      REQUIRE(row.theta.size() == 2);
      CHECK(std::abs(row.theta[0] - 1.0) <= 1e-6);
      CHECK(std::abs(row.theta[1] - 1.0) <= 1e-6);
    }
  }
  const auto moving = rosenbrock_trace({named("adam", Rule::adam, 1e-2)}, {-2.0, 2.0}, 50);
  CHECK(moving.at("adam").rows.back().theta.size() == 2);
  CHECK(moving.at("adam").rows.back().loss < moving.at("adam").initial_loss);
}

TEST_CASE("grid_eval") {
  const Grid g = grid_eval(make_quadratic({0.0, 0.0}), {-1, 1}, {-1, 1}, 3, 3);
  CHECK(g.xs.size() == 3);
  CHECK(g.ys.size() == 3);
  CHECK(g.values.size() == 9);
  CHECK(g.at(0, 0) == 2.0);
  CHECK(g.at(2, 0) == 2.0);
  CHECK(g.at(0, 2) == 2.0);
  CHECK(g.at(2, 2) == 2.0);
  CHECK(g.at(1, 1) == 0.0);

  const Grid r = grid_eval(make_rosenbrock(2), {-2, 2}, {-1, 3}, 41, 41);
  CHECK(r.xs.size() == 41);
  CHECK(r.ys.size() == 41);
  std::size_t best = 0;
  for (std::size_t i = 1; i < r.values.size(); ++i) {
    if (r.values[i] < r.values[best]) best = i;
  }
  CHECK(r.xs[best % 41] == doctest::Approx(1.0));
  CHECK(r.ys[best / 41] == doctest::Approx(1.0));
  CHECK(r.values[best] == doctest::Approx(0.0).epsilon(1e-12));

  CHECK_THROWS_AS(grid_eval(make_f1(), {-1, 1}, {-1, 1}, 3, 3), std::invalid_argument);
}

TEST_CASE("aggregate") {
  const Threshold th{Threshold::Kind::loss, 1e-3, {}};
  SUBCASE("one seed") {
    const RunSummary s = aggregate({synthetic({1.0, 0.5, 0.01})}, th);
    CHECK(s.std == 0.0);
    CHECK(s.mean == doctest::Approx(1e-4));
    CHECK(s.seeds.front().iters_to_threshold == 3);
    CHECK(s.seeds.front().best_loss == doctest::Approx(1e-4));
  }
  SUBCASE("two seeds use the sample deviation") {
    Trajectory a = synthetic({1.0});
    Trajectory b = synthetic({std::sqrt(3.0)});
    b.seed = 1;
    const RunSummary s = aggregate({a, b}, th);
    CHECK(s.mean == doctest::Approx(2.0));
    CHECK(s.std == doctest::Approx(std::sqrt(2.0)));
    CHECK(s.seeds.front().iters_to_threshold == 2);
  }
  SUBCASE("distance threshold") {
    const Threshold d = default_threshold(make_rosenbrock(2));
    CHECK(d.kind == Threshold::Kind::distance);
    CHECK(d.value == 0.1);
    CHECK(d.target == ParamVector{1.0, 1.0});
    CHECK(default_threshold(make_f2()).kind == Threshold::Kind::loss);
    CHECK(default_threshold(make_f2()).value == 1e-3);
  }
  const auto [m, sd] = mean_and_sample_std({1.0, 3.0});
  CHECK(m == 2.0);
  CHECK(sd == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("tail_oscillation") {
  CHECK(tail_oscillation(synthetic({5, 1, 1, 1, 1}), 4) == 0.0);
  CHECK(tail_oscillation(synthetic({9, 0.3 + 0.1, 0.3 - 0.1, 0.3 + 0.1, 0.3 - 0.1}), 4) ==
        doctest::Approx(0.1));
  const Trajectory t = synthetic({1, 2, 3, 4});
  CHECK(tail_oscillation(t, 4) == doctest::Approx(std::sqrt(1.25)));
  CHECK_THROWS_AS(tail_oscillation(t, 5), std::invalid_argument);
  CHECK_THROWS_AS(tail_oscillation(t, 0), std::invalid_argument);
  Trajectory multi;
  for (std::size_t i = 1; i <= 4; ++i) multi.rows.push_back({i, i % 2 ? 2.0 : 4.0, 0.1, 1.0, 0.0, {0, 0}});
  CHECK(tail_oscillation(multi, 4) == doctest::Approx(1.0));
}

TEST_CASE("mlp training") {
  MlpTask task;
  task.n_per_class = 100;
  task.test_per_class = 30;
  task.epochs = 10;
  const MlpData data = make_mlp_data(task);
  CHECK(data.train.rows() == 300);
  CHECK(data.test.rows() == 90);
  CHECK(data.test.split == Split::test);
  CHECK(data.train.features != data.test.features);

  SUBCASE("epoch loss is non-increasing at alpha 1e-3") {
    MlpTask full;
    full.epochs = 10;
    const MlpData full_data = make_mlp_data(full);
    for (Rule rule : {Rule::sgd, Rule::sgdm, Rule::rmsprop, Rule::adam, Rule::adamw, Rule::radam,
                      Rule::diffgrad, Rule::adabelief, Rule::angulargrad}) {
      for (AngleVariant v : {AngleVariant::cos, AngleVariant::tan}) {
        if (rule != Rule::angulargrad && v == AngleVariant::tan) continue;
        const NamedOptimizer opt = named(std::string(to_string(rule)), rule, 1e-3, v);
        const MlpRun run = train_mlp(full, full_data, opt, 0);
        CAPTURE(opt.name);
        REQUIRE(run.epochs.size() == 10);
        // Whole training set, evaluated after each epoch.
        for (std::size_t e = 1; e < run.epochs.size(); ++e) {
          CHECK(run.epochs[e].train_loss <= run.epochs[e - 1].train_loss);
        }
      }
    }
  }
  SUBCASE("determinism and milestones") {
    MlpTask t = task;
    t.lr_milestones = {{5, 10.0}};
    const NamedOptimizer opt = named("adam", Rule::adam, 1e-2);
    const MlpRun a = train_mlp(t, data, opt, 3);
    const MlpRun b = train_mlp(t, data, opt, 3);
    const MlpRun c = train_mlp(t, data, opt, 4);
    CHECK(mlp_epochs_csv(a) == mlp_epochs_csv(b));
    CHECK(mlp_epochs_csv(a) != mlp_epochs_csv(c));
    CHECK(a.epochs[3].alpha == 1e-2);
    CHECK(a.epochs[4].alpha == doctest::Approx(1e-3));
    CHECK(a.epochs.back().train_accuracy > 0.9);
  }
  SUBCASE("experiment fan-out") {
    MlpTask t = task;
    t.epochs = 2;
    const auto runs = run_mlp_experiment(t, {named("adam", Rule::adam, 1e-2), named("sgd", Rule::sgd, 1e-2)}, {0, 1});
    CHECK(runs.size() == 2);
    CHECK(runs.at("sgd").size() == 2);
    CHECK(runs.at("sgd")[1].seed == 1);
  }
}
