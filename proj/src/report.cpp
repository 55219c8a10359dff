#include "angular/report.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <sstream>
#include <stdexcept>

#include "angular/format.hpp"

namespace angular {

std::string trajectory_csv(const Trajectory& trajectory) {
  std::string out = "t,loss,alpha,phi_mean,step_norm";
  const std::size_t dim = trajectory.rows.empty() ? 0 : trajectory.rows.front().theta.size();
  for (std::size_t i = 0; i < dim; ++i) out += ",theta_" + std::to_string(i);
  out += '\n';
  for (const auto& row : trajectory.rows) {
    out += std::to_string(row.t);
    for (double x : {row.loss, row.alpha, row.phi_mean, row.step_norm}) {
      out += ',';
      out += format_double(x);
    }
    for (double x : row.theta) {
      out += ',';
      out += format_double(x);
    }
    out += '\n';
  }
  return out;
}

Trajectory read_trajectory_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("t,loss,alpha,phi_mean,step_norm", 0) != 0) {
    throw std::invalid_argument("not a trajectory CSV (bad header)");
  }
  const std::size_t columns =
      static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
  Trajectory traj;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(parse_double(cell));
    if (cells.size() != columns) throw std::invalid_argument("trajectory CSV: ragged row");
    TrajectoryRow row;
    row.t = static_cast<std::size_t>(cells[0]);
    row.loss = cells[1];
    row.alpha = cells[2];
    row.phi_mean = cells[3];
    row.step_norm = cells[4];
    row.theta.assign(cells.begin() + 5, cells.end());
    traj.rows.push_back(std::move(row));
  }
  traj.budget = traj.rows.size();
  if (!traj.rows.empty()) traj.final_theta = traj.rows.back().theta;
  return traj;
}

std::string grid_csv(const Grid& grid) {
  std::string out = "x,y,f\n";
  for (std::size_t iy = 0; iy < grid.ys.size(); ++iy) {
    for (std::size_t ix = 0; ix < grid.xs.size(); ++ix) {
      out += format_double(grid.xs[ix]) + ',' + format_double(grid.ys[iy]) + ',' +
             format_double(grid.at(ix, iy)) + '\n';
    }
  }
  return out;
}

std::string regret_csv(const RegretRecord& record) {
  std::string out = "t,regret,avg_regret\n";
  for (std::size_t i = 0; i < record.cumulative.size(); ++i) {
    out += std::to_string(i + 1) + ',' + format_double(record.cumulative[i]) + ',' +
           format_double(record.average[i]) + '\n';
  }
  return out;
}

std::string mlp_epochs_csv(const MlpRun& run) {
  std::string out =
      "epoch,batch_loss_mean,train_loss,train_accuracy,test_loss,test_accuracy,alpha\n";
  for (const auto& e : run.epochs) {
    out += std::to_string(e.epoch);
    for (double x : {e.batch_loss_mean, e.train_loss, e.train_accuracy, e.test_loss,
                     e.test_accuracy, e.alpha}) {
      out += ',';
      out += format_double(x);
    }
    out += '\n';
  }
  return out;
}

nlohmann::json json_number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return x;
}

nlohmann::json summary_json(const RunSummary& summary) {
  nlohmann::json j;
  auto& final_loss = j["final_loss"] = nlohmann::json::array();
  auto& best_loss = j["best_loss"] = nlohmann::json::array();
  auto& iters = j["iters_to_threshold"] = nlohmann::json::array();
  auto& thetas = j["final_theta"] = nlohmann::json::array();
  auto& seeds = j["seeds"] = nlohmann::json::array();
  auto& statuses = j["statuses"] = nlohmann::json::array();
  for (const auto& s : summary.seeds) {
    final_loss.push_back(json_number(s.final_loss));
    best_loss.push_back(json_number(s.best_loss));
    iters.push_back(s.iters_to_threshold);
    nlohmann::json theta = nlohmann::json::array();
    for (double x : s.final_theta) theta.push_back(json_number(x));
    thetas.push_back(std::move(theta));
    seeds.push_back(s.seed);
    statuses.push_back(std::string(to_string(s.status)));
  }
  j["mean"] = json_number(summary.mean);
  j["std"] = json_number(summary.std);
  j["status"] = std::string(to_string(summary.status));
  return j;
}

nlohmann::json threshold_json(const Threshold& threshold) {
  nlohmann::json j;
  j["kind"] = threshold.kind == Threshold::Kind::loss ? "loss" : "distance";
  j["value"] = threshold.value;
  if (threshold.kind == Threshold::Kind::distance) j["target"] = threshold.target;
  return j;
}

}  // namespace angular
