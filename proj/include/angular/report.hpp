#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "angular/harness.hpp"

namespace angular {

/// "t,loss,alpha,phi_mean,step_norm[,theta_0..theta_{d-1}]", one row per
/// iteration, shortest round-trip decimals.
std::string trajectory_csv(const Trajectory& trajectory);

/// Parses a trajectory CSV back; the optimizer name is left empty.
Trajectory read_trajectory_csv(std::istream& is);

/// "x,y,f" rows, y-major (all x for the first y, then the next y).
std::string grid_csv(const Grid& grid);

/// "t,regret,avg_regret".
std::string regret_csv(const RegretRecord& record);

/// "epoch,batch_loss_mean,train_loss,train_accuracy,test_loss,test_accuracy,alpha".
std::string mlp_epochs_csv(const MlpRun& run);

/// {final_loss, best_loss, iters_to_threshold, final_theta, seeds, statuses}
/// as per-seed arrays plus scalar mean, std and status.
nlohmann::json summary_json(const RunSummary& summary);

nlohmann::json threshold_json(const Threshold& threshold);

/// NaN and infinities become null.
nlohmann::json json_number(double x);

}  // namespace angular
