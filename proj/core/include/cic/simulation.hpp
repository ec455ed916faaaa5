#pragma once

#include <string>
#include <vector>

#include "cic/dynamics.hpp"
#include "cic/scenario.hpp"

namespace cic {

/// One fixed-rate sample of the closed loop: state, controller breakdown and
/// the effective (filtered) gain diagonals.
struct LogRecord {
  double t = 0.0;
  VecX q;
  VecX qdot;
  CartesianPose pose;
  Vec6 pose_error = Vec6::Zero();
  VecX tau_task;
  VecX tau_nullspace;
  VecX tau_wrench;
  VecX tau_command;  // post rate-limit / effort clamp
  Vec6 applied_wrench = Vec6::Zero();  // environment wrench, base frame
  Vec6 k_ca_diag = Vec6::Zero();
  Vec6 d_ca_diag = Vec6::Zero();
  VecX k_ns_diag;
  VecX d_ns_diag;
};

/// Runs the scenario's fixed-step closed loop and returns one record per
/// step. Deterministic: identical scenarios produce bit-identical logs.
/// Event clamp notes are appended to `warnings` when non-null. Throws
/// NonFiniteState (with the last good timestamp) if the state diverges.
std::vector<LogRecord> run_scenario(const Scenario& scenario,
                                    std::vector<std::string>* warnings = nullptr);

/// Aggregates over the trailing `window_s` seconds of the log.
struct SteadyStateReport {
  double window = 0.0;
  std::size_t samples = 0;
  Vec6 mean_pose_error = Vec6::Zero();
  double mean_trans_error = 0.0;  // mean ||pose_error[0:3]||
  double max_trans_error = 0.0;
  double mean_rot_error = 0.0;  // mean ||pose_error[3:6]||
  double max_rot_error = 0.0;
  VecX mean_torque;
  double max_torque_inf = 0.0;
  Vec6 mean_applied_wrench = Vec6::Zero();
};

/// Throws WindowTooLong when window_s exceeds the logged span.
SteadyStateReport steady_state_report(const std::vector<LogRecord>& log, double window_s);

}  // namespace cic
