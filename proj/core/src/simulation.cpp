#include "cic/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "cic/errors.hpp"
#include "cic/urdf.hpp"

namespace cic {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open robot description '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void note_warnings(std::vector<std::string>* sink, const std::vector<BoundsWarning>& warnings,
                   double t) {
  if (!sink) return;
  for (const auto& w : warnings) {
    std::ostringstream ss;
    ss << "t=" << t << ": target " << w.parameter << " clamped from " << w.requested << " to "
       << w.applied;
    sink->push_back(ss.str());
  }
}

}  // namespace

std::vector<LogRecord> run_scenario(const Scenario& scenario, std::vector<std::string>* warnings) {
  if (!(scenario.dt > 0.0) || !(scenario.duration >= scenario.dt)) {
    throw ConfigError("scenario: need 0 < dt <= duration");
  }
  RobotModel model = scenario.robot_text.empty()
                         ? parse_robot_description(read_file(scenario.robot_path))
                         : parse_robot_description(scenario.robot_text);
  KinematicChain chain = extract_chain(model, scenario.base_link, scenario.tip_link);
  const Eigen::Index n = chain.dof();

  if (scenario.q0.size() != n) {
    throw ConfigError("scenario: initial_state.q must have " + std::to_string(n) + " entries");
  }
  VecX qdot0 = scenario.qdot0.size() == 0 ? VecX::Zero(n) : scenario.qdot0;
  if (qdot0.size() != n) {
    throw ConfigError("scenario: initial_state.qdot must have " + std::to_string(n) + " entries");
  }

  ControllerConfig cfg = scenario.controller.materialize(n, scenario.dt, chain.effort_limits());
  const CartesianPose start_pose = forward_kinematics(chain, scenario.q0);
  ControllerTargets initial;
  initial.pose = scenario.controller.pose_target.value_or(start_pose);
  initial.nullspace_q = scenario.controller.nullspace_target.value_or(scenario.q0);
  if (initial.nullspace_q.size() != n) {
    throw ConfigError("scenario: targets.nullspace_q must have " + std::to_string(n) + " entries");
  }
  initial.wrench = scenario.controller.wrench;
  CartesianImpedanceController controller(cfg, initial);

  // Events fire at the first step whose time has reached their timestamp.
  std::vector<const ScenarioEvent*> pending;
  pending.reserve(scenario.events.size());
  for (const auto& e : scenario.events) pending.push_back(&e);
  std::stable_sort(pending.begin(), pending.end(),
                   [](const ScenarioEvent* a, const ScenarioEvent* b) { return a->time < b->time; });
  std::size_t next_event = 0;

  struct ActiveTrajectory {
    double start_time = 0.0;
    const JointTrajectory* trajectory = nullptr;
  };
  ActiveTrajectory active_traj;

  JointState state{scenario.q0, qdot0};
  const auto steps = static_cast<std::size_t>(std::llround(scenario.duration / scenario.dt));
  std::vector<LogRecord> log;
  log.reserve(steps);

  for (std::size_t k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * scenario.dt;

    while (next_event < pending.size() && pending[next_event]->time <= t) {
      const ScenarioEvent& event = *pending[next_event];
      if (const auto* targets = std::get_if<TargetEventSpec>(&event.action)) {
        TargetUpdate update;
        update.pose = targets->pose;
        if (targets->nullspace_q) {
          update.nullspace_q = broadcast_per_joint(*targets->nullspace_q, n, "set_targets.nullspace_q");
        }
        update.wrench = targets->wrench;
        note_warnings(warnings, controller.set_targets(update), t);
      } else if (const auto* gains = std::get_if<GainEventSpec>(&event.action)) {
        note_warnings(warnings, controller.set_gains(gains->materialize(n)), t);
      } else if (const auto* traj = std::get_if<JointTrajectory>(&event.action)) {
        active_traj.trajectory = traj;
        active_traj.start_time = event.time;
      }
      ++next_event;
    }

    if (active_traj.trajectory) {
      // Waypoint times are relative to the trajectory event's activation.
      TrajectoryTarget target =
          trajectory_target(*active_traj.trajectory, t - active_traj.start_time, chain);
      TargetUpdate update;
      update.pose = target.pose;
      update.nullspace_q = target.nullspace_q;
      controller.set_targets(update);
    }

    Jacobian jac = geometric_jacobian(chain, state.q);
    CartesianPose pose = forward_kinematics(chain, state.q);

    // Environment wrench on the end effector, base frame.
    Vec6 applied = Vec6::Zero();
    for (const auto& interval : scenario.wrench_intervals) {
      if (t < interval.start || t >= interval.end) continue;
      if (interval.frame == WrenchFrame::Base) {
        applied += interval.wrench;
      } else {
        Mat3 r = pose.orientation.toRotationMatrix();
        Vec6 w;
        w.head<3>() = r * interval.wrench.head<3>();
        w.tail<3>() = r * interval.wrench.tail<3>();
        applied += w;
      }
    }
    for (const auto& spring : scenario.springs) {
      const Vec3 anchor = spring.anchor.value_or(start_pose.translation);
      applied.head<3>() += spring.stiffness * (anchor - pose.translation);
    }

    ControlInputs inputs;
    inputs.q = state.q;
    inputs.qdot = state.qdot;
    inputs.jacobian = jac;
    inputs.pose = pose;
    if (cfg.gravity_feedforward) {
      inputs.gravity = gravity_torques(chain, state.q, scenario.gravity);
    }
    ControlStepResult result = controller.control_step(inputs);

    TorqueVector tau_ext = jac.transpose() * applied;

    LogRecord rec;
    rec.t = t;
    rec.q = state.q;
    rec.qdot = state.qdot;
    rec.pose = pose;
    rec.pose_error = result.pose_error;
    rec.tau_task = result.torque_task;
    rec.tau_nullspace = result.torque_nullspace;
    rec.tau_wrench = result.torque_wrench;
    rec.tau_command = result.torque;
    rec.applied_wrench = applied;
    const FilterBank& bank = controller.filters();
    rec.k_ca_diag = bank.gains_value.stiffness.diagonal();
    rec.d_ca_diag = bank.gains_value.damping.diagonal();
    rec.k_ns_diag = bank.gains_value.ns_stiffness.diagonal();
    rec.d_ns_diag = bank.gains_value.ns_damping.diagonal();
    log.push_back(std::move(rec));

    state = forward_step(chain, state, result.torque, tau_ext, scenario.gravity, scenario.dt);
    if (!state.q.allFinite() || !state.qdot.allFinite()) {
      std::ostringstream ss;
      ss << "simulation state became non-finite after step " << k << "; last good t=" << t;
      throw NonFiniteState(ss.str(), t);
    }
  }
  return log;
}

SteadyStateReport steady_state_report(const std::vector<LogRecord>& log, double window_s) {
  if (log.empty()) throw WindowTooLong("log is empty");
  if (!(window_s >= 0.0)) throw DomainError("report window must be non-negative");
  const double t_end = log.back().t;
  const double span = t_end - log.front().t;
  if (window_s > span + 1e-12) {
    throw WindowTooLong("window of " + std::to_string(window_s) +
                        " s exceeds logged span of " + std::to_string(span) + " s");
  }

  SteadyStateReport report;
  report.window = window_s;
  const Eigen::Index n = log.front().tau_command.size();
  report.mean_torque = VecX::Zero(n);

  for (const auto& rec : log) {
    if (rec.t < t_end - window_s) continue;
    ++report.samples;
    report.mean_pose_error += rec.pose_error;
    double trans = rec.pose_error.head<3>().norm();
    double rot = rec.pose_error.tail<3>().norm();
    report.mean_trans_error += trans;
    report.mean_rot_error += rot;
    report.max_trans_error = std::max(report.max_trans_error, trans);
    report.max_rot_error = std::max(report.max_rot_error, rot);
    report.mean_torque += rec.tau_command;
    report.max_torque_inf =
        std::max(report.max_torque_inf, rec.tau_command.cwiseAbs().maxCoeff());
    report.mean_applied_wrench += rec.applied_wrench;
  }
  const auto count = static_cast<double>(report.samples);
  report.mean_pose_error /= count;
  report.mean_trans_error /= count;
  report.mean_rot_error /= count;
  report.mean_torque /= count;
  report.mean_applied_wrench /= count;
  return report;
}

}  // namespace cic
