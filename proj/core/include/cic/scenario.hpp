#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cic/controller.hpp"
#include "cic/trajectory.hpp"
#include "cic/types.hpp"

namespace cic {

/// Diagonal 6x6 task-space quantity split into translational and rotational
/// per-axis values (the scenario file's stiffness/damping/bound notation).
struct DiagonalSpec6 {
  Vec3 trans = Vec3::Zero();
  Vec3 rot = Vec3::Zero();

  Mat6 to_matrix() const;
};

/// Per-joint values that may be given as one uniform scalar (size 1) or a
/// full n-vector; `materialize` broadcasts to the chain's dof.
VecX broadcast_per_joint(const VecX& values, Eigen::Index dof, const char* what);

/// Controller block of a scenario file before the robot's dof is known.
struct ControllerSpec {
  DiagonalSpec6 k_ca;
  std::optional<DiagonalSpec6> d_ca;  // explicit damping; otherwise ratio
  double damping_ratio = 1.0;
  VecX k_ns;  // size 0 = zero, 1 = uniform, or n
  VecX d_ns;
  std::optional<double> ns_damping_ratio;

  std::optional<DiagonalSpec6> k_ca_min, k_ca_max, d_ca_min, d_ca_max;
  VecX k_ns_min, k_ns_max, d_ns_min, d_ns_max;
  std::optional<Vec6> wrench_min, wrench_max;
  double torque_rate_max = 0.0;  // 0 = unlimited

  FilterSettings filter;
  std::optional<FilterSettings> pose_filter, gain_filter, wrench_filter, nullspace_filter;
  TaskFrame frame = TaskFrame::Base;
  bool gravity_feedforward = false;
  bool clamp_to_effort_limits = false;

  std::optional<CartesianPose> pose_target;  // default: FK of the initial q
  std::optional<VecX> nullspace_target;      // default: initial q
  Vec6 wrench = Vec6::Zero();                // initial commanded wrench

  /// Resolves broadcastable fields into a full ControllerConfig.
  ControllerConfig materialize(Eigen::Index dof, double dt, const VecX& effort_limits) const;
};

struct TargetEventSpec {
  std::optional<CartesianPose> pose;
  std::optional<VecX> nullspace_q;
  std::optional<Vec6> wrench;
};

struct GainEventSpec {
  std::optional<DiagonalSpec6> k_ca, d_ca;
  std::optional<double> damping_ratio;
  std::optional<VecX> k_ns, d_ns;
  std::optional<double> ns_damping_ratio;

  GainUpdate materialize(Eigen::Index dof) const;
};

struct ScenarioEvent {
  double time = 0.0;
  std::variant<TargetEventSpec, GainEventSpec, JointTrajectory> action;
};

enum class WrenchFrame { Base, EndEffector };

/// Constant external wrench on the end effector over [start, end).
struct WrenchInterval {
  double start = 0.0;
  double end = 0.0;
  Vec6 wrench = Vec6::Zero();
  WrenchFrame frame = WrenchFrame::Base;
};

/// Linear spring tying the end-effector position to a fixed anchor; the
/// scenario-side stand-in for environment contact such as a virtual wall.
/// Without an explicit anchor the spring attaches where the end effector
/// starts.
struct EnvironmentSpring {
  std::optional<Vec3> anchor;
  double stiffness = 0.0;  // N/m
};

struct Scenario {
  std::string robot_path;  // used when robot_text is empty
  std::string robot_text;  // inline description; takes precedence
  std::string base_link;
  std::string tip_link;
  VecX q0;
  VecX qdot0;  // empty = zeros
  ControllerSpec controller;
  std::vector<ScenarioEvent> events;
  std::vector<WrenchInterval> wrench_intervals;
  std::vector<EnvironmentSpring> springs;
  double duration = 1.0;
  double dt = 1e-3;
  Vec3 gravity = Vec3(0.0, 0.0, -9.81);
};

/// Parses a scenario JSON document. Relative robot paths resolve against
/// `base_dir`. Throws ConfigError on schema violations.
Scenario parse_scenario(const std::string& json_text, const std::string& base_dir = "");

/// Reads and parses a scenario file. Throws IoError if unreadable.
Scenario load_scenario(const std::string& path);

/// Dotted config keys recognized by `apply_sweep_parameter`, sorted.
std::vector<std::string> sweep_parameter_keys();

/// Overrides one scalar scenario parameter (e.g. "gains.k_ca.trans.x").
/// Throws ConfigError naming the known keys when `key` is not recognized.
void apply_sweep_parameter(Scenario& scenario, const std::string& key, double value);

}  // namespace cic
