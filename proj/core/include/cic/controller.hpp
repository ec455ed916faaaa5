#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cic/control_law.hpp"
#include "cic/kinematics.hpp"
#include "cic/types.hpp"

namespace cic {

/// Frame in which the task-space quantities (pose error, Jacobian, commanded
/// wrench) are expressed inside the control law. The torque command is
/// invariant under a consistent choice; Base is the default.
enum class TaskFrame { Base, EndEffector };

struct ImpedanceGains {
  Mat6 stiffness = Mat6::Zero();  // K^ca: N/m (trans block), N*m/rad (rot block)
  Mat6 damping = Mat6::Zero();    // D^ca
  MatX ns_stiffness;              // K^ns, n x n, N*m/rad
  MatX ns_damping;                // D^ns, n x n

  static ImpedanceGains zero(Eigen::Index dof);
};

/// Diagonal damping from a per-axis ratio: D = 2*zeta*sqrt(K) on the
/// diagonal. zeta = 1 approximates critical damping of the virtual spring.
MatX damping_from_ratio(const MatX& stiffness, double zeta);

/// Elementwise saturation bounds plus the torque-rate ceiling. Entries
/// default to +-infinity (no clamping) until configured; empty nullspace
/// bounds are sized to the dof at controller construction.
struct SafetyLimits {
  Mat6 stiffness_min = Mat6::Constant(-std::numeric_limits<double>::infinity());
  Mat6 stiffness_max = Mat6::Constant(std::numeric_limits<double>::infinity());
  Mat6 damping_min = Mat6::Constant(-std::numeric_limits<double>::infinity());
  Mat6 damping_max = Mat6::Constant(std::numeric_limits<double>::infinity());
  MatX ns_stiffness_min, ns_stiffness_max;
  MatX ns_damping_min, ns_damping_max;
  Vec6 wrench_min = Vec6::Constant(-std::numeric_limits<double>::infinity());
  Vec6 wrench_max = Vec6::Constant(std::numeric_limits<double>::infinity());
  double torque_rate_max = std::numeric_limits<double>::infinity();  // N*m per step, 2-norm

  static SafetyLimits unbounded(Eigen::Index dof);
  /// Throws DomainError unless min <= max elementwise and the rate is positive.
  void validate(Eigen::Index dof) const;
};

struct ControllerTargets {
  CartesianPose pose;   // xi^D
  VecX nullspace_q;     // q^D
  Vec6 wrench = Vec6::Zero();  // F_c^ext, force the robot exerts on the environment
};

/// A requested value that had to be clamped to its configured bound.
struct BoundsWarning {
  std::string parameter;
  double requested = 0.0;
  double applied = 0.0;
};

struct FilterSettings {
  double p = 0.99;       // fraction of the gap covered ...
  double horizon = 0.3;  // ... after this many seconds
};

/// Low-pass state for every online-adjustable parameter: the effective
/// value tracks its target through x += a*(target - x) per step (geodesic
/// interpolation for the orientation part of the pose target).
struct FilterBank {
  double pose_coeff = 1.0;
  double gains_coeff = 1.0;
  double wrench_coeff = 1.0;
  double nullspace_coeff = 1.0;

  CartesianPose pose_value, pose_target;
  ImpedanceGains gains_value, gains_target;
  Vec6 wrench_value = Vec6::Zero(), wrench_target = Vec6::Zero();
  VecX nullspace_q_value, nullspace_q_target;

  /// Advances every parameter one step and re-saturates the effective values.
  void step(const SafetyLimits& limits);
};

struct ControllerConfig {
  Eigen::Index dof = 0;
  double dt = 1e-3;  // control period, must match the caller's loop rate
  ImpedanceGains gains;
  SafetyLimits limits = SafetyLimits::unbounded(0);
  FilterSettings filter;  // default for all parameters
  std::optional<FilterSettings> pose_filter, gain_filter, wrench_filter, nullspace_filter;
  TaskFrame frame = TaskFrame::Base;
  bool gravity_feedforward = false;
  bool clamp_to_effort_limits = false;
  VecX effort_limits;  // per joint, required when clamp_to_effort_limits
};

struct TargetUpdate {
  std::optional<CartesianPose> pose;
  std::optional<VecX> nullspace_q;
  std::optional<Vec6> wrench;
};

struct GainUpdate {
  std::optional<Mat6> stiffness;
  std::optional<Mat6> damping;
  std::optional<double> damping_ratio;  // derive damping from the stiffness target
  std::optional<MatX> ns_stiffness;
  std::optional<MatX> ns_damping;
  std::optional<double> ns_damping_ratio;
};

/// Model-side quantities the caller evaluates each cycle (all base frame).
struct ControlInputs {
  VecX q;
  VecX qdot;
  Jacobian jacobian;
  CartesianPose pose;
  VecX gravity;  // gravity compensation torques; used when the flag is on
};

struct ControlStepResult {
  TorqueVector torque;            // final command, after rate limit and effort clamp
  TorqueVector torque_task;       // Cartesian impedance component
  TorqueVector torque_nullspace;
  TorqueVector torque_wrench;     // wrench feed-forward component
  TorqueVector torque_unlimited;  // superposition (+ gravity) before the safety stages
  Vec6 pose_error;                // error used by the law, working frame
};

/// The torque-superposition impedance controller with its filtering,
/// saturation and rate-limit safety stages.
///
/// An instance is single-owner: exactly one agent may call control_step.
/// Target and gain updates from elsewhere must be handed over between steps
/// (mailbox contract); nothing is mutated mid-step. Run one instance per
/// robot; instances share no state.
class CartesianImpedanceController {
 public:
  CartesianImpedanceController(ControllerConfig config, ControllerTargets initial);

  /// Stages new desired values (applied gradually via the filter bank).
  /// Gain/wrench targets are saturated on entry; the returned warnings name
  /// every clamped entry.
  std::vector<BoundsWarning> set_targets(const TargetUpdate& update);
  std::vector<BoundsWarning> set_gains(const GainUpdate& update);

  /// One control cycle: filters parameters, evaluates the three torque
  /// terms, sums, applies gravity feed-forward, rate limit and optional
  /// per-joint effort clamp, and stores the command for the next cycle.
  ControlStepResult control_step(const ControlInputs& inputs);

  const FilterBank& filters() const { return bank_; }
  const ControllerConfig& config() const { return config_; }
  const TorqueVector& previous_torque() const { return previous_torque_; }

 private:
  ControllerConfig config_;
  FilterBank bank_;
  TorqueVector previous_torque_;
};

}  // namespace cic
