#include "cic/controller.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

#include "cic/errors.hpp"

namespace cic {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_symmetric_psd(const MatX& m, const char* name) {
  if (m.rows() != m.cols()) throw DimensionError(std::string(name) + " must be square");
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9) {
    throw DomainError(std::string(name) + " must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<MatX> eig(m);
  if (eig.eigenvalues().minCoeff() < -1e-9) {
    throw DomainError(std::string(name) + " must be positive semidefinite");
  }
}

void require_finite(const VecX& v, const char* name) {
  if (!v.allFinite()) throw NonFiniteInput(std::string(name) + " contains NaN or infinity");
}

/// Clamps `target` into [lo, hi] elementwise, appending one warning per
/// clamped entry.
template <typename Mat>
Mat clamp_with_warnings(const Mat& target, const Mat& lo, const Mat& hi, const char* name,
                        std::vector<BoundsWarning>* warnings) {
  Mat clamped = target.cwiseMax(lo).cwiseMin(hi);
  if (warnings) {
    for (Eigen::Index r = 0; r < target.rows(); ++r) {
      for (Eigen::Index c = 0; c < target.cols(); ++c) {
        if (clamped(r, c) != target(r, c)) {
          std::string entry = std::string(name) + "(" + std::to_string(r);
          if (target.cols() > 1) entry += "," + std::to_string(c);
          entry += ")";
          warnings->push_back({entry, target(r, c), clamped(r, c)});
        }
      }
    }
  }
  return clamped;
}

}  // namespace

ImpedanceGains ImpedanceGains::zero(Eigen::Index dof) {
  ImpedanceGains g;
  g.ns_stiffness = MatX::Zero(dof, dof);
  g.ns_damping = MatX::Zero(dof, dof);
  return g;
}

MatX damping_from_ratio(const MatX& stiffness, double zeta) {
  if (zeta < 0.0) throw DomainError("damping ratio must be non-negative");
  MatX damping = MatX::Zero(stiffness.rows(), stiffness.cols());
  for (Eigen::Index i = 0; i < stiffness.rows(); ++i) {
    damping(i, i) = 2.0 * zeta * std::sqrt(std::max(stiffness(i, i), 0.0));
  }
  return damping;
}

SafetyLimits SafetyLimits::unbounded(Eigen::Index dof) {
  SafetyLimits limits;
  limits.ns_stiffness_min = MatX::Constant(dof, dof, -kInf);
  limits.ns_stiffness_max = MatX::Constant(dof, dof, kInf);
  limits.ns_damping_min = MatX::Constant(dof, dof, -kInf);
  limits.ns_damping_max = MatX::Constant(dof, dof, kInf);
  return limits;
}

void SafetyLimits::validate(Eigen::Index dof) const {
  auto ordered = [](const MatX& lo, const MatX& hi) { return (lo.array() <= hi.array()).all(); };
  if (!ordered(stiffness_min, stiffness_max) || !ordered(damping_min, damping_max) ||
      !ordered(ns_stiffness_min, ns_stiffness_max) || !ordered(ns_damping_min, ns_damping_max) ||
      !ordered(wrench_min, wrench_max)) {
    throw DomainError("safety limits: min bound above max bound");
  }
  if (ns_stiffness_min.rows() != dof || ns_damping_min.rows() != dof ||
      ns_stiffness_max.rows() != dof || ns_damping_max.rows() != dof) {
    throw DimensionError("safety limits: nullspace bounds must be dof x dof");
  }
  if (!(torque_rate_max > 0.0)) {
    throw DomainError("safety limits: torque rate bound must be positive");
  }
}

void FilterBank::step(const SafetyLimits& limits) {
  pose_value.translation += pose_coeff * (pose_target.translation - pose_value.translation);
  if ((pose_value.orientation.coeffs().array() != pose_target.orientation.coeffs().array()).any()) {
    pose_value.orientation = pose_value.orientation.slerp(pose_coeff, pose_target.orientation);
  }

  auto advance = [](auto& value, const auto& target, double a) {
    value += a * (target - value);
  };
  advance(gains_value.stiffness, gains_target.stiffness, gains_coeff);
  advance(gains_value.damping, gains_target.damping, gains_coeff);
  advance(gains_value.ns_stiffness, gains_target.ns_stiffness, gains_coeff);
  advance(gains_value.ns_damping, gains_target.ns_damping, gains_coeff);
  advance(wrench_value, wrench_target, wrench_coeff);
  advance(nullspace_q_value, nullspace_q_target, nullspace_coeff);

  // Targets are saturated on entry, so this re-clamp is normally a no-op; it
  // pins the invariant that effective values respect the bounds every step.
  gains_value.stiffness = saturate(gains_value.stiffness, limits.stiffness_min, limits.stiffness_max);
  gains_value.damping = saturate(gains_value.damping, limits.damping_min, limits.damping_max);
  gains_value.ns_stiffness =
      saturate(gains_value.ns_stiffness, limits.ns_stiffness_min, limits.ns_stiffness_max);
  gains_value.ns_damping =
      saturate(gains_value.ns_damping, limits.ns_damping_min, limits.ns_damping_max);
  wrench_value = saturate(wrench_value, limits.wrench_min, limits.wrench_max);
}

CartesianImpedanceController::CartesianImpedanceController(ControllerConfig config,
                                                           ControllerTargets initial)
    : config_(std::move(config)) {
  const Eigen::Index n = config_.dof;
  if (n < 1) throw DimensionError("controller: dof must be >= 1");
  if (!(config_.dt > 0.0)) throw DomainError("controller: dt must be positive");

  if (config_.gains.ns_stiffness.size() == 0) config_.gains.ns_stiffness = MatX::Zero(n, n);
  if (config_.gains.ns_damping.size() == 0) config_.gains.ns_damping = MatX::Zero(n, n);
  // Empty nullspace bounds mean "unbounded"; size them to the dof.
  if (config_.limits.ns_stiffness_min.size() == 0)
    config_.limits.ns_stiffness_min = MatX::Constant(n, n, -kInf);
  if (config_.limits.ns_stiffness_max.size() == 0)
    config_.limits.ns_stiffness_max = MatX::Constant(n, n, kInf);
  if (config_.limits.ns_damping_min.size() == 0)
    config_.limits.ns_damping_min = MatX::Constant(n, n, -kInf);
  if (config_.limits.ns_damping_max.size() == 0)
    config_.limits.ns_damping_max = MatX::Constant(n, n, kInf);
  config_.limits.validate(n);

  require_symmetric_psd(config_.gains.stiffness, "stiffness");
  require_symmetric_psd(config_.gains.damping, "damping");
  require_symmetric_psd(config_.gains.ns_stiffness, "ns_stiffness");
  require_symmetric_psd(config_.gains.ns_damping, "ns_damping");
  if (config_.gains.ns_stiffness.rows() != n || config_.gains.ns_damping.rows() != n) {
    throw DimensionError("controller: nullspace gain matrices must be dof x dof");
  }

  if (initial.nullspace_q.size() != n) {
    throw DimensionError("controller: initial nullspace_q must have dof entries");
  }
  require_finite(initial.nullspace_q, "initial nullspace_q");
  require_finite(initial.wrench, "initial wrench");
  if (config_.clamp_to_effort_limits && config_.effort_limits.size() != n) {
    throw DimensionError("controller: effort limits must have dof entries");
  }

  auto coeff = [&](const std::optional<FilterSettings>& specific) {
    const FilterSettings& s = specific ? *specific : config_.filter;
    return filter_coefficient(s.p, s.horizon, config_.dt);
  };
  bank_.pose_coeff = coeff(config_.pose_filter);
  bank_.gains_coeff = coeff(config_.gain_filter);
  bank_.wrench_coeff = coeff(config_.wrench_filter);
  bank_.nullspace_coeff = coeff(config_.nullspace_filter);

  // Start converged: effective values equal their (saturated) targets.
  const SafetyLimits& lim = config_.limits;
  bank_.gains_target.stiffness =
      saturate(config_.gains.stiffness, lim.stiffness_min, lim.stiffness_max);
  bank_.gains_target.damping = saturate(config_.gains.damping, lim.damping_min, lim.damping_max);
  bank_.gains_target.ns_stiffness =
      saturate(config_.gains.ns_stiffness, lim.ns_stiffness_min, lim.ns_stiffness_max);
  bank_.gains_target.ns_damping =
      saturate(config_.gains.ns_damping, lim.ns_damping_min, lim.ns_damping_max);
  bank_.gains_value = bank_.gains_target;
  bank_.wrench_target = saturate(initial.wrench, lim.wrench_min, lim.wrench_max);
  bank_.wrench_value = bank_.wrench_target;
  bank_.pose_target = initial.pose;
  bank_.pose_value = initial.pose;
  bank_.nullspace_q_target = initial.nullspace_q;
  bank_.nullspace_q_value = initial.nullspace_q;

  previous_torque_ = TorqueVector::Zero(n);
}

std::vector<BoundsWarning> CartesianImpedanceController::set_targets(const TargetUpdate& update) {
  std::vector<BoundsWarning> warnings;
  if (update.pose) {
    if (!update.pose->translation.allFinite()) {
      throw NonFiniteInput("pose target contains NaN or infinity");
    }
    bank_.pose_target = *update.pose;
  }
  if (update.nullspace_q) {
    if (update.nullspace_q->size() != config_.dof) {
      throw DimensionError("nullspace_q target must have dof entries");
    }
    require_finite(*update.nullspace_q, "nullspace_q target");
    bank_.nullspace_q_target = *update.nullspace_q;
  }
  if (update.wrench) {
    require_finite(*update.wrench, "wrench target");
    bank_.wrench_target = clamp_with_warnings<Vec6>(*update.wrench, config_.limits.wrench_min,
                                                    config_.limits.wrench_max, "wrench", &warnings);
  }
  return warnings;
}

std::vector<BoundsWarning> CartesianImpedanceController::set_gains(const GainUpdate& update) {
  std::vector<BoundsWarning> warnings;
  const SafetyLimits& lim = config_.limits;
  if (update.stiffness) {
    require_symmetric_psd(*update.stiffness, "stiffness");
    bank_.gains_target.stiffness = clamp_with_warnings<Mat6>(
        *update.stiffness, lim.stiffness_min, lim.stiffness_max, "k_ca", &warnings);
  }
  if (update.damping && update.damping_ratio) {
    throw DomainError("set_gains: give either an explicit damping matrix or a ratio, not both");
  }
  if (update.damping) {
    require_symmetric_psd(*update.damping, "damping");
    bank_.gains_target.damping =
        clamp_with_warnings<Mat6>(*update.damping, lim.damping_min, lim.damping_max, "d_ca",
                                  &warnings);
  } else if (update.damping_ratio) {
    Mat6 derived = damping_from_ratio(bank_.gains_target.stiffness, *update.damping_ratio);
    bank_.gains_target.damping =
        clamp_with_warnings<Mat6>(derived, lim.damping_min, lim.damping_max, "d_ca", &warnings);
  }
  if (update.ns_stiffness) {
    require_symmetric_psd(*update.ns_stiffness, "ns_stiffness");
    if (update.ns_stiffness->rows() != config_.dof) {
      throw DimensionError("ns_stiffness must be dof x dof");
    }
    bank_.gains_target.ns_stiffness = clamp_with_warnings<MatX>(
        *update.ns_stiffness, lim.ns_stiffness_min, lim.ns_stiffness_max, "k_ns", &warnings);
  }
  if (update.ns_damping && update.ns_damping_ratio) {
    throw DomainError("set_gains: give either an explicit ns damping matrix or a ratio, not both");
  }
  if (update.ns_damping) {
    require_symmetric_psd(*update.ns_damping, "ns_damping");
    if (update.ns_damping->rows() != config_.dof) {
      throw DimensionError("ns_damping must be dof x dof");
    }
    bank_.gains_target.ns_damping = clamp_with_warnings<MatX>(
        *update.ns_damping, lim.ns_damping_min, lim.ns_damping_max, "d_ns", &warnings);
  } else if (update.ns_damping_ratio) {
    MatX derived = damping_from_ratio(bank_.gains_target.ns_stiffness, *update.ns_damping_ratio);
    bank_.gains_target.ns_damping =
        clamp_with_warnings<MatX>(derived, lim.ns_damping_min, lim.ns_damping_max, "d_ns",
                                  &warnings);
  }
  return warnings;
}

ControlStepResult CartesianImpedanceController::control_step(const ControlInputs& inputs) {
  const Eigen::Index n = config_.dof;
  if (inputs.q.size() != n || inputs.qdot.size() != n || inputs.jacobian.cols() != n ||
      inputs.jacobian.rows() != 6) {
    throw DimensionError("control_step: input dimensions do not match dof");
  }
  require_finite(inputs.q, "q");
  require_finite(inputs.qdot, "qdot");
  if (!inputs.jacobian.allFinite()) throw NonFiniteInput("jacobian contains NaN or infinity");
  if (!inputs.pose.translation.allFinite()) throw NonFiniteInput("pose contains NaN or infinity");
  if (config_.gravity_feedforward) {
    if (inputs.gravity.size() != n) {
      throw DimensionError("control_step: gravity feed-forward enabled but torques missing");
    }
    require_finite(inputs.gravity, "gravity torques");
  }

  bank_.step(config_.limits);

  ControlStepResult out;
  out.pose_error = pose_error(inputs.pose, bank_.pose_value);

  Jacobian jac = inputs.jacobian;
  if (config_.frame == TaskFrame::EndEffector) {
    // Re-express error and Jacobian in the current end-effector frame; the
    // commanded wrench is interpreted in that frame as well.
    Mat3 rt = inputs.pose.orientation.toRotationMatrix().transpose();
    out.pose_error.head<3>() = rt * out.pose_error.head<3>();
    out.pose_error.tail<3>() = rt * out.pose_error.tail<3>();
    jac.topRows<3>() = rt * inputs.jacobian.topRows<3>();
    jac.bottomRows<3>() = rt * inputs.jacobian.bottomRows<3>();
  }

  out.torque_task = cartesian_impedance_torque(jac, out.pose_error, inputs.qdot,
                                               bank_.gains_value.stiffness,
                                               bank_.gains_value.damping);
  MatX projector = nullspace_projector(jac);
  out.torque_nullspace =
      nullspace_torque(projector, inputs.q, inputs.qdot, bank_.nullspace_q_value,
                       bank_.gains_value.ns_stiffness, bank_.gains_value.ns_damping);
  out.torque_wrench = wrench_torque(jac, bank_.wrench_value);

  out.torque_unlimited = out.torque_task + out.torque_nullspace + out.torque_wrench;
  if (config_.gravity_feedforward) {
    out.torque_unlimited += inputs.gravity;
  }

  out.torque = rate_limit(previous_torque_, out.torque_unlimited, config_.limits.torque_rate_max);
  if (config_.clamp_to_effort_limits) {
    out.torque = saturate(out.torque, (-config_.effort_limits).eval(), config_.effort_limits);
  }
  previous_torque_ = out.torque;
  return out;
}

}  // namespace cic
