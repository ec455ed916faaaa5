#pragma once

#include <vector>

#include "cic/model.hpp"
#include "cic/types.hpp"

namespace cic {

/// Rigid pose of a task frame: translation in metres plus a unit quaternion.
/// The quaternion is renormalized on construction.
struct CartesianPose {
  Vec3 translation = Vec3::Zero();
  Quat orientation = Quat::Identity();

  CartesianPose() = default;
  CartesianPose(const Vec3& t, const Quat& r);

  static CartesianPose from_transform(const Transform& t);
  Transform to_transform() const;
};

/// 6-vector pose error: entries 0-2 translational (m), entries 3-5 the
/// axis-angle vector of the orientation error (rad, norm <= pi).
using PoseError = Vec6;

/// Pose of the tip frame in the base frame.
CartesianPose forward_kinematics(const KinematicChain& chain, const VecX& q);

/// Base-frame geometric Jacobian of the tip frame. Column i is
/// (z_i x (p_tip - p_i), z_i) for revolute joint i.
Jacobian geometric_jacobian(const KinematicChain& chain, const VecX& q);

/// Split pose error: translation = current - desired; rotation = axis-angle
/// of current.orientation * desired.orientation^-1, canonicalized to the
/// shorter rotation (w >= 0). At an exact pi rotation the axis sign is fixed
/// by the largest-magnitude quaternion vector component.
PoseError pose_error(const CartesianPose& current, const CartesianPose& desired);

}  // namespace cic
