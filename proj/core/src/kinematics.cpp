#include "cic/kinematics.hpp"

#include <cmath>

#include "cic/errors.hpp"

namespace cic {

namespace {

void check_dof(const KinematicChain& chain, const VecX& q, const char* op) {
  if (q.size() != chain.dof()) {
    throw DimensionError(std::string(op) + ": expected " + std::to_string(chain.dof()) +
                         " joint values, got " + std::to_string(q.size()));
  }
}

}  // namespace

CartesianPose::CartesianPose(const Vec3& t, const Quat& r) : translation(t), orientation(r) {
  double norm = orientation.norm();
  if (!(norm > 1e-6) || !std::isfinite(norm)) {
    throw DomainError("quaternion norm too small to normalize");
  }
  if (std::abs(norm - 1.0) > 1e-15) {
    orientation.coeffs() /= norm;
  }
}

CartesianPose CartesianPose::from_transform(const Transform& t) {
  return CartesianPose(t.translation(), Quat(t.linear()));
}

Transform CartesianPose::to_transform() const {
  Transform t = Transform::Identity();
  t.linear() = orientation.toRotationMatrix();
  t.translation() = translation;
  return t;
}

CartesianPose forward_kinematics(const KinematicChain& chain, const VecX& q) {
  check_dof(chain, q, "forward_kinematics");
  Transform t = Transform::Identity();
  for (Eigen::Index i = 0; i < chain.dof(); ++i) {
    const ChainSegment& seg = chain.segments[i];
    t = t * seg.pre_transform * Eigen::AngleAxisd(q[i], seg.axis);
  }
  t = t * chain.tip_transform;
  return CartesianPose::from_transform(t);
}

Jacobian geometric_jacobian(const KinematicChain& chain, const VecX& q) {
  check_dof(chain, q, "geometric_jacobian");
  const Eigen::Index n = chain.dof();
  std::vector<Vec3> origins(n);
  std::vector<Vec3> axes(n);

  Transform t = Transform::Identity();
  for (Eigen::Index i = 0; i < n; ++i) {
    const ChainSegment& seg = chain.segments[i];
    t = t * seg.pre_transform;
    origins[i] = t.translation();
    axes[i] = t.linear() * seg.axis;
    t = t * Eigen::AngleAxisd(q[i], seg.axis);
  }
  Vec3 tip = (t * chain.tip_transform).translation();

  Jacobian jac(6, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    jac.col(i).head<3>() = axes[i].cross(tip - origins[i]);
    jac.col(i).tail<3>() = axes[i];
  }
  return jac;
}

PoseError pose_error(const CartesianPose& current, const CartesianPose& desired) {
  PoseError err;
  err.head<3>() = current.translation - desired.translation;

  Quat q_err = current.orientation * desired.orientation.conjugate();
  if (q_err.w() < 0.0) {
    q_err.coeffs() = -q_err.coeffs();  // shorter rotation
  }
  Vec3 v = q_err.vec();
  double vnorm = v.norm();
  if (vnorm < 1e-12) {
    // Small-angle regime: 2*atan2(|v|, w)/|v| -> 2/w.
    err.tail<3>() = 2.0 * v / q_err.w();
    return err;
  }
  if (q_err.w() < 1e-12) {
    // Rotation by exactly pi: the axis sign is ambiguous. Fix it so that the
    // largest-magnitude component (first index on ties) is positive.
    int idx = 0;
    for (int i = 1; i < 3; ++i) {
      if (std::abs(v[i]) > std::abs(v[idx])) idx = i;
    }
    if (v[idx] < 0.0) v = -v;
    err.tail<3>() = M_PI * v / vnorm;
    return err;
  }
  double angle = 2.0 * std::atan2(vnorm, q_err.w());
  err.tail<3>() = (angle / vnorm) * v;
  return err;
}

}  // namespace cic
