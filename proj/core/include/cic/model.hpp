#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cic/types.hpp"

namespace cic {

enum class JointKind { Revolute, Fixed };

/// One joint of the parsed robot description. `origin` is the rigid
/// transform from the parent link frame to the joint (= child link) frame;
/// `axis` is a unit vector expressed in the joint frame.
struct JointSpec {
  std::string name;
  JointKind kind = JointKind::Revolute;
  std::string parent_link;
  std::string child_link;
  Transform origin = Transform::Identity();
  Vec3 axis = Vec3::UnitX();
  std::optional<double> lower_limit;   // rad
  std::optional<double> upper_limit;   // rad
  std::optional<double> effort_limit;  // N*m, > 0 when present
};

/// Inertial description of one link: mass, center of mass in the link
/// frame, and the rotational inertia about that center of mass.
struct LinkSpec {
  std::string name;
  double mass = 0.0;               // kg
  Vec3 com = Vec3::Zero();         // m
  Mat3 inertia = Mat3::Zero();     // kg*m^2, symmetric PSD
};

/// Validated articulated structure: a tree of links connected by joints.
struct RobotModel {
  std::string name;
  std::vector<LinkSpec> links;
  std::vector<JointSpec> joints;
  std::string root_link;

  const LinkSpec* find_link(const std::string& link_name) const;
  const JointSpec* find_joint(const std::string& joint_name) const;
  /// Joint whose child is `link_name`, nullptr for the root.
  const JointSpec* parent_joint(const std::string& link_name) const;
};

/// One actuated joint of an extracted chain together with the rigid body it
/// drives. Links attached downstream through fixed joints on the chain path
/// are merged into `mass`/`com`/`inertia` (all expressed in the joint frame).
struct ChainSegment {
  std::string joint_name;
  Transform pre_transform = Transform::Identity();  // previous joint frame -> this joint frame, q = 0
  Vec3 axis = Vec3::UnitZ();                        // unit, joint frame
  std::optional<double> lower_limit;
  std::optional<double> upper_limit;
  std::optional<double> effort_limit;
  double mass = 0.0;
  Vec3 com = Vec3::Zero();
  Mat3 inertia = Mat3::Zero();  // about com, joint-frame axes
};

/// Serial base->tip chain: n actuated revolute joints with fixed transforms
/// folded in. Immutable after extraction; safe to share across threads.
struct KinematicChain {
  std::string base_link;
  std::string tip_link;
  std::vector<ChainSegment> segments;
  Transform tip_transform = Transform::Identity();  // last joint frame -> tip frame

  Eigen::Index dof() const { return static_cast<Eigen::Index>(segments.size()); }
  /// Per-joint effort limits; +infinity where the model declares none.
  VecX effort_limits() const;
};

/// Extracts the actuated serial chain between two links of the model.
/// Fixed joints on the path fold into the neighbouring segment transforms
/// and the inertias of their child links merge into the preceding body.
/// Throws PathError when tip is not a strict descendant of base.
KinematicChain extract_chain(const RobotModel& model, const std::string& base,
                             const std::string& tip);

}  // namespace cic
