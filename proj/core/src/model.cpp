#include "cic/model.hpp"

#include <algorithm>
#include <limits>

#include "cic/errors.hpp"

namespace cic {

const LinkSpec* RobotModel::find_link(const std::string& link_name) const {
  for (const auto& link : links) {
    if (link.name == link_name) return &link;
  }
  return nullptr;
}

const JointSpec* RobotModel::find_joint(const std::string& joint_name) const {
  for (const auto& joint : joints) {
    if (joint.name == joint_name) return &joint;
  }
  return nullptr;
}

const JointSpec* RobotModel::parent_joint(const std::string& link_name) const {
  for (const auto& joint : joints) {
    if (joint.child_link == link_name) return &joint;
  }
  return nullptr;
}

VecX KinematicChain::effort_limits() const {
  VecX limits(dof());
  for (Eigen::Index i = 0; i < dof(); ++i) {
    limits[i] = segments[i].effort_limit.value_or(std::numeric_limits<double>::infinity());
  }
  return limits;
}

namespace {

/// Parallel-axis composition of (mass, com, inertia-about-com) triplets.
/// `attach` maps the incoming body's frame into the target frame.
void merge_body(double& mass, Vec3& com, Mat3& inertia, double add_mass, const Vec3& add_com_local,
                const Mat3& add_inertia_local, const Transform& attach) {
  Vec3 add_com = attach * add_com_local;
  Mat3 add_inertia = attach.linear() * add_inertia_local * attach.linear().transpose();

  double total = mass + add_mass;
  Vec3 total_com = com;
  if (total > 0.0) {
    total_com = (mass * com + add_mass * add_com) / total;
  }
  auto shift = [](double m, const Vec3& d) -> Mat3 {
    return m * (d.squaredNorm() * Mat3::Identity() - d * d.transpose());
  };
  inertia = inertia + shift(mass, com - total_com) + add_inertia +
            shift(add_mass, add_com - total_com);
  mass = total;
  com = total_com;
}

}  // namespace

KinematicChain extract_chain(const RobotModel& model, const std::string& base,
                             const std::string& tip) {
  if (!model.find_link(base)) throw PathError("unknown base link '" + base + "'");
  if (!model.find_link(tip)) throw PathError("unknown tip link '" + tip + "'");
  if (base == tip) {
    throw PathError("base and tip are the same link '" + base + "'; a chain needs n >= 1");
  }

  // Ancestor walk tip -> base; fails if base is not an ancestor.
  std::vector<const JointSpec*> path;
  std::string cursor = tip;
  while (cursor != base) {
    const JointSpec* joint = model.parent_joint(cursor);
    if (!joint) {
      throw PathError("tip '" + tip + "' is not a descendant of base '" + base + "'");
    }
    path.push_back(joint);
    cursor = joint->parent_link;
  }
  std::reverse(path.begin(), path.end());

  KinematicChain chain;
  chain.base_link = base;
  chain.tip_link = tip;

  // `offset` accumulates fixed-joint transforms since the last actuated
  // joint frame; it folds into the next segment's pre_transform (or the tip
  // transform) and places rigidly attached link bodies.
  Transform offset = Transform::Identity();
  for (const JointSpec* joint : path) {
    const LinkSpec* child = model.find_link(joint->child_link);
    if (joint->kind == JointKind::Fixed) {
      offset = offset * joint->origin;
      if (!chain.segments.empty()) {
        ChainSegment& seg = chain.segments.back();
        merge_body(seg.mass, seg.com, seg.inertia, child->mass, child->com, child->inertia,
                   offset);
      }
      continue;
    }
    ChainSegment seg;
    seg.joint_name = joint->name;
    seg.pre_transform = offset * joint->origin;
    seg.axis = joint->axis;
    seg.lower_limit = joint->lower_limit;
    seg.upper_limit = joint->upper_limit;
    seg.effort_limit = joint->effort_limit;
    seg.mass = child->mass;
    seg.com = child->com;
    seg.inertia = child->inertia;
    chain.segments.push_back(std::move(seg));
    offset = Transform::Identity();
  }
  if (chain.segments.empty()) {
    throw PathError("no actuated joints between '" + base + "' and '" + tip + "'");
  }
  chain.tip_transform = offset;
  return chain;
}

}  // namespace cic
