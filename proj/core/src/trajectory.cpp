#include "cic/trajectory.hpp"

#include "cic/errors.hpp"

namespace cic {

TrajectoryTarget trajectory_target(const JointTrajectory& trajectory, double t,
                                   const KinematicChain& chain) {
  const auto& wps = trajectory.waypoints;
  if (wps.empty()) throw EmptyTrajectory("trajectory has no waypoints");
  for (std::size_t i = 0; i + 1 < wps.size(); ++i) {
    if (wps[i + 1].time < wps[i].time) {
      throw NonMonotoneTimestamps("trajectory timestamps decrease at waypoint " +
                                  std::to_string(i + 1));
    }
  }
  for (const auto& wp : wps) {
    if (wp.q.size() != chain.dof()) {
      throw DimensionError("trajectory waypoint dimension does not match chain dof");
    }
  }

  VecX q;
  if (t <= wps.front().time) {
    q = wps.front().q;
  } else if (t >= wps.back().time) {
    q = wps.back().q;
  } else {
    std::size_t hi = 1;
    while (wps[hi].time < t) ++hi;
    const Waypoint& a = wps[hi - 1];
    const Waypoint& b = wps[hi];
    double span = b.time - a.time;
    double s = span > 0.0 ? (t - a.time) / span : 1.0;
    q = a.q + s * (b.q - a.q);
  }

  TrajectoryTarget target;
  target.nullspace_q = q;
  target.pose = forward_kinematics(chain, q);
  return target;
}

}  // namespace cic
