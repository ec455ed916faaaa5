#pragma once

#include <vector>

#include "cic/kinematics.hpp"
#include "cic/model.hpp"
#include "cic/types.hpp"

namespace cic {

struct Waypoint {
  double time = 0.0;  // s, nondecreasing along the trajectory
  VecX q;             // rad
};

struct JointTrajectory {
  std::vector<Waypoint> waypoints;
};

struct TrajectoryTarget {
  VecX nullspace_q;    // interpolated q^D
  CartesianPose pose;  // FK of the interpolated configuration
};

/// Samples the trajectory at time t (clamped to the endpoints): linear
/// interpolation between waypoints drives both the nullspace target and,
/// through forward kinematics, the Cartesian pose target.
TrajectoryTarget trajectory_target(const JointTrajectory& trajectory, double t,
                                   const KinematicChain& chain);

}  // namespace cic
