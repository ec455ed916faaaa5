#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace cic {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;
using Quat = Eigen::Quaterniond;
using Transform = Eigen::Isometry3d;

/// 6xn end-effector Jacobian: rows 0-2 linear velocity, rows 3-5 angular.
using Jacobian = Eigen::Matrix<double, 6, Eigen::Dynamic>;

/// n-dimensional joint torques in N*m.
using TorqueVector = Eigen::VectorXd;

}  // namespace cic
