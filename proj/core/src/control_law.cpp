#include "cic/control_law.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <string>

#include "cic/errors.hpp"

namespace cic {

namespace {

void check_columns(const Jacobian& jacobian, const VecX& v, const char* what) {
  if (v.size() != jacobian.cols()) {
    throw DimensionError(std::string(what) + ": expected dimension " +
                         std::to_string(jacobian.cols()) + ", got " + std::to_string(v.size()));
  }
}

}  // namespace

double filter_coefficient(double p, double horizon, double dt) {
  if (!(p > 0.0) || p > 1.0) {
    throw DomainError("filter_coefficient: p must lie in (0, 1]");
  }
  if (!(dt > 0.0) || !(horizon >= dt)) {
    throw DomainError("filter_coefficient: need 0 < dt <= horizon");
  }
  if (p == 1.0) return 1.0;
  return 1.0 - std::pow(1.0 - p, dt / horizon);
}

double saturate(double value, double min_bound, double max_bound) {
  return std::min(std::max(value, min_bound), max_bound);
}

TorqueVector cartesian_impedance_torque(const Jacobian& jacobian, const Vec6& pose_err,
                                        const VecX& qdot, const Mat6& stiffness,
                                        const Mat6& damping) {
  check_columns(jacobian, qdot, "cartesian_impedance_torque qdot");
  return jacobian.transpose() * (-stiffness * pose_err - damping * (jacobian * qdot));
}

MatX nullspace_projector(const Jacobian& jacobian) {
  const Eigen::Index n = jacobian.cols();
  MatX jt = jacobian.transpose();  // n x 6
  Eigen::JacobiSVD<MatX> svd(jt, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sigma = svd.singularValues();
  double cutoff = 1e-6 * sigma(0);

  VecX sigma_inv = VecX::Zero(sigma.size());
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > cutoff) sigma_inv(i) = 1.0 / sigma(i);
  }
  MatX jt_pinv = svd.matrixV() * sigma_inv.asDiagonal() * svd.matrixU().transpose();  // 6 x n
  return MatX::Identity(n, n) - jt * jt_pinv;
}

TorqueVector nullspace_torque(const MatX& projector, const VecX& q, const VecX& qdot,
                              const VecX& q_desired, const MatX& ns_stiffness,
                              const MatX& ns_damping) {
  const Eigen::Index n = projector.rows();
  if (q.size() != n || qdot.size() != n || q_desired.size() != n || ns_stiffness.rows() != n ||
      ns_damping.rows() != n) {
    throw DimensionError("nullspace_torque: inconsistent dimensions");
  }
  VecX tau0 = -ns_stiffness * (q - q_desired) - ns_damping * qdot;
  return projector * tau0;
}

TorqueVector wrench_torque(const Jacobian& jacobian, const Vec6& wrench) {
  return jacobian.transpose() * wrench;
}

TorqueVector rate_limit(const TorqueVector& previous, const TorqueVector& proposed,
                        double max_delta) {
  if (previous.size() != proposed.size()) {
    throw DimensionError("rate_limit: torque dimensions differ");
  }
  if (!(max_delta > 0.0)) throw DomainError("rate_limit: max_delta must be positive");
  VecX delta = proposed - previous;
  double norm = delta.norm();
  if (norm <= max_delta) return proposed;
  return previous + delta * (max_delta / norm);
}

}  // namespace cic
