#pragma once

#include "cic/types.hpp"

namespace cic {

/// Low-pass coefficient a such that stepping x += a*(target - x) at period
/// `dt` covers fraction `p` of the initial gap after `horizon` seconds:
/// a = 1 - (1-p)^(dt/horizon).
double filter_coefficient(double p, double horizon, double dt);

/// Elementwise clamp.
double saturate(double value, double min_bound, double max_bound);

template <typename Derived, typename DerivedLo, typename DerivedHi>
auto saturate(const Eigen::MatrixBase<Derived>& value, const Eigen::MatrixBase<DerivedLo>& lo,
              const Eigen::MatrixBase<DerivedHi>& hi) {
  return value.cwiseMax(lo.derived()).cwiseMin(hi.derived()).eval();
}

/// tau = J^T (-K * pose_error - D * J * qdot): task-space spring-damper
/// pulled back to joint torques.
TorqueVector cartesian_impedance_torque(const Jacobian& jacobian, const Vec6& pose_err,
                                        const VecX& qdot, const Mat6& stiffness,
                                        const Mat6& damping);

/// N = I - J^T (J^T)^+ with the pseudoinverse taken by SVD; singular values
/// below 1e-6 * sigma_max are truncated so the projector stays defined at
/// kinematic singularities. Satisfies J N = 0 and N N = N.
MatX nullspace_projector(const Jacobian& jacobian);

/// N * (-K_ns (q - q_desired) - D_ns qdot): joint-space spring-damper
/// projected so it cannot push on the end effector (statically).
TorqueVector nullspace_torque(const MatX& projector, const VecX& q, const VecX& qdot,
                              const VecX& q_desired, const MatX& ns_stiffness,
                              const MatX& ns_damping);

/// tau = J^T * wrench: feed-forward force/torque command at the end effector.
TorqueVector wrench_torque(const Jacobian& jacobian, const Vec6& wrench);

/// Euclidean-norm rate limit: returns `proposed` if ||proposed - previous||
/// <= max_delta, otherwise the same direction scaled to max_delta.
TorqueVector rate_limit(const TorqueVector& previous, const TorqueVector& proposed,
                        double max_delta);

}  // namespace cic
