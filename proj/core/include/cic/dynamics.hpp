#pragma once

#include "cic/model.hpp"
#include "cic/types.hpp"

namespace cic {

struct JointState {
  VecX q;     // rad
  VecX qdot;  // rad/s
};

/// Joint-space dynamics terms at one state: symmetric positive-definite
/// inertia matrix, Coriolis/centripetal bias C(q,qd)*qd, and gravity torques.
struct DynamicsTerms {
  MatX mass;     // n x n
  VecX bias;     // n
  VecX gravity;  // n
};

/// Recursive Newton-Euler: tau = M(q)*qddot + C(q,qdot)*qdot + g(q) for the
/// given gravity field (m/s^2, base frame).
TorqueVector inverse_dynamics(const KinematicChain& chain, const VecX& q, const VecX& qdot,
                              const VecX& qddot, const Vec3& gravity);

/// Joint-space inertia matrix via the composite-rigid-body algorithm.
MatX mass_matrix(const KinematicChain& chain, const VecX& q);

/// C(q,qdot)*qdot, quadratic-homogeneous in qdot.
TorqueVector bias_torques(const KinematicChain& chain, const VecX& q, const VecX& qdot);

/// Torques holding the chain static against the given gravity field.
TorqueVector gravity_torques(const KinematicChain& chain, const VecX& q, const Vec3& gravity);

DynamicsTerms dynamics_terms(const KinematicChain& chain, const VecX& q, const VecX& qdot,
                             const Vec3& gravity);

/// One fixed-step forward-dynamics update, semi-implicit Euler:
///   qddot = M^-1 (tau_c + tau_ext - bias - gravity)
///   qdot' = qdot + qddot*dt;  q' = q + qdot'*dt
/// Throws SingularMassMatrix when cond(M) exceeds 1e12.
JointState forward_step(const KinematicChain& chain, const JointState& state,
                        const TorqueVector& tau_c, const TorqueVector& tau_ext,
                        const Vec3& gravity, double dt);

}  // namespace cic
