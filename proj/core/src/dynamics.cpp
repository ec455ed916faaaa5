#include "cic/dynamics.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>
#include <vector>

#include "cic/errors.hpp"

namespace cic {

namespace {

void check_dim(Eigen::Index expected, const VecX& v, const char* what) {
  if (v.size() != expected) {
    throw DimensionError(std::string(what) + ": expected dimension " + std::to_string(expected) +
                         ", got " + std::to_string(v.size()));
  }
}

struct JointTransform {
  Mat3 rotation;    // frame i -> frame i-1
  Vec3 translation; // origin of frame i in frame i-1
};

JointTransform joint_transform(const ChainSegment& seg, double q) {
  JointTransform x;
  x.rotation = seg.pre_transform.linear() * Eigen::AngleAxisd(q, seg.axis).toRotationMatrix();
  x.translation = seg.pre_transform.translation();
  return x;
}

Mat3 inertia_about_point(double mass, const Vec3& com, const Mat3& inertia_com) {
  // Parallel axis: inertia about the frame origin from inertia about com.
  return inertia_com + mass * (com.squaredNorm() * Mat3::Identity() - com * com.transpose());
}

}  // namespace

TorqueVector inverse_dynamics(const KinematicChain& chain, const VecX& q, const VecX& qdot,
                              const VecX& qddot, const Vec3& gravity) {
  const Eigen::Index n = chain.dof();
  check_dim(n, q, "inverse_dynamics q");
  check_dim(n, qdot, "inverse_dynamics qdot");
  check_dim(n, qddot, "inverse_dynamics qddot");

  std::vector<JointTransform> xf(n);
  for (Eigen::Index i = 0; i < n; ++i) xf[i] = joint_transform(chain.segments[i], q[i]);

  // Outward pass: velocities/accelerations in each link frame. Gravity is
  // folded in as a fictitious base acceleration.
  std::vector<Vec3> omega(n), alpha(n), acc(n);
  std::vector<Vec3> body_force(n), body_moment(n);
  Vec3 omega_prev = Vec3::Zero();
  Vec3 alpha_prev = Vec3::Zero();
  Vec3 acc_prev = -gravity;
  for (Eigen::Index i = 0; i < n; ++i) {
    const ChainSegment& seg = chain.segments[i];
    Mat3 rt = xf[i].rotation.transpose();
    Vec3 w_parent = rt * omega_prev;
    omega[i] = w_parent + qdot[i] * seg.axis;
    alpha[i] = rt * alpha_prev + w_parent.cross(qdot[i] * seg.axis) + qddot[i] * seg.axis;
    acc[i] = rt * (acc_prev + alpha_prev.cross(xf[i].translation) +
                   omega_prev.cross(omega_prev.cross(xf[i].translation)));

    Vec3 acc_com = acc[i] + alpha[i].cross(seg.com) + omega[i].cross(omega[i].cross(seg.com));
    body_force[i] = seg.mass * acc_com;
    body_moment[i] = seg.inertia * alpha[i] + omega[i].cross(seg.inertia * omega[i]);

    omega_prev = omega[i];
    alpha_prev = alpha[i];
    acc_prev = acc[i];
  }

  // Inward pass: accumulate forces and project onto each joint axis.
  TorqueVector tau(n);
  Vec3 f_child = Vec3::Zero();
  Vec3 m_child = Vec3::Zero();
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    const ChainSegment& seg = chain.segments[i];
    Vec3 f = body_force[i] + f_child;
    Vec3 m = body_moment[i] + seg.com.cross(body_force[i]) + m_child;
    tau[i] = seg.axis.dot(m);
    if (i > 0) {
      f_child = xf[i].rotation * f;
      m_child = xf[i].rotation * m + xf[i].translation.cross(f_child);
    }
  }
  return tau;
}

MatX mass_matrix(const KinematicChain& chain, const VecX& q) {
  const Eigen::Index n = chain.dof();
  check_dim(n, q, "mass_matrix q");

  std::vector<JointTransform> xf(n);
  for (Eigen::Index i = 0; i < n; ++i) xf[i] = joint_transform(chain.segments[i], q[i]);

  // Composite bodies: subtree i..n-1 expressed in frame i.
  std::vector<double> comp_mass(n);
  std::vector<Vec3> comp_com(n);
  std::vector<Mat3> comp_inertia(n);
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    const ChainSegment& seg = chain.segments[i];
    comp_mass[i] = seg.mass;
    comp_com[i] = seg.com;
    comp_inertia[i] = seg.inertia;
    if (i + 1 < n) {
      double child_mass = comp_mass[i + 1];
      Vec3 child_com = xf[i + 1].rotation * comp_com[i + 1] + xf[i + 1].translation;
      Mat3 child_inertia =
          xf[i + 1].rotation * comp_inertia[i + 1] * xf[i + 1].rotation.transpose();

      double total = comp_mass[i] + child_mass;
      Vec3 total_com = comp_com[i];
      if (total > 0.0) {
        total_com = (comp_mass[i] * comp_com[i] + child_mass * child_com) / total;
      }
      auto shift = [](double m, const Vec3& d) -> Mat3 {
        return m * (d.squaredNorm() * Mat3::Identity() - d * d.transpose());
      };
      comp_inertia[i] = comp_inertia[i] + shift(comp_mass[i], comp_com[i] - total_com) +
                        child_inertia + shift(child_mass, child_com - total_com);
      comp_mass[i] = total;
      comp_com[i] = total_com;
    }
  }

  MatX m = MatX::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vec3 axis_i = chain.segments[i].axis;
    // Force couple at frame-i origin from a unit angular acceleration of the
    // composite body about axis_i.
    Mat3 inertia_origin = inertia_about_point(comp_mass[i], comp_com[i], comp_inertia[i]);
    Vec3 moment = inertia_origin * axis_i;
    Vec3 force = comp_mass[i] * axis_i.cross(comp_com[i]);
    m(i, i) = axis_i.dot(moment);
    for (Eigen::Index j = i - 1; j >= 0; --j) {
      // Move the couple from frame j+1 to frame j.
      Vec3 force_parent = xf[j + 1].rotation * force;
      moment = xf[j + 1].rotation * moment + xf[j + 1].translation.cross(force_parent);
      force = force_parent;
      m(j, i) = chain.segments[j].axis.dot(moment);
      m(i, j) = m(j, i);
    }
  }
  return m;
}

TorqueVector bias_torques(const KinematicChain& chain, const VecX& q, const VecX& qdot) {
  return inverse_dynamics(chain, q, qdot, VecX::Zero(chain.dof()), Vec3::Zero());
}

TorqueVector gravity_torques(const KinematicChain& chain, const VecX& q, const Vec3& gravity) {
  const VecX zero = VecX::Zero(chain.dof());
  return inverse_dynamics(chain, q, zero, zero, gravity);
}

DynamicsTerms dynamics_terms(const KinematicChain& chain, const VecX& q, const VecX& qdot,
                             const Vec3& gravity) {
  DynamicsTerms terms;
  terms.mass = mass_matrix(chain, q);
  terms.bias = bias_torques(chain, q, qdot);
  terms.gravity = gravity_torques(chain, q, gravity);
  return terms;
}

JointState forward_step(const KinematicChain& chain, const JointState& state,
                        const TorqueVector& tau_c, const TorqueVector& tau_ext,
                        const Vec3& gravity, double dt) {
  const Eigen::Index n = chain.dof();
  check_dim(n, state.q, "forward_step q");
  check_dim(n, state.qdot, "forward_step qdot");
  check_dim(n, tau_c, "forward_step tau_c");
  check_dim(n, tau_ext, "forward_step tau_ext");
  if (!(dt > 0.0)) throw DomainError("forward_step: dt must be positive");

  MatX m = mass_matrix(chain, state.q);
  Eigen::SelfAdjointEigenSolver<MatX> eig(m);
  double lo = eig.eigenvalues().minCoeff();
  double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > 1e12) {
    throw SingularMassMatrix("mass matrix is numerically singular (condition number above 1e12)");
  }

  VecX rhs = tau_c + tau_ext - bias_torques(chain, state.q, state.qdot) -
             gravity_torques(chain, state.q, gravity);
  VecX qddot = m.ldlt().solve(rhs);

  JointState next;
  next.qdot = state.qdot + qddot * dt;
  next.q = state.q + next.qdot * dt;
  return next;
}

}  // namespace cic
