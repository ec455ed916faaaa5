#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cic/controller.hpp"
#include "cic/errors.hpp"
#include "cic/kinematics.hpp"
#include "cic/trajectory.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace cic;

namespace {

Jacobian random_jacobian(Eigen::Index n, double lo = -1.0, double hi = 1.0) {
  Jacobian jac(6, n);
  for (Eigen::Index r = 0; r < 6; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) jac(r, c) = test::uniform(lo, hi);
  }
  return jac;
}

ControllerConfig basic_config(Eigen::Index n, double dt = 1e-3) {
  ControllerConfig cfg;
  cfg.dof = n;
  cfg.dt = dt;
  cfg.gains = ImpedanceGains::zero(n);
  cfg.limits = SafetyLimits::unbounded(n);
  cfg.filter = {1.0, dt};  // unfiltered unless a test overrides
  return cfg;
}

ControllerTargets targets_at(const CartesianPose& pose, const VecX& q) {
  ControllerTargets t;
  t.pose = pose;
  t.nullspace_q = q;
  return t;
}

}  // namespace

TEST_CASE("filter_coefficient closed form") {
  CHECK(filter_coefficient(1.0, 0.5, 1e-3) == 1.0);
  CHECK(filter_coefficient(0.5, 1e-3, 1e-3) == doctest::Approx(0.5).epsilon(1e-15));

  double a = filter_coefficient(0.99, 1.0, 1e-3);
  CHECK(a == doctest::Approx(0.0045946).epsilon(1e-4));
  // Step-simulation oracle: 1000 steps must cover 0.99 of the gap.
  double x = 0.0;
  for (int k = 0; k < 1000; ++k) x += a * (1.0 - x);
  CHECK(std::abs(x - 0.99) <= 1e-6);

  CHECK_THROWS_AS(filter_coefficient(0.0, 1.0, 1e-3), DomainError);
  CHECK_THROWS_AS(filter_coefficient(1.1, 1.0, 1e-3), DomainError);
  CHECK_THROWS_AS(filter_coefficient(0.5, 1e-4, 1e-3), DomainError);  // horizon < dt
  CHECK_THROWS_AS(filter_coefficient(0.5, 1.0, 0.0), DomainError);
}

TEST_CASE("filter bank step: scalar law and fixed point") {
  FilterBank bank;
  bank.gains_coeff = 0.5;
  bank.pose_coeff = 0.5;
  bank.wrench_coeff = 0.5;
  bank.nullspace_coeff = 0.5;
  bank.gains_value = ImpedanceGains::zero(2);
  bank.gains_target = ImpedanceGains::zero(2);
  bank.gains_target.stiffness(0, 0) = 200.0;
  bank.nullspace_q_value = VecX::Zero(2);
  bank.nullspace_q_target = VecX::Zero(2);
  SafetyLimits limits = SafetyLimits::unbounded(2);

  bank.step(limits);
  CHECK(bank.gains_value.stiffness(0, 0) == doctest::Approx(100.0).epsilon(1e-15));
  bank.step(limits);
  CHECK(bank.gains_value.stiffness(0, 0) == doctest::Approx(150.0).epsilon(1e-15));

  // Fixed point is exact (bitwise) once value == target.
  bank.gains_value.stiffness(0, 0) = 200.0;
  bank.step(limits);
  CHECK(bank.gains_value.stiffness(0, 0) == 200.0);
}

TEST_CASE("filter bank step: orientation by spherical interpolation") {
  FilterBank bank;
  bank.pose_coeff = 0.5;
  bank.gains_value = ImpedanceGains::zero(1);
  bank.gains_target = ImpedanceGains::zero(1);
  bank.nullspace_q_value = VecX::Zero(1);
  bank.nullspace_q_target = VecX::Zero(1);
  bank.pose_value = CartesianPose(Vec3::Zero(), Quat::Identity());
  bank.pose_target =
      CartesianPose(Vec3::Zero(), Quat(Eigen::AngleAxisd(M_PI / 2.0, Vec3::UnitZ())));

  bank.step(SafetyLimits::unbounded(1));
  Quat expected(Eigen::AngleAxisd(M_PI / 4.0, Vec3::UnitZ()));
  CHECK(std::abs(bank.pose_value.orientation.dot(expected)) >= 1.0 - 1e-9);
}

TEST_CASE("saturate clamps elementwise") {
  CHECK(saturate(0.5, 0.0, 1.0) == 0.5);
  CHECK(saturate(1500.0, 0.0, 1000.0) == 1000.0);
  Vec6 w;
  w << 0, -30, 0, 5, 0, 0;
  Vec6 lo = Vec6::Constant(-20), hi = Vec6::Constant(20);
  Vec6 clamped = saturate(w, lo, hi);
  CHECK(clamped[1] == -20.0);
  CHECK(clamped[0] == 0.0);
  CHECK(clamped[3] == 5.0);
}

TEST_CASE("cartesian_impedance_torque") {
  SUBCASE("equilibrium gives zero") {
    Jacobian jac = random_jacobian(7);
    CHECK(cartesian_impedance_torque(jac, Vec6::Zero(), VecX::Zero(7), Mat6::Identity(),
                                     Mat6::Identity())
              .norm() == 0.0);
  }
  SUBCASE("scalar spring arithmetic") {
    Jacobian jac = Jacobian::Zero(6, 1);
    jac(0, 0) = 1.0;  // pure x-translation map
    Vec6 err = Vec6::Zero();
    err[0] = 0.1;
    Mat6 k = Mat6::Zero();
    k.diagonal().setConstant(100.0);
    TorqueVector tau = cartesian_impedance_torque(jac, err, VecX::Zero(1), k, Mat6::Zero());
    CHECK(tau[0] == doctest::Approx(-10.0).epsilon(1e-15));
  }
  SUBCASE("random case matches the naive triple-loop oracle") {
    for (int trial = 0; trial < 30; ++trial) {
      Eigen::Index n = 3 + trial % 5;
      Jacobian jac = random_jacobian(n);
      Vec6 err = Vec6::Random();
      VecX qd = test::random_vector(n, -2, 2);
      Mat6 k = Mat6::Random().selfadjointView<Eigen::Upper>();
      Mat6 d = Mat6::Random().selfadjointView<Eigen::Upper>();
      TorqueVector got = cartesian_impedance_torque(jac, err, qd, k, d);
      VecX want = oracle::naive_task_torque(jac, k, err, d, qd);
      CHECK((got - want).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(cartesian_impedance_torque(random_jacobian(3), Vec6::Zero(), VecX::Zero(4),
                                               Mat6::Zero(), Mat6::Zero()),
                    DimensionError);
  }
}

TEST_CASE("nullspace_projector") {
  SUBCASE("square invertible task leaves no nullspace") {
    for (int trial = 0; trial < 20; ++trial) {
      Jacobian jac = random_jacobian(6);
      Eigen::JacobiSVD<MatX> svd(jac);
      if (svd.singularValues().minCoeff() < 1e-2) continue;  // keep well-conditioned
      CHECK(nullspace_projector(jac).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }
  SUBCASE("1x2 toy task: hand pseudoinverse gives diag(0, 1)") {
    // J = [1 0], so (J^T)^+ = [1 0] and N = diag(0, 1). Embedded in the 6xn
    // convention as a single constrained translation row.
    Jacobian jac = Jacobian::Zero(6, 2);
    jac(0, 0) = 1.0;
    MatX n = nullspace_projector(jac);
    CHECK(std::abs(n(0, 0)) <= 1e-12);
    CHECK(std::abs(n(0, 1)) <= 1e-12);
    CHECK(std::abs(n(1, 0)) <= 1e-12);
    CHECK(n(1, 1) == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("projector identities on the 7-dof chain") {
    KinematicChain chain = test::panda_chain();
    for (int trial = 0; trial < 100; ++trial) {
      VecX q = test::random_vector(7, -2.0, 2.0);
      Jacobian jac = geometric_jacobian(chain, q);
      MatX n = nullspace_projector(jac);
      CHECK((jac * n).cwiseAbs().maxCoeff() <= 1e-10);
      CHECK((n * n - n).cwiseAbs().maxCoeff() <= 1e-10);
      CHECK((n - n.transpose()).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }
  SUBCASE("SVD realization matches the closed-form pseudoinverse away from singularity") {
    KinematicChain chain = test::panda_chain();
    for (int trial = 0; trial < 20; ++trial) {
      VecX q = test::random_vector(7, -1.5, 1.5);
      Jacobian jac = geometric_jacobian(chain, q);
      Eigen::JacobiSVD<MatX> svd(jac);
      if (svd.singularValues().minCoeff() < 1e-2) continue;
      MatX n_closed =
          MatX::Identity(7, 7) - jac.transpose() * oracle::closed_form_jt_pinv(jac);
      CHECK((nullspace_projector(jac) - n_closed).cwiseAbs().maxCoeff() <= 1e-9);
    }
  }
  SUBCASE("stays defined at a kinematic singularity") {
    KinematicChain chain = test::panda_chain();
    VecX q = VecX::Zero(7);  // fully stretched: singular
    MatX n = nullspace_projector(geometric_jacobian(chain, q));
    CHECK(n.allFinite());
    CHECK((n * n - n).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("nullspace_torque") {
  KinematicChain chain = test::panda_chain();
  MatX k = 10.0 * MatX::Identity(7, 7);
  MatX d = 2.0 * MatX::Identity(7, 7);
  SUBCASE("zero at the desired configuration") {
    VecX q = test::random_vector(7, -2, 2);
    MatX n = nullspace_projector(geometric_jacobian(chain, q));
    CHECK(nullspace_torque(n, q, VecX::Zero(7), q, k, d).norm() == 0.0);
  }
  SUBCASE("annihilated by a zero projector") {
    MatX n = MatX::Zero(7, 7);
    CHECK(nullspace_torque(n, VecX::Ones(7), VecX::Ones(7), VecX::Zero(7), k, d).norm() == 0.0);
  }
  SUBCASE("projected torque is invisible to the task: J N tau0 = 0") {
    for (int trial = 0; trial < 50; ++trial) {
      VecX q = test::random_vector(7, -2, 2);
      Jacobian jac = geometric_jacobian(chain, q);
      MatX n = nullspace_projector(jac);
      VecX tau = nullspace_torque(n, q, test::random_vector(7, -1, 1),
                                  test::random_vector(7, -2, 2), k, d);
      CHECK((jac * tau).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }
  SUBCASE("dimension mismatch") {
    CHECK_THROWS_AS(
        nullspace_torque(MatX::Zero(7, 7), VecX::Zero(6), VecX::Zero(7), VecX::Zero(7), k, d),
        DimensionError);
  }
}

TEST_CASE("wrench_torque") {
  SUBCASE("zero wrench") {
    CHECK(wrench_torque(random_jacobian(7), Vec6::Zero()).norm() == 0.0);
  }
  SUBCASE("single column transpose map") {
    Jacobian jac = Jacobian::Zero(6, 1);
    jac(2, 0) = 1.0;
    Vec6 f = Vec6::Zero();
    f[2] = 5.0;
    CHECK(wrench_torque(jac, f)[0] == doctest::Approx(5.0).epsilon(1e-15));
  }
  SUBCASE("matches the naive oracle") {
    for (int trial = 0; trial < 30; ++trial) {
      Jacobian jac = random_jacobian(7);
      Vec6 f = Vec6::Random();
      VecX want = oracle::naive_mat_vec(jac.transpose(), f);
      CHECK((wrench_torque(jac, f) - want).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("rate_limit") {
  VecX prev = VecX::Zero(3);
  SUBCASE("within the limit passes through unchanged") {
    VecX next(3);
    next << 0.2, -0.3, 0.1;
    CHECK((rate_limit(prev, next, 1.0) - next).norm() == 0.0);
  }
  SUBCASE("norm clamp preserves direction") {
    VecX next(3);
    next << 10.0, 0.0, 0.0;
    VecX out = rate_limit(prev, next, 1.0);
    CHECK(out[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(out[1] == 0.0);
  }
  SUBCASE("fuzz: the step never exceeds the limit") {
    for (int trial = 0; trial < 500; ++trial) {
      VecX a = test::random_vector(5, -50, 50);
      VecX b = test::random_vector(5, -50, 50);
      double limit = test::uniform(0.01, 5.0);
      CHECK((rate_limit(a, b, limit) - a).norm() <= limit + 1e-12);
    }
  }
  SUBCASE("bad arguments") {
    CHECK_THROWS_AS(rate_limit(VecX::Zero(2), VecX::Zero(3), 1.0), DimensionError);
    CHECK_THROWS_AS(rate_limit(prev, prev, 0.0), DomainError);
  }
}

TEST_CASE("set_targets stages values; filtering applies them gradually") {
  ControllerConfig cfg = basic_config(2);
  cfg.filter = {0.99, 0.5};  // a < 1 so staging is observable
  CartesianPose pose0(Vec3(0.5, 0, 0.2), Quat::Identity());
  CartesianImpedanceController ctl(cfg, targets_at(pose0, VecX::Zero(2)));

  TargetUpdate update;
  update.pose = CartesianPose(Vec3(0.6, 0, 0.2), Quat::Identity());
  ctl.set_targets(update);
  // Before any control step the effective target is unchanged.
  CHECK(ctl.filters().pose_value.translation.x() == 0.5);
  CHECK(ctl.filters().pose_target.translation.x() == 0.6);
}

TEST_CASE("nullspace target follows the filter closed form") {
  const double dt = 1e-3, horizon = 0.5, p = 0.99;
  ControllerConfig cfg = basic_config(2, dt);
  cfg.filter = {p, horizon};
  CartesianPose pose0(Vec3::Zero(), Quat::Identity());
  CartesianImpedanceController ctl(cfg, targets_at(pose0, VecX::Zero(2)));

  TargetUpdate update;
  update.nullspace_q = VecX::Ones(2);
  ctl.set_targets(update);

  ControlInputs inputs;
  inputs.q = VecX::Zero(2);
  inputs.qdot = VecX::Zero(2);
  inputs.jacobian = Jacobian::Zero(6, 2);
  inputs.jacobian(0, 0) = 1.0;
  inputs.pose = pose0;
  const int steps = static_cast<int>(horizon / dt);
  for (int k = 0; k < steps; ++k) ctl.control_step(inputs);
  // After `horizon` seconds exactly fraction p of the gap is covered.
  CHECK(std::abs(ctl.filters().nullspace_q_value[0] - p) <= 1e-6);
}

TEST_CASE("scalar filtering converges monotonically to a constant target") {
  FilterBank bank;
  bank.gains_coeff = filter_coefficient(0.95, 0.2, 1e-3);
  bank.gains_value = ImpedanceGains::zero(1);
  bank.gains_target = ImpedanceGains::zero(1);
  bank.gains_target.stiffness(0, 0) = 120.0;
  bank.nullspace_q_value = VecX::Zero(1);
  bank.nullspace_q_target = VecX::Zero(1);
  SafetyLimits limits = SafetyLimits::unbounded(1);
  double prev = 0.0;
  for (int k = 0; k < 2000; ++k) {
    bank.step(limits);
    double v = bank.gains_value.stiffness(0, 0);
    CHECK(v >= prev);       // monotone
    CHECK(v <= 120.0);      // never overshoots
    prev = v;
  }
  CHECK(prev == doctest::Approx(120.0).epsilon(1e-9));
}

TEST_CASE("set_gains with a ratio derives damping from the staged stiffness target") {
  ControllerConfig cfg = basic_config(2);
  CartesianImpedanceController ctl(
      cfg, targets_at(CartesianPose(Vec3::Zero(), Quat::Identity()), VecX::Zero(2)));
  GainUpdate update;
  Mat6 k = Mat6::Zero();
  k.diagonal() << 100, 100, 100, 25, 25, 25;
  update.stiffness = k;
  update.damping_ratio = 1.0;
  ctl.set_gains(update);
  CHECK(ctl.filters().gains_target.damping(0, 0) == doctest::Approx(20.0).epsilon(1e-12));
  CHECK(ctl.filters().gains_target.damping(3, 3) == doctest::Approx(10.0).epsilon(1e-12));

  GainUpdate conflict;
  conflict.damping = Mat6::Identity();
  conflict.damping_ratio = 0.5;
  CHECK_THROWS_AS(ctl.set_gains(conflict), DomainError);
}

TEST_CASE("gain and wrench targets are saturated with warnings") {
  ControllerConfig cfg = basic_config(2);
  cfg.limits.stiffness_max = Mat6::Constant(1000.0);
  cfg.limits.wrench_min = Vec6::Constant(-20.0);
  cfg.limits.wrench_max = Vec6::Constant(20.0);
  CartesianImpedanceController ctl(
      cfg, targets_at(CartesianPose(Vec3::Zero(), Quat::Identity()), VecX::Zero(2)));

  GainUpdate gains;
  Mat6 k = Mat6::Zero();
  k.diagonal().setConstant(1500.0);
  gains.stiffness = k;
  auto warnings = ctl.set_gains(gains);
  CHECK(!warnings.empty());
  CHECK(ctl.filters().gains_target.stiffness(0, 0) == 1000.0);

  TargetUpdate update;
  Vec6 wrench;
  wrench << 0, -30, 0, 0, 0, 0;
  update.wrench = wrench;
  warnings = ctl.set_targets(update);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].parameter == "wrench(1)");
  CHECK(warnings[0].requested == -30.0);
  CHECK(warnings[0].applied == -20.0);
}

TEST_CASE("control_step global equilibrium gives zero torque") {
  KinematicChain chain = test::panda_chain();
  VecX q = test::random_vector(7, -1.5, 1.5);
  CartesianPose pose = forward_kinematics(chain, q);

  ControllerConfig cfg = basic_config(7);
  cfg.gains.stiffness.diagonal() << 200, 200, 200, 20, 20, 20;
  cfg.gains.damping = damping_from_ratio(cfg.gains.stiffness, 1.0);
  cfg.gains.ns_stiffness = 10.0 * MatX::Identity(7, 7);
  cfg.gains.ns_damping = 2.0 * MatX::Identity(7, 7);
  CartesianImpedanceController ctl(cfg, targets_at(pose, q));

  ControlInputs inputs;
  inputs.q = q;
  inputs.qdot = VecX::Zero(7);
  inputs.jacobian = geometric_jacobian(chain, q);
  inputs.pose = pose;
  CHECK(ctl.control_step(inputs).torque.norm() == 0.0);
}

TEST_CASE("zero stiffness turns the controller into a pure wrench map") {
  KinematicChain chain = test::panda_chain();
  VecX q = test::random_vector(7, -1.5, 1.5);
  CartesianPose pose = forward_kinematics(chain, q);
  Jacobian jac = geometric_jacobian(chain, q);

  ControllerConfig cfg = basic_config(7);
  ControllerTargets initial = targets_at(CartesianPose(Vec3::Zero(), Quat::Identity()), VecX::Zero(7));
  initial.wrench << 4.0, -2.0, 1.0, 0.3, 0.0, -0.4;
  CartesianImpedanceController ctl(cfg, initial);

  ControlInputs inputs;
  inputs.q = q;
  inputs.qdot = test::random_vector(7, -1, 1);
  inputs.jacobian = jac;
  inputs.pose = pose;
  ControlStepResult result = ctl.control_step(inputs);
  CHECK((result.torque - jac.transpose() * initial.wrench).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("superposition: the command is the sum of its parts") {
  KinematicChain chain = test::panda_chain();
  ControllerConfig cfg = basic_config(7);
  cfg.gains.stiffness.diagonal() << 150, 150, 150, 15, 15, 15;
  cfg.gains.damping = damping_from_ratio(cfg.gains.stiffness, 1.0);
  cfg.gains.ns_stiffness = 8.0 * MatX::Identity(7, 7);
  cfg.gains.ns_damping = 1.5 * MatX::Identity(7, 7);

  VecX q_des = test::random_vector(7, -1.5, 1.5);
  ControllerTargets initial = targets_at(forward_kinematics(chain, q_des), q_des);
  initial.wrench << 1, 2, -1, 0.1, -0.2, 0.3;
  CartesianImpedanceController ctl(cfg, initial);

  for (int trial = 0; trial < 20; ++trial) {
    VecX q = test::random_vector(7, -1.5, 1.5);
    ControlInputs inputs;
    inputs.q = q;
    inputs.qdot = test::random_vector(7, -1, 1);
    inputs.jacobian = geometric_jacobian(chain, q);
    inputs.pose = forward_kinematics(chain, q);
    ControlStepResult r = ctl.control_step(inputs);
    VecX sum = r.torque_task + r.torque_nullspace + r.torque_wrench;
    CHECK((r.torque_unlimited - sum).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((r.torque - r.torque_unlimited).cwiseAbs().maxCoeff() <= 1e-12);  // generous limits
  }
}

TEST_CASE("frame flag: base and end-effector formulations agree for isotropic gains") {
  KinematicChain chain = test::panda_chain();
  VecX q_des = test::random_vector(7, -1.5, 1.5);
  CartesianPose pose_des = forward_kinematics(chain, q_des);

  Vec6 wrench_base;
  wrench_base << 3, -1, 2, 0.2, 0.4, -0.1;

  auto make = [&](TaskFrame frame, const Vec6& wrench) {
    ControllerConfig cfg = basic_config(7);
    cfg.frame = frame;
    cfg.gains.stiffness.diagonal() << 120, 120, 120, 12, 12, 12;  // blockwise isotropic
    cfg.gains.damping = damping_from_ratio(cfg.gains.stiffness, 1.0);
    cfg.gains.ns_stiffness = 5.0 * MatX::Identity(7, 7);
    cfg.gains.ns_damping = 1.0 * MatX::Identity(7, 7);
    ControllerTargets initial = targets_at(pose_des, q_des);
    initial.wrench = wrench;
    return CartesianImpedanceController(cfg, initial);
  };

  for (int trial = 0; trial < 10; ++trial) {
    VecX q = test::random_vector(7, -1.2, 1.2);
    CartesianPose pose = forward_kinematics(chain, q);
    Mat3 rt = pose.orientation.toRotationMatrix().transpose();
    Vec6 wrench_ee;
    wrench_ee.head<3>() = rt * wrench_base.head<3>();
    wrench_ee.tail<3>() = rt * wrench_base.tail<3>();

    auto base_ctl = make(TaskFrame::Base, wrench_base);
    auto ee_ctl = make(TaskFrame::EndEffector, wrench_ee);

    ControlInputs inputs;
    inputs.q = q;
    inputs.qdot = test::random_vector(7, -1, 1);
    inputs.jacobian = geometric_jacobian(chain, q);
    inputs.pose = pose;
    VecX tau_base = base_ctl.control_step(inputs).torque;
    VecX tau_ee = ee_ctl.control_step(inputs).torque;
    CHECK((tau_base - tau_ee).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("control_step rejects non-finite input") {
  ControllerConfig cfg = basic_config(2);
  CartesianImpedanceController ctl(
      cfg, targets_at(CartesianPose(Vec3::Zero(), Quat::Identity()), VecX::Zero(2)));
  ControlInputs inputs;
  inputs.q = VecX::Zero(2);
  inputs.q[0] = std::numeric_limits<double>::quiet_NaN();
  inputs.qdot = VecX::Zero(2);
  inputs.jacobian = Jacobian::Zero(6, 2);
  inputs.pose = CartesianPose(Vec3::Zero(), Quat::Identity());
  CHECK_THROWS_AS(ctl.control_step(inputs), NonFiniteInput);
}

TEST_CASE("per-joint effort clamp bounds the final command") {
  ControllerConfig cfg = basic_config(2);
  cfg.clamp_to_effort_limits = true;
  cfg.effort_limits = VecX::Constant(2, 1.5);
  ControllerTargets initial = targets_at(CartesianPose(Vec3::Zero(), Quat::Identity()), VecX::Zero(2));
  initial.wrench << 50, 0, 0, 0, 0, 0;
  CartesianImpedanceController ctl(cfg, initial);

  ControlInputs inputs;
  inputs.q = VecX::Zero(2);
  inputs.qdot = VecX::Zero(2);
  inputs.jacobian = Jacobian::Zero(6, 2);
  inputs.jacobian(0, 0) = 1.0;
  inputs.jacobian(0, 1) = -0.5;
  inputs.pose = CartesianPose(Vec3::Zero(), Quat::Identity());
  VecX tau = ctl.control_step(inputs).torque;
  CHECK(tau.cwiseAbs().maxCoeff() <= 1.5 + 1e-15);
}

TEST_CASE("zero-stiffness transparency") {
  ControllerConfig cfg = basic_config(3);
  CartesianImpedanceController ctl(
      cfg, targets_at(CartesianPose(Vec3::Zero(), Quat::Identity()), VecX::Zero(3)));
  for (int trial = 0; trial < 10; ++trial) {
    ControlInputs inputs;
    inputs.q = test::random_vector(3, -2, 2);
    inputs.qdot = test::random_vector(3, -2, 2);
    inputs.jacobian = random_jacobian(3);
    inputs.pose = CartesianPose(Vec3::Random(), Quat::UnitRandom());
    CHECK(ctl.control_step(inputs).torque.norm() == 0.0);
  }
}

TEST_CASE("trajectory_target") {
  KinematicChain chain = test::planar2_chain();
  JointTrajectory traj;
  traj.waypoints.push_back({1.0, (VecX(2) << 0.0, 0.0).finished()});
  traj.waypoints.push_back({3.0, (VecX(2) << 1.0, -0.5).finished()});

  SUBCASE("clamps before the first waypoint") {
    TrajectoryTarget target = trajectory_target(traj, 0.0, chain);
    CHECK(target.nullspace_q.norm() == 0.0);
  }
  SUBCASE("clamps after the last waypoint") {
    TrajectoryTarget target = trajectory_target(traj, 99.0, chain);
    CHECK(target.nullspace_q[0] == 1.0);
  }
  SUBCASE("midpoint interpolates and FK is consistent") {
    TrajectoryTarget target = trajectory_target(traj, 2.0, chain);
    CHECK(target.nullspace_q[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(target.nullspace_q[1] == doctest::Approx(-0.25).epsilon(1e-15));
    CartesianPose expected = forward_kinematics(chain, target.nullspace_q);
    CHECK((target.pose.translation - expected.translation).norm() == 0.0);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(trajectory_target(JointTrajectory{}, 0.0, chain), EmptyTrajectory);
    JointTrajectory bad;
    bad.waypoints.push_back({2.0, VecX::Zero(2)});
    bad.waypoints.push_back({1.0, VecX::Zero(2)});
    CHECK_THROWS_AS(trajectory_target(bad, 0.0, chain), NonMonotoneTimestamps);
    JointTrajectory wrong_dim;
    wrong_dim.waypoints.push_back({0.0, VecX::Zero(3)});
    CHECK_THROWS_AS(trajectory_target(wrong_dim, 0.0, chain), DimensionError);
  }
}

TEST_CASE("damping_from_ratio derives 2*zeta*sqrt(K) on the diagonal") {
  MatX k = MatX::Zero(2, 2);
  k(0, 0) = 100.0;
  k(1, 1) = 25.0;
  MatX d = damping_from_ratio(k, 0.7);
  CHECK(d(0, 0) == doctest::Approx(14.0).epsilon(1e-12));
  CHECK(d(1, 1) == doctest::Approx(7.0).epsilon(1e-12));
  CHECK(d(0, 1) == 0.0);
  CHECK_THROWS_AS(damping_from_ratio(k, -0.1), DomainError);
}
