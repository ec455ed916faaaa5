#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "cic/errors.hpp"
#include "cic/kinematics.hpp"
#include "cic/urdf.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace cic;

namespace {

KinematicChain one_dof_z_chain() {
  // Revolute about base z, child offset (1,0,0): the spec's planar example.
  const char* text = R"(<robot name="spin">
    <link name="base"/><link name="arm"/><link name="tip"/>
    <joint name="j" type="revolute"><parent link="base"/><child link="arm"/>
      <axis xyz="0 0 1"/></joint>
    <joint name="t" type="fixed"><origin xyz="1 0 0"/>
      <parent link="arm"/><child link="tip"/></joint>
  </robot>)";
  return extract_chain(parse_robot_description(text), "base", "tip");
}

Quat axis_angle_quat(const Vec3& axis, double angle) {
  return Quat(Eigen::AngleAxisd(angle, axis.normalized()));
}

}  // namespace

TEST_CASE("FK identity case") {
  const char* text = R"(<robot><link name="a"/><link name="b"/>
    <joint name="j" type="revolute"><parent link="a"/><child link="b"/>
      <axis xyz="0 0 1"/></joint></robot>)";
  KinematicChain chain = extract_chain(parse_robot_description(text), "a", "b");
  CartesianPose pose = forward_kinematics(chain, VecX::Zero(1));
  CHECK(pose.translation.norm() == doctest::Approx(0.0));
  CHECK(std::abs(pose.orientation.w()) == doctest::Approx(1.0));
}

TEST_CASE("FK of 1-dof arm matches the quaternion rotation oracle") {
  KinematicChain chain = one_dof_z_chain();
  VecX q(1);
  q << M_PI / 2.0;
  CartesianPose pose = forward_kinematics(chain, q);
  CHECK(pose.translation.x() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(pose.translation.y() == doctest::Approx(1.0));
  CHECK(pose.translation.z() == doctest::Approx(0.0));
  // Orientation: 90 degrees about z.
  Quat expected = axis_angle_quat(Vec3::UnitZ(), M_PI / 2.0);
  CHECK(std::abs(pose.orientation.dot(expected)) == doctest::Approx(1.0).epsilon(1e-12));

  // Oracle: rotating the offset vector with the quaternion directly.
  for (int trial = 0; trial < 20; ++trial) {
    VecX qq = test::random_vector(1, -M_PI, M_PI);
    Vec3 expected_tip = axis_angle_quat(Vec3::UnitZ(), qq[0]) * Vec3(1, 0, 0);
    CHECK((forward_kinematics(chain, qq).translation - expected_tip).norm() <= 1e-12);
  }
}

TEST_CASE("planar 2-link FK matches trigonometry") {
  KinematicChain chain = test::planar2_chain();
  VecX q(2);
  q << M_PI / 2.0, -M_PI / 2.0;
  CartesianPose pose = forward_kinematics(chain, q);
  CHECK(pose.translation.x() == doctest::Approx(1.0));
  CHECK(pose.translation.y() == doctest::Approx(1.0));
  CHECK(pose.translation.z() == doctest::Approx(0.0));

  for (int trial = 0; trial < 50; ++trial) {
    VecX qq = test::random_vector(2, -M_PI, M_PI);
    double x = std::cos(qq[0]) + std::cos(qq[0] + qq[1]);
    double y = std::sin(qq[0]) + std::sin(qq[0] + qq[1]);
    Vec3 t = forward_kinematics(chain, qq).translation;
    CHECK(t.x() == doctest::Approx(x).epsilon(1e-12));
    CHECK(t.y() == doctest::Approx(y).epsilon(1e-12));
  }
}

TEST_CASE("FK dimension check") {
  CHECK_THROWS_AS(forward_kinematics(test::planar2_chain(), VecX::Zero(3)), DimensionError);
  CHECK_THROWS_AS(geometric_jacobian(test::planar2_chain(), VecX::Zero(1)), DimensionError);
}

TEST_CASE("jacobian of the 1-dof arm at q=0") {
  KinematicChain chain = one_dof_z_chain();
  Jacobian jac = geometric_jacobian(chain, VecX::Zero(1));
  // z x x = y for the linear part; the angular part is the axis itself.
  CHECK(jac.col(0).head<3>().isApprox(Vec3(0, 1, 0), 1e-14));
  CHECK(jac.col(0).tail<3>().isApprox(Vec3(0, 0, 1), 1e-14));
}

TEST_CASE("jacobian matches finite differences of FK") {
  struct Case {
    KinematicChain chain;
    double range;
  };
  Case cases[] = {{test::planar2_chain(), M_PI}, {test::panda_chain(), 2.0}};
  const double step = 1e-5;
  for (auto& c : cases) {
    for (int trial = 0; trial < 100; ++trial) {
      VecX q = test::random_vector(c.chain.dof(), -c.range, c.range);
      Jacobian jac = geometric_jacobian(c.chain, q);
      MatX fd_lin = oracle::fd_linear_jacobian(c.chain, q, step);
      CHECK((jac.topRows<3>() - fd_lin).cwiseAbs().maxCoeff() <= 1e-5);
    }
  }
}

TEST_CASE("angular jacobian matches the orientation-error finite difference") {
  KinematicChain chain = test::panda_chain();
  for (int trial = 0; trial < 25; ++trial) {
    VecX q = test::random_vector(7, -1.5, 1.5);
    Jacobian jac = geometric_jacobian(chain, q);
    MatX fd_ang = oracle::fd_angular_jacobian(chain, q, 1e-6);
    CHECK((jac.bottomRows<3>() - fd_ang).cwiseAbs().maxCoeff() <= 1e-5);
  }
}

TEST_CASE("planar chain angular rows are the shared joint axis") {
  KinematicChain chain = test::planar2_chain();
  VecX q = test::random_vector(2, -M_PI, M_PI);
  Jacobian jac = geometric_jacobian(chain, q);
  CHECK(jac.col(0).tail<3>().isApprox(Vec3(0, 0, 1), 1e-14));
  CHECK(jac.col(1).tail<3>().isApprox(Vec3(0, 0, 1), 1e-14));
}

TEST_CASE("pose_error basics") {
  CartesianPose a(Vec3(0.2, -0.1, 0.4), axis_angle_quat(Vec3(1, 1, 0), 0.7));
  CHECK(pose_error(a, a).norm() == 0.0);

  CartesianPose desired(Vec3(0.1, -0.1, 0.4), a.orientation);
  PoseError err = pose_error(a, desired);
  CHECK(err.head<3>().isApprox(Vec3(0.1, 0, 0), 1e-15));
  CHECK(err.tail<3>().norm() == doctest::Approx(0.0));
}

TEST_CASE("pose_error of +30 degrees about z") {
  CartesianPose desired(Vec3::Zero(), Quat::Identity());
  CartesianPose current(Vec3::Zero(), axis_angle_quat(Vec3::UnitZ(), M_PI / 6.0));
  PoseError err = pose_error(current, desired);
  CHECK(err.head<3>().norm() == 0.0);
  CHECK(std::abs(err[3]) <= 1e-12);
  CHECK(std::abs(err[4]) <= 1e-12);
  CHECK(err[5] == doctest::Approx(M_PI / 6.0).epsilon(1e-12));

  // Quaternion product/log oracle over random axes and angles.
  for (int trial = 0; trial < 50; ++trial) {
    Vec3 axis = Vec3(test::uniform(-1, 1), test::uniform(-1, 1), test::uniform(-1, 1));
    if (axis.norm() < 1e-3) continue;
    axis.normalize();
    double angle = test::uniform(-3.0, 3.0);
    CartesianPose cur(Vec3::Zero(), axis_angle_quat(axis, angle));
    PoseError e = pose_error(cur, desired);
    double want = std::abs(angle) <= M_PI ? angle : angle - std::copysign(2.0 * M_PI, angle);
    CHECK((e.tail<3>() - want * axis).norm() <= 1e-9);
  }
}

TEST_CASE("pose_error picks the shorter rotation") {
  CartesianPose desired(Vec3::Zero(), Quat::Identity());
  CartesianPose current(Vec3::Zero(), axis_angle_quat(Vec3::UnitZ(), 3.0 * M_PI / 2.0));
  PoseError err = pose_error(current, desired);
  CHECK(err.tail<3>().norm() == doctest::Approx(M_PI / 2.0).epsilon(1e-12));
  CHECK(err[5] == doctest::Approx(-M_PI / 2.0).epsilon(1e-12));
}

TEST_CASE("pose_error antisymmetry") {
  for (int trial = 0; trial < 50; ++trial) {
    CartesianPose a(Vec3::Random(), Quat::UnitRandom());
    CartesianPose b(Vec3::Random(), Quat::UnitRandom());
    PoseError ab = pose_error(a, b);
    PoseError ba = pose_error(b, a);
    if (ab.tail<3>().norm() > M_PI - 1e-6) continue;  // boundary excluded
    CHECK((ab.head<3>() + ba.head<3>()).norm() <= 1e-15);
    CHECK((ab.tail<3>() + ba.tail<3>()).norm() <= 1e-9);
  }
}

TEST_CASE("pi-rotation error is deterministic with norm pi") {
  CartesianPose desired(Vec3::Zero(), Quat::Identity());
  for (const Vec3& axis : {Vec3::UnitX().eval(), Vec3::UnitY().eval(),
                           Vec3(1, 1, 1).normalized().eval(), Vec3(-1, 2, -2).normalized().eval()}) {
    CartesianPose current(Vec3::Zero(), axis_angle_quat(axis, M_PI));
    PoseError e1 = pose_error(current, desired);
    PoseError e2 = pose_error(current, desired);
    CHECK(e1.tail<3>().norm() == doctest::Approx(M_PI).epsilon(1e-12));
    CHECK((e1 - e2).norm() == 0.0);  // deterministic
    // Canonical sign: the largest-magnitude component is positive.
    Vec3 v = e1.tail<3>();
    int idx = 0;
    for (int i = 1; i < 3; ++i) {
      if (std::abs(v[i]) > std::abs(v[idx])) idx = i;
    }
    CHECK(v[idx] > 0.0);
  }
}

TEST_CASE("rotational error norm never exceeds pi") {
  for (int trial = 0; trial < 200; ++trial) {
    CartesianPose a(Vec3::Zero(), Quat::UnitRandom());
    CartesianPose b(Vec3::Zero(), Quat::UnitRandom());
    CHECK(pose_error(a, b).tail<3>().norm() <= M_PI + 1e-12);
  }
}

TEST_CASE("quaternions stay normalized through FK") {
  KinematicChain chain = test::panda_chain();
  for (int trial = 0; trial < 100; ++trial) {
    VecX q = test::random_vector(7, -2.5, 2.5);
    CHECK(std::abs(forward_kinematics(chain, q).orientation.norm() - 1.0) <= 1e-9);
  }
}

TEST_CASE("CartesianPose normalizes and rejects degenerate quaternions") {
  CartesianPose pose(Vec3::Zero(), Quat(2.0, 0.0, 0.0, 0.0));
  CHECK(pose.orientation.w() == doctest::Approx(1.0));
  CHECK_THROWS_AS(CartesianPose(Vec3::Zero(), Quat(0.0, 0.0, 0.0, 0.0)), DomainError);
}
