#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

#include "cic/control_law.hpp"
#include "cic/controller.hpp"
#include "cic/dynamics.hpp"
#include "cic/kinematics.hpp"
#include "cic/urdf.hpp"

namespace {

using namespace cic;

KinematicChain panda() {
  std::ifstream in(std::string(CIC_MODELS_DIR) + "/panda7.urdf");
  std::ostringstream ss;
  ss << in.rdbuf();
  RobotModel model = parse_robot_description(ss.str());
  return extract_chain(model, "link0", "flange");
}

const VecX kHome =
    (VecX(7) << 0.0, -0.785398, 0.0, -2.356194, 0.0, 1.570796, 0.785398).finished();

void BM_ForwardKinematics(benchmark::State& state) {
  KinematicChain chain = panda();
  for (auto _ : state) {
    benchmark::DoNotOptimize(forward_kinematics(chain, kHome));
  }
}
BENCHMARK(BM_ForwardKinematics);

void BM_GeometricJacobian(benchmark::State& state) {
  KinematicChain chain = panda();
  for (auto _ : state) {
    benchmark::DoNotOptimize(geometric_jacobian(chain, kHome));
  }
}
BENCHMARK(BM_GeometricJacobian);

void BM_InverseDynamics(benchmark::State& state) {
  KinematicChain chain = panda();
  VecX qd = VecX::Constant(7, 0.3), qdd = VecX::Constant(7, 0.5);
  Vec3 gravity(0, 0, -9.81);
  for (auto _ : state) {
    benchmark::DoNotOptimize(inverse_dynamics(chain, kHome, qd, qdd, gravity));
  }
}
BENCHMARK(BM_InverseDynamics);

void BM_MassMatrix(benchmark::State& state) {
  KinematicChain chain = panda();
  for (auto _ : state) {
    benchmark::DoNotOptimize(mass_matrix(chain, kHome));
  }
}
BENCHMARK(BM_MassMatrix);

void BM_NullspaceProjector(benchmark::State& state) {
  KinematicChain chain = panda();
  Jacobian jac = geometric_jacobian(chain, kHome);
  for (auto _ : state) {
    benchmark::DoNotOptimize(nullspace_projector(jac));
  }
}
BENCHMARK(BM_NullspaceProjector);

void BM_ControlStep(benchmark::State& state) {
  KinematicChain chain = panda();
  ControllerConfig cfg;
  cfg.dof = 7;
  cfg.dt = 1e-3;
  cfg.gains = ImpedanceGains::zero(7);
  cfg.gains.stiffness.diagonal() << 200, 200, 200, 20, 20, 20;
  cfg.gains.damping = damping_from_ratio(cfg.gains.stiffness, 1.0);
  cfg.limits = SafetyLimits::unbounded(7);
  ControllerTargets targets;
  targets.pose = forward_kinematics(chain, kHome);
  targets.nullspace_q = kHome;
  CartesianImpedanceController controller(cfg, targets);

  ControlInputs inputs;
  inputs.q = kHome;
  inputs.qdot = VecX::Constant(7, 0.1);
  inputs.jacobian = geometric_jacobian(chain, kHome);
  inputs.pose = forward_kinematics(chain, kHome);
  for (auto _ : state) {
    benchmark::DoNotOptimize(controller.control_step(inputs));
  }
}
BENCHMARK(BM_ControlStep);

void BM_SimStep(benchmark::State& state) {
  KinematicChain chain = panda();
  JointState sim_state{kHome, VecX::Zero(7)};
  VecX tau = VecX::Zero(7);
  Vec3 gravity(0, 0, -9.81);
  VecX gravity_comp = gravity_torques(chain, kHome, gravity);
  for (auto _ : state) {
    sim_state = forward_step(chain, sim_state, gravity_comp, tau, gravity, 1e-3);
    benchmark::DoNotOptimize(sim_state);
  }
}
BENCHMARK(BM_SimStep);

}  // namespace

BENCHMARK_MAIN();
