#pragma once

// Shared helpers for the test suites: corpus paths, file loading, RNG.

#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>

#include "cic/model.hpp"
#include "cic/urdf.hpp"

namespace test {

inline std::string models_dir() { return CIC_MODELS_DIR; }

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("test: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline cic::RobotModel load_model(const std::string& name) {
  return cic::parse_robot_description(read_file(models_dir() + "/" + name));
}

inline cic::KinematicChain load_chain(const std::string& name, const std::string& base,
                                      const std::string& tip) {
  return cic::extract_chain(load_model(name), base, tip);
}

inline cic::KinematicChain panda_chain() { return load_chain("panda7.urdf", "link0", "flange"); }
inline cic::KinematicChain planar2_chain() { return load_chain("planar2.urdf", "base", "tool"); }
inline cic::KinematicChain pendulum_chain() { return load_chain("pendulum.urdf", "base", "tip"); }

/// Deterministic RNG for property-style tests.
inline std::mt19937& rng() {
  static std::mt19937 gen(20240917u);
  return gen;
}

inline double uniform(double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  return dist(rng());
}

inline cic::VecX random_vector(Eigen::Index n, double lo, double hi) {
  cic::VecX v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = uniform(lo, hi);
  return v;
}

}  // namespace test
