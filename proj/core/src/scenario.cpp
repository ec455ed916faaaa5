#include "cic/scenario.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

#include "cic/errors.hpp"

namespace cic {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& msg) { throw ConfigError("scenario: " + msg); }

const json& require_key(const json& obj, const char* key, const char* context) {
  auto it = obj.find(key);
  if (it == obj.end()) bad(std::string(context) + " is missing required key '" + key + "'");
  return *it;
}

double as_number(const json& j, const std::string& context) {
  if (!j.is_number()) bad(context + " must be a number");
  return j.get<double>();
}

VecX as_vector(const json& j, const std::string& context) {
  if (j.is_number()) {
    VecX v(1);
    v[0] = j.get<double>();
    return v;
  }
  if (!j.is_array()) bad(context + " must be a number or an array of numbers");
  VecX v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = as_number(j[i], context + " entry");
  return v;
}

Vec3 as_vec3(const json& j, const std::string& context) {
  VecX v = as_vector(j, context);
  if (v.size() == 1) return Vec3::Constant(v[0]);
  if (v.size() != 3) bad(context + " must have 3 entries");
  return v.head<3>();
}

Vec6 as_vec6(const json& j, const std::string& context) {
  VecX v = as_vector(j, context);
  if (v.size() == 1) return Vec6::Constant(v[0]);
  if (v.size() != 6) bad(context + " must have 6 entries");
  return v.head<6>();
}

DiagonalSpec6 as_diag6(const json& j, const std::string& context) {
  DiagonalSpec6 spec;
  if (j.is_number()) {
    spec.trans = Vec3::Constant(j.get<double>());
    spec.rot = Vec3::Constant(j.get<double>());
    return spec;
  }
  if (!j.is_object()) bad(context + " must be a number or {trans, rot}");
  if (j.contains("trans")) spec.trans = as_vec3(j["trans"], context + ".trans");
  if (j.contains("rot")) spec.rot = as_vec3(j["rot"], context + ".rot");
  return spec;
}

CartesianPose as_pose(const json& j, const std::string& context) {
  if (!j.is_object()) bad(context + " must be {translation, orientation}");
  Vec3 t = Vec3::Zero();
  Quat r = Quat::Identity();
  if (j.contains("translation")) t = as_vec3(j["translation"], context + ".translation");
  if (j.contains("orientation")) {
    VecX q = as_vector(j["orientation"], context + ".orientation");
    if (q.size() != 4) bad(context + ".orientation must be [w, x, y, z]");
    r = Quat(q[0], q[1], q[2], q[3]);
  }
  try {
    return CartesianPose(t, r);
  } catch (const DomainError& e) {
    bad(context + ": " + e.what());
  }
}

FilterSettings as_filter(const json& j, const std::string& context) {
  FilterSettings f;
  if (!j.is_object()) bad(context + " must be {p, T}");
  if (j.contains("p")) f.p = as_number(j["p"], context + ".p");
  if (j.contains("T")) f.horizon = as_number(j["T"], context + ".T");
  return f;
}

TaskFrame as_frame(const json& j, const std::string& context) {
  std::string s = j.is_string() ? j.get<std::string>() : "";
  if (s == "base") return TaskFrame::Base;
  if (s == "end_effector") return TaskFrame::EndEffector;
  bad(context + " must be \"base\" or \"end_effector\"");
}

void parse_gain_block(const json& gains, ControllerSpec& spec) {
  if (gains.contains("k_ca")) spec.k_ca = as_diag6(gains["k_ca"], "gains.k_ca");
  if (gains.contains("d_ca")) {
    const json& d = gains["d_ca"];
    if (d.is_object() && d.contains("ratio")) {
      spec.damping_ratio = as_number(d["ratio"], "gains.d_ca.ratio");
    } else {
      spec.d_ca = as_diag6(d, "gains.d_ca");
    }
  }
  if (gains.contains("k_ns")) spec.k_ns = as_vector(gains["k_ns"], "gains.k_ns");
  if (gains.contains("d_ns")) {
    const json& d = gains["d_ns"];
    if (d.is_object() && d.contains("ratio")) {
      spec.ns_damping_ratio = as_number(d["ratio"], "gains.d_ns.ratio");
    } else {
      spec.d_ns = as_vector(d, "gains.d_ns");
    }
  }
}

void parse_bounds_block(const json& bounds, ControllerSpec& spec) {
  auto diag_bounds = [&](const char* key, std::optional<DiagonalSpec6>& lo,
                         std::optional<DiagonalSpec6>& hi) {
    if (!bounds.contains(key)) return;
    const json& b = bounds[key];
    std::string ctx = std::string("bounds.") + key;
    if (!b.is_object()) bad(ctx + " must be {min, max}");
    if (b.contains("min")) lo = as_diag6(b["min"], ctx + ".min");
    if (b.contains("max")) hi = as_diag6(b["max"], ctx + ".max");
  };
  diag_bounds("k_ca", spec.k_ca_min, spec.k_ca_max);
  diag_bounds("d_ca", spec.d_ca_min, spec.d_ca_max);

  auto joint_bounds = [&](const char* key, VecX& lo, VecX& hi) {
    if (!bounds.contains(key)) return;
    const json& b = bounds[key];
    std::string ctx = std::string("bounds.") + key;
    if (!b.is_object()) bad(ctx + " must be {min, max}");
    if (b.contains("min")) lo = as_vector(b["min"], ctx + ".min");
    if (b.contains("max")) hi = as_vector(b["max"], ctx + ".max");
  };
  joint_bounds("k_ns", spec.k_ns_min, spec.k_ns_max);
  joint_bounds("d_ns", spec.d_ns_min, spec.d_ns_max);

  if (bounds.contains("wrench")) {
    const json& w = bounds["wrench"];
    if (w.is_object() && w.contains("abs")) {
      double a = as_number(w["abs"], "bounds.wrench.abs");
      spec.wrench_min = Vec6::Constant(-a);
      spec.wrench_max = Vec6::Constant(a);
    } else if (w.is_object()) {
      if (w.contains("min")) spec.wrench_min = as_vec6(w["min"], "bounds.wrench.min");
      if (w.contains("max")) spec.wrench_max = as_vec6(w["max"], "bounds.wrench.max");
    } else {
      bad("bounds.wrench must be {min, max} or {abs}");
    }
  }
}

ControllerSpec parse_controller_block(const json& ctl) {
  ControllerSpec spec;
  if (ctl.contains("gains")) parse_gain_block(ctl["gains"], spec);
  if (ctl.contains("bounds")) parse_bounds_block(ctl["bounds"], spec);
  if (ctl.contains("filter")) {
    spec.filter = as_filter(ctl["filter"], "filter");
    const json& f = ctl["filter"];
    if (f.contains("pose")) spec.pose_filter = as_filter(f["pose"], "filter.pose");
    if (f.contains("gains")) spec.gain_filter = as_filter(f["gains"], "filter.gains");
    if (f.contains("wrench")) spec.wrench_filter = as_filter(f["wrench"], "filter.wrench");
    if (f.contains("nullspace_q"))
      spec.nullspace_filter = as_filter(f["nullspace_q"], "filter.nullspace_q");
  }
  if (ctl.contains("rate_limit")) {
    spec.torque_rate_max = as_number(ctl["rate_limit"], "controller.rate_limit");
    if (!(spec.torque_rate_max > 0.0)) bad("controller.rate_limit must be positive");
  }
  if (ctl.contains("frame")) spec.frame = as_frame(ctl["frame"], "controller.frame");
  if (ctl.contains("gravity_feedforward")) {
    spec.gravity_feedforward = ctl["gravity_feedforward"].get<bool>();
  }
  if (ctl.contains("clamp_to_effort_limits")) {
    spec.clamp_to_effort_limits = ctl["clamp_to_effort_limits"].get<bool>();
  }
  if (ctl.contains("targets")) {
    const json& t = ctl["targets"];
    if (t.contains("pose")) spec.pose_target = as_pose(t["pose"], "targets.pose");
    if (t.contains("nullspace_q"))
      spec.nullspace_target = as_vector(t["nullspace_q"], "targets.nullspace_q");
    if (t.contains("wrench")) spec.wrench = as_vec6(t["wrench"], "targets.wrench");
  }
  return spec;
}

JointTrajectory parse_trajectory(const json& j) {
  JointTrajectory traj;
  const json& wps = require_key(j, "waypoints", "trajectory");
  if (!wps.is_array() || wps.empty()) bad("trajectory.waypoints must be a non-empty array");
  for (const auto& wp : wps) {
    Waypoint w;
    w.time = as_number(require_key(wp, "time", "waypoint"), "waypoint.time");
    w.q = as_vector(require_key(wp, "q", "waypoint"), "waypoint.q");
    traj.waypoints.push_back(std::move(w));
  }
  return traj;
}

GainEventSpec parse_gain_event(const json& g) {
  GainEventSpec spec;
  if (g.contains("k_ca")) spec.k_ca = as_diag6(g["k_ca"], "set_gains.k_ca");
  if (g.contains("d_ca")) {
    const json& d = g["d_ca"];
    if (d.is_object() && d.contains("ratio")) {
      spec.damping_ratio = as_number(d["ratio"], "set_gains.d_ca.ratio");
    } else {
      spec.d_ca = as_diag6(d, "set_gains.d_ca");
    }
  }
  if (g.contains("k_ns")) spec.k_ns = as_vector(g["k_ns"], "set_gains.k_ns");
  if (g.contains("d_ns")) {
    const json& d = g["d_ns"];
    if (d.is_object() && d.contains("ratio")) {
      spec.ns_damping_ratio = as_number(d["ratio"], "set_gains.d_ns.ratio");
    } else {
      spec.d_ns = as_vector(d, "set_gains.d_ns");
    }
  }
  return spec;
}

}  // namespace

Mat6 DiagonalSpec6::to_matrix() const {
  Mat6 m = Mat6::Zero();
  m.diagonal().head<3>() = trans;
  m.diagonal().tail<3>() = rot;
  return m;
}

VecX broadcast_per_joint(const VecX& values, Eigen::Index dof, const char* what) {
  if (values.size() == 0) return VecX::Zero(dof);
  if (values.size() == 1) return VecX::Constant(dof, values[0]);
  if (values.size() != dof) {
    throw ConfigError(std::string("scenario: ") + what + " must be a scalar or have " +
                      std::to_string(dof) + " entries, got " + std::to_string(values.size()));
  }
  return values;
}

ControllerConfig ControllerSpec::materialize(Eigen::Index dof, double dt,
                                             const VecX& effort_limits) const {
  ControllerConfig cfg;
  cfg.dof = dof;
  cfg.dt = dt;
  cfg.gains.stiffness = k_ca.to_matrix();
  if (d_ca) {
    cfg.gains.damping = d_ca->to_matrix();
  } else {
    cfg.gains.damping = damping_from_ratio(cfg.gains.stiffness, damping_ratio);
  }
  cfg.gains.ns_stiffness = broadcast_per_joint(k_ns, dof, "gains.k_ns").asDiagonal();
  if (ns_damping_ratio) {
    cfg.gains.ns_damping = damping_from_ratio(cfg.gains.ns_stiffness, *ns_damping_ratio);
  } else {
    cfg.gains.ns_damping = broadcast_per_joint(d_ns, dof, "gains.d_ns").asDiagonal();
  }

  // Scenario bounds address the diagonal parameterization; off-diagonal
  // entries stay unconstrained.
  cfg.limits = SafetyLimits::unbounded(dof);
  auto set_diag6 = [](Mat6& m, const DiagonalSpec6& d) {
    m.diagonal().head<3>() = d.trans;
    m.diagonal().tail<3>() = d.rot;
  };
  if (k_ca_min) set_diag6(cfg.limits.stiffness_min, *k_ca_min);
  if (k_ca_max) set_diag6(cfg.limits.stiffness_max, *k_ca_max);
  if (d_ca_min) set_diag6(cfg.limits.damping_min, *d_ca_min);
  if (d_ca_max) set_diag6(cfg.limits.damping_max, *d_ca_max);
  if (k_ns_min.size() > 0)
    cfg.limits.ns_stiffness_min.diagonal() = broadcast_per_joint(k_ns_min, dof, "bounds.k_ns.min");
  if (k_ns_max.size() > 0)
    cfg.limits.ns_stiffness_max.diagonal() = broadcast_per_joint(k_ns_max, dof, "bounds.k_ns.max");
  if (d_ns_min.size() > 0)
    cfg.limits.ns_damping_min.diagonal() = broadcast_per_joint(d_ns_min, dof, "bounds.d_ns.min");
  if (d_ns_max.size() > 0)
    cfg.limits.ns_damping_max.diagonal() = broadcast_per_joint(d_ns_max, dof, "bounds.d_ns.max");
  if (wrench_min) cfg.limits.wrench_min = *wrench_min;
  if (wrench_max) cfg.limits.wrench_max = *wrench_max;
  if (torque_rate_max > 0.0) cfg.limits.torque_rate_max = torque_rate_max;

  cfg.filter = filter;
  cfg.pose_filter = pose_filter;
  cfg.gain_filter = gain_filter;
  cfg.wrench_filter = wrench_filter;
  cfg.nullspace_filter = nullspace_filter;
  cfg.frame = frame;
  cfg.gravity_feedforward = gravity_feedforward;
  cfg.clamp_to_effort_limits = clamp_to_effort_limits;
  cfg.effort_limits = effort_limits;
  return cfg;
}

GainUpdate GainEventSpec::materialize(Eigen::Index dof) const {
  GainUpdate update;
  if (k_ca) update.stiffness = k_ca->to_matrix();
  if (d_ca) update.damping = d_ca->to_matrix();
  update.damping_ratio = damping_ratio;
  if (k_ns) update.ns_stiffness = MatX(broadcast_per_joint(*k_ns, dof, "set_gains.k_ns").asDiagonal());
  if (d_ns) update.ns_damping = MatX(broadcast_per_joint(*d_ns, dof, "set_gains.d_ns").asDiagonal());
  update.ns_damping_ratio = ns_damping_ratio;
  return update;
}

Scenario parse_scenario(const std::string& json_text, const std::string& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) bad("top level must be an object");

  Scenario sc;
  if (doc.contains("robot_text")) {
    sc.robot_text = doc["robot_text"].get<std::string>();
  } else {
    const json& robot = require_key(doc, "robot", "scenario");
    if (!robot.is_string()) bad("'robot' must be a path string");
    std::filesystem::path p = robot.get<std::string>();
    if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
    sc.robot_path = p.string();
  }

  const json& chain = require_key(doc, "chain", "scenario");
  sc.base_link = require_key(chain, "base", "chain").get<std::string>();
  sc.tip_link = require_key(chain, "tip", "chain").get<std::string>();

  const json& init = require_key(doc, "initial_state", "scenario");
  sc.q0 = as_vector(require_key(init, "q", "initial_state"), "initial_state.q");
  if (init.contains("qdot")) sc.qdot0 = as_vector(init["qdot"], "initial_state.qdot");

  if (doc.contains("controller")) sc.controller = parse_controller_block(doc["controller"]);

  const json& sim = require_key(doc, "sim", "scenario");
  sc.duration = as_number(require_key(sim, "duration", "sim"), "sim.duration");
  sc.dt = as_number(require_key(sim, "dt", "sim"), "sim.dt");
  if (sim.contains("gravity")) sc.gravity = as_vec3(sim["gravity"], "sim.gravity");
  if (!(sc.duration > 0.0)) bad("sim.duration must be positive");
  if (!(sc.dt > 0.0)) bad("sim.dt must be positive");
  if (sc.dt > sc.duration) bad("sim.dt must not exceed sim.duration");

  if (doc.contains("events")) {
    if (!doc["events"].is_array()) bad("'events' must be an array");
    for (const auto& e : doc["events"]) {
      if (e.contains("external_wrench")) {
        WrenchInterval interval;
        interval.start = as_number(require_key(e, "start", "external_wrench event"), "start");
        interval.end = as_number(require_key(e, "end", "external_wrench event"), "end");
        const json& w = e["external_wrench"];
        interval.wrench = as_vec6(require_key(w, "wrench", "external_wrench"), "wrench");
        if (w.contains("frame")) {
          std::string f = w["frame"].get<std::string>();
          if (f == "base") {
            interval.frame = WrenchFrame::Base;
          } else if (f == "end_effector") {
            interval.frame = WrenchFrame::EndEffector;
          } else {
            bad("external_wrench.frame must be \"base\" or \"end_effector\"");
          }
        }
        if (interval.start > interval.end) bad("external_wrench interval has start > end");
        if (interval.start < 0.0 || interval.end > sc.duration) {
          bad("external_wrench interval must lie within [0, duration]");
        }
        sc.wrench_intervals.push_back(interval);
        continue;
      }
      ScenarioEvent event;
      event.time = as_number(require_key(e, "time", "event"), "event.time");
      if (event.time < 0.0 || event.time > sc.duration) {
        bad("event time must lie within [0, duration]");
      }
      int actions = 0;
      if (e.contains("set_targets")) {
        ++actions;
        const json& t = e["set_targets"];
        TargetEventSpec spec;
        if (t.contains("pose")) spec.pose = as_pose(t["pose"], "set_targets.pose");
        if (t.contains("nullspace_q"))
          spec.nullspace_q = as_vector(t["nullspace_q"], "set_targets.nullspace_q");
        if (t.contains("wrench")) spec.wrench = as_vec6(t["wrench"], "set_targets.wrench");
        event.action = spec;
      }
      if (e.contains("set_gains")) {
        ++actions;
        event.action = parse_gain_event(e["set_gains"]);
      }
      if (e.contains("trajectory")) {
        ++actions;
        event.action = parse_trajectory(e["trajectory"]);
      }
      if (actions != 1) {
        bad("each event needs exactly one of set_targets / set_gains / trajectory / "
            "external_wrench");
      }
      sc.events.push_back(std::move(event));
    }
  }

  if (doc.contains("environment")) {
    const json& env = doc["environment"];
    if (env.contains("springs")) {
      for (const auto& s : env["springs"]) {
        EnvironmentSpring spring;
        if (s.contains("anchor")) spring.anchor = as_vec3(s["anchor"], "spring.anchor");
        spring.stiffness = as_number(require_key(s, "stiffness", "spring"), "spring.stiffness");
        if (spring.stiffness < 0.0) bad("spring.stiffness must be non-negative");
        sc.springs.push_back(spring);
      }
    }
  }
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), std::filesystem::path(path).parent_path().string());
}

namespace {

using SweepSetter = void (*)(Scenario&, double);

const std::map<std::string, SweepSetter>& sweep_registry() {
  static const std::map<std::string, SweepSetter> registry = {
      {"gains.k_ca.trans", [](Scenario& s, double v) { s.controller.k_ca.trans.setConstant(v); }},
      {"gains.k_ca.trans.x", [](Scenario& s, double v) { s.controller.k_ca.trans.x() = v; }},
      {"gains.k_ca.trans.y", [](Scenario& s, double v) { s.controller.k_ca.trans.y() = v; }},
      {"gains.k_ca.trans.z", [](Scenario& s, double v) { s.controller.k_ca.trans.z() = v; }},
      {"gains.k_ca.rot", [](Scenario& s, double v) { s.controller.k_ca.rot.setConstant(v); }},
      {"gains.k_ca.rot.x", [](Scenario& s, double v) { s.controller.k_ca.rot.x() = v; }},
      {"gains.k_ca.rot.y", [](Scenario& s, double v) { s.controller.k_ca.rot.y() = v; }},
      {"gains.k_ca.rot.z", [](Scenario& s, double v) { s.controller.k_ca.rot.z() = v; }},
      {"gains.d_ca.ratio", [](Scenario& s, double v) { s.controller.damping_ratio = v; s.controller.d_ca.reset(); }},
      {"gains.k_ns", [](Scenario& s, double v) { s.controller.k_ns = VecX::Constant(1, v); }},
      {"gains.d_ns", [](Scenario& s, double v) { s.controller.d_ns = VecX::Constant(1, v); s.controller.ns_damping_ratio.reset(); }},
      {"filter.p", [](Scenario& s, double v) { s.controller.filter.p = v; }},
      {"filter.T", [](Scenario& s, double v) { s.controller.filter.horizon = v; }},
      {"rate_limit", [](Scenario& s, double v) { s.controller.torque_rate_max = v; }},
      {"wrench.fx", [](Scenario& s, double v) { s.controller.wrench[0] = v; }},
      {"wrench.fy", [](Scenario& s, double v) { s.controller.wrench[1] = v; }},
      {"wrench.fz", [](Scenario& s, double v) { s.controller.wrench[2] = v; }},
      {"wrench.tx", [](Scenario& s, double v) { s.controller.wrench[3] = v; }},
      {"wrench.ty", [](Scenario& s, double v) { s.controller.wrench[4] = v; }},
      {"wrench.tz", [](Scenario& s, double v) { s.controller.wrench[5] = v; }},
      {"sim.duration", [](Scenario& s, double v) { s.duration = v; }},
      {"sim.dt", [](Scenario& s, double v) { s.dt = v; }},
  };
  return registry;
}

}  // namespace

std::vector<std::string> sweep_parameter_keys() {
  std::vector<std::string> keys;
  for (const auto& [key, fn] : sweep_registry()) keys.push_back(key);
  return keys;
}

void apply_sweep_parameter(Scenario& scenario, const std::string& key, double value) {
  auto it = sweep_registry().find(key);
  if (it == sweep_registry().end()) {
    std::string known;
    for (const auto& k : sweep_parameter_keys()) {
      if (!known.empty()) known += ", ";
      known += k;
    }
    throw ConfigError("unknown sweep parameter '" + key + "'; known keys: " + known);
  }
  it->second(scenario, value);
}

}  // namespace cic
