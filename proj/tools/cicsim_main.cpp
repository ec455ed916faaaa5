// cicsim: validate robot models, run closed-loop scenarios, sweep parameters.
//
// Exit codes: 0 success, 1 input/schema error, 2 I/O error, 3 numerical abort.
// Set CICSIM_LOG=quiet|info|debug to control stderr verbosity.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cic/errors.hpp"
#include "cic/log_io.hpp"
#include "cic/simulation.hpp"
#include "cic/urdf.hpp"

namespace {

enum class LogLevel { Quiet = 0, Info = 1, Debug = 2 };

LogLevel log_level() {
  const char* env = std::getenv("CICSIM_LOG");
  if (!env) return LogLevel::Info;
  std::string v(env);
  if (v == "quiet") return LogLevel::Quiet;
  if (v == "debug") return LogLevel::Debug;
  return LogLevel::Info;
}

void print_warnings(const std::vector<std::string>& warnings, LogLevel min_level) {
  if (log_level() < min_level) return;
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string fmt_short(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::string read_file_or_throw(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw cic::IoError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int cmd_validate(const std::string& model_path, bool dump_model) {
  std::vector<std::string> warnings;
  cic::RobotModel model = cic::parse_robot_description(read_file_or_throw(model_path), &warnings);
  print_warnings(warnings, LogLevel::Info);

  if (dump_model) {
    std::cout << cic::dump_model_json(model);
    return 0;
  }

  int actuated = 0;
  for (const auto& joint : model.joints) {
    if (joint.kind == cic::JointKind::Revolute) ++actuated;
  }
  std::cout << "model: " << (model.name.empty() ? "(unnamed)" : model.name) << "\n";
  std::cout << "root link: " << model.root_link << "\n";
  std::cout << "links: " << model.links.size() << ", joints: " << model.joints.size()
            << ", n=" << actuated << "\n";
  for (const auto& link : model.links) {
    std::cout << "  link " << link.name << ": mass " << fmt_short(link.mass) << " kg\n";
  }
  for (const auto& joint : model.joints) {
    std::cout << "  joint " << joint.name << " ("
              << (joint.kind == cic::JointKind::Revolute ? "revolute" : "fixed") << ")";
    if (joint.lower_limit || joint.upper_limit) {
      std::cout << " limits [" << (joint.lower_limit ? fmt_short(*joint.lower_limit) : "-")
                << ", " << (joint.upper_limit ? fmt_short(*joint.upper_limit) : "-") << "] rad";
    }
    if (joint.effort_limit) std::cout << " effort " << fmt_short(*joint.effort_limit) << " N*m";
    std::cout << "\n";
  }
  return 0;
}

void print_report(std::ostream& out, const cic::SteadyStateReport& report) {
  out << "report.window_s=" << fmt(report.window) << "\n";
  out << "report.samples=" << report.samples << "\n";
  out << "report.mean_trans_error=" << fmt(report.mean_trans_error) << "\n";
  out << "report.max_trans_error=" << fmt(report.max_trans_error) << "\n";
  out << "report.mean_rot_error=" << fmt(report.mean_rot_error) << "\n";
  out << "report.max_rot_error=" << fmt(report.max_rot_error) << "\n";
  out << "report.mean_pose_error=";
  for (int i = 0; i < 6; ++i) out << (i ? "," : "") << fmt(report.mean_pose_error[i]);
  out << "\n";
  out << "report.mean_torque=";
  for (Eigen::Index i = 0; i < report.mean_torque.size(); ++i) {
    out << (i ? "," : "") << fmt(report.mean_torque[i]);
  }
  out << "\n";
  out << "report.max_torque_inf=" << fmt(report.max_torque_inf) << "\n";
  out << "report.mean_applied_wrench=";
  for (int i = 0; i < 6; ++i) out << (i ? "," : "") << fmt(report.mean_applied_wrench[i]);
  out << "\n";
}

int cmd_run(const std::string& scenario_path, const std::string& out_path,
            const std::string& format) {
  cic::Scenario scenario = cic::load_scenario(scenario_path);
  std::vector<std::string> warnings;
  std::vector<cic::LogRecord> log = cic::run_scenario(scenario, &warnings);
  print_warnings(warnings, LogLevel::Debug);

  std::ofstream out(out_path);
  if (!out) throw cic::IoError("cannot open output file '" + out_path + "'");
  if (format == "csv") {
    cic::write_log_csv(out, log);
  } else {
    cic::write_log_ndjson(out, log);
  }
  if (!out) throw cic::IoError("failed writing '" + out_path + "'");

  const double span = log.empty() ? 0.0 : log.back().t - log.front().t;
  print_report(std::cout, cic::steady_state_report(log, std::min(1.0, span)));
  return 0;
}

int cmd_sweep(const std::string& scenario_path, const std::string& param,
              const std::vector<double>& values, const std::string& out_path) {
  if (values.empty()) throw cic::ConfigError("sweep: the value list is empty");
  cic::Scenario base = cic::load_scenario(scenario_path);

  std::ostringstream table;
  table << "value,mean_trans_error,max_trans_error,mean_rot_error,max_rot_error";
  for (int i = 0; i < 6; ++i) table << ",mean_err_" << i;
  table << ",max_torque_inf";
  for (int i = 0; i < 6; ++i) table << ",mean_ext_wrench_" << i;
  table << "\n";

  for (double value : values) {
    cic::Scenario scenario = base;
    cic::apply_sweep_parameter(scenario, param, value);
    std::vector<cic::LogRecord> log = cic::run_scenario(scenario);
    const double span = log.empty() ? 0.0 : log.back().t - log.front().t;
    cic::SteadyStateReport report = cic::steady_state_report(log, std::min(1.0, span));
    table << fmt(value) << "," << fmt(report.mean_trans_error) << ","
          << fmt(report.max_trans_error) << "," << fmt(report.mean_rot_error) << ","
          << fmt(report.max_rot_error);
    for (int i = 0; i < 6; ++i) table << "," << fmt(report.mean_pose_error[i]);
    table << "," << fmt(report.max_torque_inf);
    for (int i = 0; i < 6; ++i) table << "," << fmt(report.mean_applied_wrench[i]);
    table << "\n";
  }

  if (out_path.empty()) {
    std::cout << table.str();
  } else {
    std::ofstream out(out_path);
    if (!out) throw cic::IoError("cannot open output file '" + out_path + "'");
    out << table.str();
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cartesian impedance control simulator"};
  app.require_subcommand(1);

  std::string model_path;
  bool dump_model = false;
  auto* validate = app.add_subcommand("validate", "Parse and check a robot description");
  validate->add_option("model", model_path, "URDF-subset robot file")->required();
  validate->add_flag("--dump-model", dump_model, "Print the canonical JSON model rendering");

  std::string scenario_path, out_path = "log.csv", format = "csv";
  auto* run = app.add_subcommand("run", "Run a closed-loop scenario and write the log");
  run->add_option("scenario", scenario_path, "Scenario JSON file")->required();
  run->add_option("-o,--output", out_path, "Log output path");
  run->add_option("--format", format, "Log format")->check(CLI::IsMember({"csv", "ndjson"}));

  std::string sweep_scenario, sweep_param, sweep_values, sweep_out;
  auto* sweep = app.add_subcommand("sweep", "Re-run a scenario over a parameter range");
  sweep->add_option("scenario", sweep_scenario, "Scenario JSON file")->required();
  sweep->add_option("--param", sweep_param, "Dotted config key, e.g. gains.k_ca.trans.x")
      ->required();
  sweep->add_option("--values", sweep_values, "Comma-separated values")->required();
  sweep->add_option("-o,--output", sweep_out, "Write the CSV table here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (validate->parsed()) return cmd_validate(model_path, dump_model);
    if (run->parsed()) return cmd_run(scenario_path, out_path, format);
    if (sweep->parsed()) {
      std::vector<double> values;
      std::stringstream ss(sweep_values);
      std::string token;
      while (std::getline(ss, token, ',')) {
        if (token.empty()) continue;
        values.push_back(std::stod(token));
      }
      return cmd_sweep(sweep_scenario, sweep_param, values, sweep_out);
    }
  } catch (const cic::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const cic::NonFiniteState& e) {
    std::cerr << "error: " << e.what() << "\n";
    std::cerr << "last_good_t=" << fmt(e.last_good_time()) << "\n";
    return 3;
  } catch (const cic::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
