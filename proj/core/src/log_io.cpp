#include "cic/log_io.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cic/errors.hpp"
#include "num_format.hpp"

namespace cic {

namespace {

using detail::fmt17;
using detail::parse_double;

void emit_series(std::ostream& out, const char* prefix, Eigen::Index count) {
  for (Eigen::Index i = 0; i < count; ++i) out << "," << prefix << i;
}

template <typename Vec>
void emit_values(std::ostream& out, const Vec& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) out << "," << fmt17(v[i]);
}

}  // namespace

void write_log_csv(std::ostream& out, const std::vector<LogRecord>& log) {
  if (log.empty()) {
    out << "t\n";
    return;
  }
  const Eigen::Index n = log.front().q.size();

  out << "t";
  emit_series(out, "q", n);
  emit_series(out, "qd", n);
  out << ",ee_x,ee_y,ee_z,ee_qw,ee_qx,ee_qy,ee_qz";
  emit_series(out, "err", 6);
  emit_series(out, "tau_task", n);
  emit_series(out, "tau_ns", n);
  emit_series(out, "tau_wrench", n);
  emit_series(out, "tau_cmd", n);
  emit_series(out, "ext_wrench", 6);
  emit_series(out, "k_ca", 6);
  emit_series(out, "d_ca", 6);
  emit_series(out, "k_ns", n);
  emit_series(out, "d_ns", n);
  out << "\n";

  for (const auto& rec : log) {
    out << fmt17(rec.t);
    emit_values(out, rec.q);
    emit_values(out, rec.qdot);
    out << "," << fmt17(rec.pose.translation.x()) << "," << fmt17(rec.pose.translation.y()) << ","
        << fmt17(rec.pose.translation.z()) << "," << fmt17(rec.pose.orientation.w()) << ","
        << fmt17(rec.pose.orientation.x()) << "," << fmt17(rec.pose.orientation.y()) << ","
        << fmt17(rec.pose.orientation.z());
    emit_values(out, rec.pose_error);
    emit_values(out, rec.tau_task);
    emit_values(out, rec.tau_nullspace);
    emit_values(out, rec.tau_wrench);
    emit_values(out, rec.tau_command);
    emit_values(out, rec.applied_wrench);
    emit_values(out, rec.k_ca_diag);
    emit_values(out, rec.d_ca_diag);
    emit_values(out, rec.k_ns_diag);
    emit_values(out, rec.d_ns_diag);
    out << "\n";
  }
}

std::vector<LogRecord> read_log_csv(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw IoError("log CSV: missing header row");

  // Recover the joint count from the q columns.
  Eigen::Index n = 0;
  {
    std::istringstream hs(header);
    std::string column;
    while (std::getline(hs, column, ',')) {
      if (column.size() > 1 && column[0] == 'q' && column.find_first_not_of("0123456789", 1) == std::string::npos) {
        ++n;
      }
    }
  }
  if (n == 0) throw IoError("log CSV: header declares no q columns");

  const std::size_t expected = 1 + 4 * static_cast<std::size_t>(n) + 7 + 6 +
                               4 * static_cast<std::size_t>(n) + 6 + 12;
  std::vector<LogRecord> log;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> values;
    values.reserve(expected);
    std::istringstream ls(line);
    std::string token;
    while (std::getline(ls, token, ',')) {
      double v = 0.0;
      if (!parse_double(token, v)) throw IoError("log CSV: bad number '" + token + "'");
      values.push_back(v);
    }
    if (values.size() != expected) {
      throw IoError("log CSV: row has " + std::to_string(values.size()) + " fields, expected " +
                    std::to_string(expected));
    }

    LogRecord rec;
    std::size_t idx = 0;
    auto take_vec = [&](Eigen::Index count) {
      VecX v(count);
      for (Eigen::Index i = 0; i < count; ++i) v[i] = values[idx++];
      return v;
    };
    rec.t = values[idx++];
    rec.q = take_vec(n);
    rec.qdot = take_vec(n);
    Vec3 trans;
    trans << values[idx], values[idx + 1], values[idx + 2];
    idx += 3;
    Quat q(values[idx], values[idx + 1], values[idx + 2], values[idx + 3]);
    idx += 4;
    rec.pose = CartesianPose(trans, q);
    rec.pose_error = take_vec(6);
    rec.tau_task = take_vec(n);
    rec.tau_nullspace = take_vec(n);
    rec.tau_wrench = take_vec(n);
    rec.tau_command = take_vec(n);
    rec.applied_wrench = take_vec(6);
    rec.k_ca_diag = take_vec(6);
    rec.d_ca_diag = take_vec(6);
    rec.k_ns_diag = take_vec(n);
    rec.d_ns_diag = take_vec(n);
    log.push_back(std::move(rec));
  }
  return log;
}

void write_log_ndjson(std::ostream& out, const std::vector<LogRecord>& log) {
  using nlohmann::json;
  auto to_array = [](const auto& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
    return arr;
  };
  for (const auto& rec : log) {
    json j;
    j["t"] = rec.t;
    j["q"] = to_array(rec.q);
    j["qdot"] = to_array(rec.qdot);
    j["pose"] = {{"translation", to_array(rec.pose.translation)},
                 {"orientation", {rec.pose.orientation.w(), rec.pose.orientation.x(),
                                  rec.pose.orientation.y(), rec.pose.orientation.z()}}};
    j["pose_error"] = to_array(rec.pose_error);
    j["tau_task"] = to_array(rec.tau_task);
    j["tau_nullspace"] = to_array(rec.tau_nullspace);
    j["tau_wrench"] = to_array(rec.tau_wrench);
    j["tau_command"] = to_array(rec.tau_command);
    j["applied_wrench"] = to_array(rec.applied_wrench);
    j["k_ca_diag"] = to_array(rec.k_ca_diag);
    j["d_ca_diag"] = to_array(rec.d_ca_diag);
    j["k_ns_diag"] = to_array(rec.k_ns_diag);
    j["d_ns_diag"] = to_array(rec.d_ns_diag);
    out << j.dump() << "\n";
  }
}

}  // namespace cic
