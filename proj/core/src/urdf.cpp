#include "cic/urdf.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "cic/errors.hpp"
#include "num_format.hpp"
#include "xml.hpp"

namespace cic {

namespace {

using detail::fmt17;
using detail::parse_double;

std::string where(const xml::Element& e) {
  return "line " + std::to_string(e.line) + ": ";
}

double require_number(const xml::Element& elem, const xml::Attribute& attr) {
  double value = 0.0;
  // Trim surrounding whitespace; URDF files routinely pad attribute values.
  std::string_view sv = attr.value;
  while (!sv.empty() && std::isspace(static_cast<unsigned char>(sv.front()))) sv.remove_prefix(1);
  while (!sv.empty() && std::isspace(static_cast<unsigned char>(sv.back()))) sv.remove_suffix(1);
  if (!parse_double(sv, value)) {
    throw SemanticError(where(elem) + "invalid number '" + attr.value + "' in attribute '" +
                        attr.name + "' of <" + elem.name + ">");
  }
  return value;
}

Vec3 require_vec3(const xml::Element& elem, const xml::Attribute& attr) {
  std::istringstream ss{attr.value};
  std::string token;
  Vec3 out = Vec3::Zero();
  int i = 0;
  while (ss >> token) {
    double v = 0.0;
    if (i >= 3 || !parse_double(token, v)) {
      throw SemanticError(where(elem) + "attribute '" + attr.name + "' of <" + elem.name +
                          "> is not a whitespace-separated triple: '" + attr.value + "'");
    }
    out[i++] = v;
  }
  if (i != 3) {
    throw SemanticError(where(elem) + "attribute '" + attr.name + "' of <" + elem.name +
                        "> is not a whitespace-separated triple: '" + attr.value + "'");
  }
  return out;
}

std::string require_attribute(const xml::Element& elem, const char* name) {
  const auto* attr = elem.find_attribute(name);
  if (!attr) {
    throw SemanticError(where(elem) + "<" + elem.name + "> is missing required attribute '" +
                        name + "'");
  }
  return attr->value;
}

/// Fixed-axis XYZ convention: roll about x, then pitch about y, then yaw
/// about z, all in the original frame.
Mat3 rotation_from_rpy(const Vec3& rpy) {
  return (Eigen::AngleAxisd(rpy.z(), Vec3::UnitZ()) * Eigen::AngleAxisd(rpy.y(), Vec3::UnitY()) *
          Eigen::AngleAxisd(rpy.x(), Vec3::UnitX()))
      .toRotationMatrix();
}

Vec3 rpy_from_rotation(const Mat3& r) {
  Vec3 rpy;
  double cp = std::sqrt(r(2, 1) * r(2, 1) + r(2, 2) * r(2, 2));
  rpy.y() = std::atan2(-r(2, 0), cp);
  if (cp < 1e-12) {
    // Gimbal lock: pitch = +-pi/2, split is arbitrary; put it all in roll.
    rpy.x() = std::atan2(-r(1, 2), r(1, 1));
    rpy.z() = 0.0;
  } else {
    rpy.x() = std::atan2(r(2, 1), r(2, 2));
    rpy.z() = std::atan2(r(1, 0), r(0, 0));
  }
  return rpy;
}

Transform parse_origin(const xml::Element& origin) {
  Transform t = Transform::Identity();
  if (const auto* xyz = origin.find_attribute("xyz")) {
    t.translation() = require_vec3(origin, *xyz);
  }
  if (const auto* rpy = origin.find_attribute("rpy")) {
    t.linear() = rotation_from_rpy(require_vec3(origin, *rpy));
  }
  return t;
}

void warn(std::vector<std::string>* warnings, const std::string& msg) {
  if (warnings) warnings->push_back(msg);
}

void note_unknown_children(const xml::Element& parent, const std::set<std::string>& known,
                           std::vector<std::string>* warnings) {
  for (const auto& child : parent.children) {
    if (!known.count(child->name)) {
      warn(warnings, where(*child) + "skipping unsupported element <" + child->name + "> inside <" +
                         parent.name + ">");
    }
  }
  for (char c : parent.text) {
    if (!std::isspace(static_cast<unsigned char>(c))) {
      warn(warnings, where(parent) + "ignoring character data inside <" + parent.name + ">");
      break;
    }
  }
}

const xml::Element* unique_child(const xml::Element& parent, const char* name) {
  auto matches = parent.children_named(name);
  if (matches.size() > 1) {
    throw SemanticError(where(*matches[1]) + "duplicate <" + std::string(name) + "> inside <" +
                        parent.name + ">");
  }
  return matches.empty() ? nullptr : matches.front();
}

LinkSpec parse_link(const xml::Element& elem, std::vector<std::string>* warnings) {
  LinkSpec link;
  link.name = require_attribute(elem, "name");
  note_unknown_children(elem, {"inertial"}, warnings);

  const auto* inertial = unique_child(elem, "inertial");
  if (!inertial) return link;
  note_unknown_children(*inertial, {"origin", "mass", "inertia"}, warnings);

  Mat3 inertial_rotation = Mat3::Identity();
  if (const auto* origin = unique_child(*inertial, "origin")) {
    Transform t = parse_origin(*origin);
    link.com = t.translation();
    inertial_rotation = t.linear();
  }
  if (const auto* mass = unique_child(*inertial, "mass")) {
    const auto* value = mass->find_attribute("value");
    if (!value) throw SemanticError(where(*mass) + "<mass> is missing attribute 'value'");
    link.mass = require_number(*mass, *value);
  }
  if (const auto* inertia = unique_child(*inertial, "inertia")) {
    auto entry = [&](const char* attr_name) -> double {
      const auto* attr = inertia->find_attribute(attr_name);
      return attr ? require_number(*inertia, *attr) : 0.0;
    };
    Mat3 tensor;
    tensor << entry("ixx"), entry("ixy"), entry("ixz"),  //
        0.0, entry("iyy"), entry("iyz"),                 //
        0.0, 0.0, entry("izz");
    tensor(1, 0) = tensor(0, 1);
    tensor(2, 0) = tensor(0, 2);
    tensor(2, 1) = tensor(1, 2);
    // Re-express in link-frame axes when the inertial frame is rotated.
    link.inertia = inertial_rotation * tensor * inertial_rotation.transpose();
  }

  if (link.mass < 0.0) {
    throw SemanticError(where(elem) + "link '" + link.name + "' has negative mass");
  }
  Eigen::SelfAdjointEigenSolver<Mat3> eig(link.inertia);
  if (eig.eigenvalues().minCoeff() < -1e-12) {
    throw SemanticError(where(elem) + "inertia of link '" + link.name +
                        "' is not positive semidefinite");
  }
  return link;
}

JointSpec parse_joint(const xml::Element& elem, std::vector<std::string>* warnings) {
  JointSpec joint;
  joint.name = require_attribute(elem, "name");
  std::string type = require_attribute(elem, "type");
  if (type == "revolute") {
    joint.kind = JointKind::Revolute;
  } else if (type == "fixed") {
    joint.kind = JointKind::Fixed;
  } else {
    throw SemanticError(where(elem) + "unsupported joint kind '" + type + "' in joint '" +
                        joint.name + "' (supported: revolute, fixed)");
  }
  note_unknown_children(elem, {"origin", "parent", "child", "axis", "limit"}, warnings);

  const auto* parent = unique_child(elem, "parent");
  if (!parent) throw SemanticError(where(elem) + "joint '" + joint.name + "' is missing <parent>");
  joint.parent_link = require_attribute(*parent, "link");

  const auto* child = unique_child(elem, "child");
  if (!child) throw SemanticError(where(elem) + "joint '" + joint.name + "' is missing <child>");
  joint.child_link = require_attribute(*child, "link");

  if (const auto* origin = unique_child(elem, "origin")) {
    joint.origin = parse_origin(*origin);
  }
  if (const auto* axis = unique_child(elem, "axis")) {
    const auto* xyz = axis->find_attribute("xyz");
    if (!xyz) throw SemanticError(where(*axis) + "<axis> is missing attribute 'xyz'");
    joint.axis = require_vec3(*axis, *xyz);
  }
  double norm = joint.axis.norm();
  if (norm < 1e-12) {
    throw SemanticError(where(elem) + "joint '" + joint.name + "' has a zero-length axis");
  }
  if (std::abs(norm - 1.0) > 1e-9) {
    warn(warnings, where(elem) + "normalizing non-unit axis of joint '" + joint.name + "'");
  }
  joint.axis /= norm;

  if (const auto* limit = unique_child(elem, "limit")) {
    if (const auto* lower = limit->find_attribute("lower"))
      joint.lower_limit = require_number(*limit, *lower);
    if (const auto* upper = limit->find_attribute("upper"))
      joint.upper_limit = require_number(*limit, *upper);
    if (const auto* effort = limit->find_attribute("effort"))
      joint.effort_limit = require_number(*limit, *effort);
    if (joint.lower_limit && joint.upper_limit && *joint.lower_limit > *joint.upper_limit) {
      throw SemanticError(where(*limit) + "joint '" + joint.name + "' has lower limit above upper");
    }
    if (joint.effort_limit && *joint.effort_limit <= 0.0) {
      throw SemanticError(where(*limit) + "joint '" + joint.name +
                          "' has a non-positive effort limit");
    }
  }
  return joint;
}

void validate_structure(RobotModel& model) {
  std::set<std::string> link_names;
  for (const auto& link : model.links) {
    if (!link_names.insert(link.name).second) {
      throw SemanticError("duplicate link name '" + link.name + "'");
    }
  }
  std::set<std::string> joint_names;
  std::map<std::string, int> parent_count;
  for (const auto& joint : model.joints) {
    if (!joint_names.insert(joint.name).second) {
      throw SemanticError("duplicate joint name '" + joint.name + "'");
    }
    for (const std::string* ref : {&joint.parent_link, &joint.child_link}) {
      if (!link_names.count(*ref)) {
        throw SemanticError("joint '" + joint.name + "' references undeclared link '" + *ref +
                            "'");
      }
    }
    if (joint.parent_link == joint.child_link) {
      throw SemanticError("joint '" + joint.name + "' connects link '" + joint.parent_link +
                          "' to itself");
    }
    parent_count[joint.child_link] += 1;
  }

  std::vector<std::string> roots;
  for (const auto& link : model.links) {
    auto it = parent_count.find(link.name);
    if (it == parent_count.end()) {
      roots.push_back(link.name);
    } else if (it->second > 1) {
      throw SemanticError("link '" + link.name + "' has multiple parent joints (not a tree)");
    }
  }
  if (roots.empty()) {
    throw SemanticError("no root link: the joint graph contains a cycle");
  }
  if (roots.size() > 1) {
    throw SemanticError("multiple root links ('" + roots[0] + "', '" + roots[1] +
                        "', ...): description is not a single tree");
  }
  model.root_link = roots.front();

  // Reachability from the root; unreachable links mean a detached cycle.
  std::set<std::string> reached{model.root_link};
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& joint : model.joints) {
      if (reached.count(joint.parent_link) && !reached.count(joint.child_link)) {
        reached.insert(joint.child_link);
        grew = true;
      }
    }
  }
  if (reached.size() != model.links.size()) {
    for (const auto& link : model.links) {
      if (!reached.count(link.name)) {
        throw SemanticError("link '" + link.name + "' is not reachable from root '" +
                            model.root_link + "'");
      }
    }
  }
}

std::string escape_attr(const std::string& raw) {
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

std::string vec3_attr(const Vec3& v) {
  return fmt17(v.x()) + " " + fmt17(v.y()) + " " + fmt17(v.z());
}

}  // namespace

RobotModel parse_robot_description(std::string_view text, std::vector<std::string>* warnings) {
  auto doc = xml::parse_document(text);
  if (doc->name != "robot") {
    throw SemanticError("line " + std::to_string(doc->line) + ": expected <robot> root element, found <" +
                        doc->name + ">");
  }
  RobotModel model;
  if (const auto* name = doc->find_attribute("name")) model.name = name->value;

  note_unknown_children(*doc, {"link", "joint"}, warnings);
  for (const auto& child : doc->children) {
    if (child->name == "link") {
      model.links.push_back(parse_link(*child, warnings));
    } else if (child->name == "joint") {
      model.joints.push_back(parse_joint(*child, warnings));
    }
  }
  if (model.links.empty()) {
    throw SemanticError("description declares no links");
  }
  validate_structure(model);
  return model;
}

std::string serialize_robot_description(const RobotModel& model) {
  std::ostringstream out;
  out << "<robot name=\"" << escape_attr(model.name) << "\">\n";
  for (const auto& link : model.links) {
    out << "  <link name=\"" << escape_attr(link.name) << "\">\n";
    out << "    <inertial>\n";
    out << "      <origin xyz=\"" << vec3_attr(link.com) << "\" rpy=\"0 0 0\"/>\n";
    out << "      <mass value=\"" << fmt17(link.mass) << "\"/>\n";
    out << "      <inertia ixx=\"" << fmt17(link.inertia(0, 0)) << "\" ixy=\""
        << fmt17(link.inertia(0, 1)) << "\" ixz=\"" << fmt17(link.inertia(0, 2)) << "\" iyy=\""
        << fmt17(link.inertia(1, 1)) << "\" iyz=\"" << fmt17(link.inertia(1, 2)) << "\" izz=\""
        << fmt17(link.inertia(2, 2)) << "\"/>\n";
    out << "    </inertial>\n";
    out << "  </link>\n";
  }
  for (const auto& joint : model.joints) {
    out << "  <joint name=\"" << escape_attr(joint.name) << "\" type=\""
        << (joint.kind == JointKind::Revolute ? "revolute" : "fixed") << "\">\n";
    out << "    <origin xyz=\"" << vec3_attr(joint.origin.translation()) << "\" rpy=\""
        << vec3_attr(rpy_from_rotation(joint.origin.linear())) << "\"/>\n";
    out << "    <parent link=\"" << escape_attr(joint.parent_link) << "\"/>\n";
    out << "    <child link=\"" << escape_attr(joint.child_link) << "\"/>\n";
    out << "    <axis xyz=\"" << vec3_attr(joint.axis) << "\"/>\n";
    if (joint.lower_limit || joint.upper_limit || joint.effort_limit) {
      out << "    <limit";
      if (joint.lower_limit) out << " lower=\"" << fmt17(*joint.lower_limit) << "\"";
      if (joint.upper_limit) out << " upper=\"" << fmt17(*joint.upper_limit) << "\"";
      if (joint.effort_limit) out << " effort=\"" << fmt17(*joint.effort_limit) << "\"";
      out << "/>\n";
    }
    out << "  </joint>\n";
  }
  out << "</robot>\n";
  return out.str();
}

std::string dump_model_json(const RobotModel& model) {
  std::ostringstream out;
  auto json_str = [](const std::string& s) {
    std::string esc;
    for (char c : s) {
      if (c == '"' || c == '\\') esc.push_back('\\');
      esc.push_back(c);
    }
    return "\"" + esc + "\"";
  };
  auto vec3_json = [](const Vec3& v) {
    return "[" + fmt17(v.x()) + ", " + fmt17(v.y()) + ", " + fmt17(v.z()) + "]";
  };

  out << "{\n";
  out << "  \"name\": " << json_str(model.name) << ",\n";
  out << "  \"root_link\": " << json_str(model.root_link) << ",\n";
  out << "  \"links\": [\n";
  for (std::size_t i = 0; i < model.links.size(); ++i) {
    const auto& link = model.links[i];
    out << "    {\"name\": " << json_str(link.name) << ", \"mass\": " << fmt17(link.mass)
        << ", \"com\": " << vec3_json(link.com) << ", \"inertia\": [";
    for (int r = 0; r < 3; ++r) {
      for (int c = 0; c < 3; ++c) {
        out << fmt17(link.inertia(r, c));
        if (r != 2 || c != 2) out << ", ";
      }
    }
    out << "]}" << (i + 1 < model.links.size() ? "," : "") << "\n";
  }
  out << "  ],\n";
  out << "  \"joints\": [\n";
  for (std::size_t i = 0; i < model.joints.size(); ++i) {
    const auto& joint = model.joints[i];
    out << "    {\"name\": " << json_str(joint.name) << ", \"kind\": "
        << (joint.kind == JointKind::Revolute ? "\"revolute\"" : "\"fixed\"")
        << ", \"parent\": " << json_str(joint.parent_link)
        << ", \"child\": " << json_str(joint.child_link)
        << ", \"origin_xyz\": " << vec3_json(joint.origin.translation())
        << ", \"origin_rpy\": " << vec3_json(rpy_from_rotation(joint.origin.linear()))
        << ", \"axis\": " << vec3_json(joint.axis);
    if (joint.lower_limit) out << ", \"lower\": " << fmt17(*joint.lower_limit);
    if (joint.upper_limit) out << ", \"upper\": " << fmt17(*joint.upper_limit);
    if (joint.effort_limit) out << ", \"effort\": " << fmt17(*joint.effort_limit);
    out << "}" << (i + 1 < model.joints.size() ? "," : "") << "\n";
  }
  out << "  ]\n";
  out << "}\n";
  return out.str();
}

}  // namespace cic
