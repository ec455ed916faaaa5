#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cic/model.hpp"

namespace cic {

/// Parses a URDF-subset robot description (robot/link/joint with inertial,
/// origin, axis and limit elements; revolute and fixed joints only).
///
/// Unknown elements (visual, collision, ...) are skipped; a note per skip is
/// appended to `warnings` when the pointer is non-null. Unsupported joint
/// kinds raise SemanticError, malformed markup raises SyntaxError with
/// line/column.
RobotModel parse_robot_description(std::string_view text,
                                   std::vector<std::string>* warnings = nullptr);

/// Renders the model back to the same subset format. Floating-point fields
/// are printed with 17 significant digits so parse(serialize(m)) == m.
std::string serialize_robot_description(const RobotModel& model);

/// Canonical JSON rendering of a model (fixed field order, 17-significant-
/// digit floats) for golden tests and `cicsim validate --dump-model`.
std::string dump_model_json(const RobotModel& model);

}  // namespace cic
