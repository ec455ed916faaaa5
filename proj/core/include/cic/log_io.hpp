#pragma once

#include <iosfwd>
#include <vector>

#include "cic/simulation.hpp"

namespace cic {

/// Header row plus one row per record; floats carry 17 significant digits so
/// the text round-trips IEEE doubles exactly.
void write_log_csv(std::ostream& out, const std::vector<LogRecord>& log);

/// Parses a log produced by write_log_csv back into records.
std::vector<LogRecord> read_log_csv(std::istream& in);

/// Newline-delimited JSON, one object per record.
void write_log_ndjson(std::ostream& out, const std::vector<LogRecord>& log);

}  // namespace cic
