#pragma once

#include <string>
#include <vector>

#include "qclim/config.hpp"
#include "qclim/harness.hpp"

namespace qclim {

/// Provenance stamped on every output file.
struct RunStamp {
  std::string config_hash;
  std::string code_version = kCodeVersion;
  int schema_version = kSchemaVersion;
};

/// Shortest round-trip decimal text of a double (%.17g).
std::string format_double(double v);

Json report_to_json(const ConvergenceReport& r, const RunStamp& stamp);
/// Long-format rows: config_hash,code_version,experiment,epsilon,metric,value.
std::string report_to_csv(const ConvergenceReport& r, const RunStamp& stamp, bool header = true);

/// Writes <dir>/<experiment>.json, <experiment>.csv and one <experiment>_<metric>.dat per metric.
/// Returns the written paths.
std::vector<std::string> write_report(const ConvergenceReport& r, const RunStamp& stamp, const std::string& dir);

/// Writes text to a file, creating parent directories. Throws Config on I/O failure.
void write_text(const std::string& path, const std::string& text);

}  // namespace qclim
