#include "qclim/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace qclim {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json report_to_json(const ConvergenceReport& r, const RunStamp& stamp) {
  Json j;
  j["schema_version"] = stamp.schema_version;
  j["experiment"] = r.experiment;
  j["config_hash"] = stamp.config_hash;
  j["code_version"] = stamp.code_version;
  Json rows = Json::array();
  for (const auto& row : r.rows) rows.push_back({{"epsilon", row.epsilon}, {"metric", row.metric}, {"value", row.value}});
  j["rows"] = rows;
  Json fits = Json::object();
  for (const auto& [name, f] : r.fits)
    fits[name] = {{"order", f.order}, {"stderr", f.stderr_order}, {"intercept", f.intercept}, {"points", f.points}, {"valid", f.valid}};
  j["fits"] = fits;
  Json verdicts = Json::array();
  for (const auto& v : r.verdicts) verdicts.push_back({{"name", v.name}, {"passed", v.passed}, {"detail", v.detail}});
  j["verdicts"] = verdicts;
  j["passed"] = r.passed();
  return j;
}

std::string report_to_csv(const ConvergenceReport& r, const RunStamp& stamp, bool header) {
  std::ostringstream o;
  if (header) o << "config_hash,code_version,experiment,epsilon,metric,value\n";
  for (const auto& row : r.rows)
    o << stamp.config_hash << ',' << stamp.code_version << ',' << r.experiment << ',' << format_double(row.epsilon) << ','
      << row.metric << ',' << format_double(row.value) << '\n';
  return o.str();
}

void write_text(const std::string& path, const std::string& text) {
  const fs::path p(path);
  std::error_code ec;
  if (p.has_parent_path()) fs::create_directories(p.parent_path(), ec);
  std::ofstream out(p, std::ios::binary);
  if (!out) fail(ErrorKind::Config, "cannot write " + path);
  out << text;
  if (!out) fail(ErrorKind::Config, "write failed for " + path);
}

namespace {

std::string file_safe(std::string s) {
  for (char& c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' && c != '.') c = '_';
  return s;
}

}  // namespace

std::vector<std::string> write_report(const ConvergenceReport& r, const RunStamp& stamp, const std::string& dir) {
  std::vector<std::string> paths;
  const std::string base = (fs::path(dir) / file_safe(r.experiment)).string();
  write_text(base + ".json", report_to_json(r, stamp).dump(2) + "\n");
  paths.push_back(base + ".json");
  write_text(base + ".csv", report_to_csv(r, stamp));
  paths.push_back(base + ".csv");
  for (const auto& m : r.metrics()) {
    std::ostringstream o;
    o << "# config_hash " << stamp.config_hash << " code_version " << stamp.code_version << "\n# epsilon " << m << "\n";
    const auto e = r.epsilons(m);
    const auto v = r.series(m);
    for (std::size_t i = 0; i < e.size(); ++i) o << format_double(e[i]) << ' ' << format_double(v[i]) << '\n';
    const std::string path = base + "_" + file_safe(m) + ".dat";
    write_text(path, o.str());
    paths.push_back(path);
  }
  return paths;
}

}  // namespace qclim
