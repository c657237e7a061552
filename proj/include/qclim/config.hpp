#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "qclim/harness.hpp"
#include "qclim/lorentz.hpp"

namespace qclim {

inline constexpr const char* kCodeVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

using Json = nlohmann::ordered_json;

struct ConvergeSettings {
  std::vector<std::string> experiments{"state", "potential", "gamma", "resolvent_strong"};
  bool fock_oracle = false;
};

struct SpectrumSettings {
  int count = 6;
  double epsilon = 0.0;  // 0 selects the limit measure
  bool export_triplets = false;
};

struct LorentzSettings {
  CorpusSpec corpus;
  int weak_norm_n = 64;
};

/// Fully resolved experiment configuration. `document` is the canonical JSON form; the typed fields
/// are decoded from it and re-encode to the same bytes.
struct ExperimentConfig {
  Json document;
  SweepPlan plan;
  Json modes;  // mode layout descriptor, decoded into plan.basis
  std::string output_dir = "out";
  ConvergeSettings converge;
  UvOptions uv;
  SpectrumSettings spectrum;
  LorentzSettings lorentz;
};

/// Reads a config file, resolving "include" presets (config directory, its presets/ folder, then the
/// installed preset directory) and layering them with JSON merge-patch, later layers winning.
Json load_layered(const std::string& path);
/// Decodes and validates a merged document. Throws Config errors naming the offending key.
ExperimentConfig config_from_json(const Json& doc);
/// Canonical encoding of the decoded fields.
Json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::string& path);

/// FNV-1a 64 of the canonical document without run-only keys (output, threads), as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);
std::string fnv1a_hex(const std::string& bytes);

/// Directory holding the bundled presets.
std::string preset_directory();

}  // namespace qclim
