#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qclim/config.hpp"
#include "qclim/report.hpp"

using namespace qclim;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("qclim_config_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

void put(const fs::path& p, const std::string& text) {
  std::ofstream(p) << text;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

ErrorKind kind_of(const Json& doc) {
  try {
    config_from_json(doc);
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::Solver;  // sentinel: no error
}

int qcl(const std::string& args) {
  const std::string cmd = std::string(QCLIM_QCL) + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string preset(const std::string& name) { return preset_directory() + "/" + name + ".json"; }

}  // namespace

TEST_CASE("every bundled preset round-trips byte for byte") {
  for (const char* name : {"coherent_nelson", "excited_nelson_harmonic", "pf_coherent", "pf_excited", "uv_nelson",
                           "lorentz_default"}) {
    CAPTURE(name);
    const ExperimentConfig a = load_config(preset(name));
    const std::string once = config_to_json(a).dump();
    const ExperimentConfig b = config_from_json(Json::parse(once));
    CHECK(config_to_json(b).dump() == once);
    CHECK(config_hash(a) == config_hash(b));
  }
}

TEST_CASE("missing seed and unknown keys are configuration errors") {
  Json doc = load_layered(preset("coherent_nelson"));
  CHECK_NOTHROW(config_from_json(doc));
  Json no_seed = doc;
  no_seed.erase("seed");
  CHECK(kind_of(no_seed) == ErrorKind::Config);
  Json extra = doc;
  extra["grdi"] = Json::object();
  CHECK(kind_of(extra) == ErrorKind::Config);
  Json nested = doc;
  nested["grid"]["spacing"] = 0.1;
  CHECK(kind_of(nested) == ErrorKind::Config);
  Json bad_eps = doc;
  bad_eps["sweep"]["epsilons"] = Json::array({0.1, 0.2, 0.05, 0.01});
  CHECK(kind_of(bad_eps) == ErrorKind::Config);
}

TEST_CASE("includes layer with later keys winning and cycles are rejected") {
  const fs::path d = scratch("layers");
  put(d / "base.json", R"({"include": ["coherent_nelson"], "seed": 7, "grid": {"n": 64}})");
  put(d / "top.json", R"({"include": ["base"], "seed": 9})");
  const ExperimentConfig c = load_config((d / "top.json").string());
  CHECK(c.plan.seed == 9);
  CHECK(c.plan.grid.n == 64);
  CHECK(c.plan.grid.length == 10.0);
  put(d / "a.json", R"({"include": ["b"]})");
  put(d / "b.json", R"({"include": ["a"]})");
  CHECK_THROWS_AS(load_layered((d / "a.json").string()), Error);
  put(d / "missing.json", R"({"include": ["no_such_preset"]})");
  CHECK_THROWS_AS(load_layered((d / "missing.json").string()), Error);
}

TEST_CASE("the hash ignores output and threads but not physics") {
  Json doc = load_layered(preset("coherent_nelson"));
  const std::string h = config_hash(config_from_json(doc));
  CHECK(h.size() == 16);
  Json run = doc;
  run["output"] = "elsewhere";
  run["threads"] = 8;
  CHECK(config_hash(config_from_json(run)) == h);
  Json phys = doc;
  phys["seed"] = 2;
  CHECK(config_hash(config_from_json(phys)) != h);
  // FNV-1a 64 reference vectors
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("report formatting keeps full double precision") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(std::stod(format_double(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("CLI exit codes") {
  const fs::path d = scratch("cli");
  CHECK(qcl("--config " + preset("coherent_nelson") + " --out " + (d / "ok").string() + " check-assumptions") == 0);
  CHECK(fs::exists(d / "ok" / "config.resolved.json"));
  CHECK(fs::exists(d / "ok" / "assumptions.csv"));
  CHECK(qcl("--config " + preset("chi_omega_violation") + " --out " + (d / "chi").string() + " check-assumptions") == 3);
  CHECK(slurp(d / "chi" / "assumptions.csv").find("A_chi") != std::string::npos);
  put(d / "bad.json", R"({"include": ["coherent_nelson"], "colour": "red"})");
  CHECK(qcl("--config " + (d / "bad.json").string() + " --out " + (d / "bad").string() + " check-assumptions") == 2);
  CHECK(qcl("--config " + preset("coherent_nelson") + " --out " + (d / "conv").string() + " converge") == 0);
  CHECK(fs::exists(d / "conv" / "converge.json"));
}

TEST_CASE("lorentz-suite output carries the analytic weak-norm row") {
  const fs::path d = scratch("lorentz");
  const fs::path cfg = d / "small.json";
  put(cfg, R"({"include": ["lorentz_default"], "lorentz": {"members": 3, "grid_sizes": [16, 20, 24], "weak_norm_n": 32}})");
  CHECK(qcl("--config " + cfg.string() + " --out " + (d / "out").string() + " lorentz-suite") == 0);
  const std::string csv = slurp(d / "out" / "lorentz.csv");
  CHECK(csv.rfind("config_hash,code_version,corpus_id,lemma_id,grid_size,ratio_max,ratio_p95,reference", 0) == 0);
  CHECK(csv.find("analytic,weak_norm_inverse_k") != std::string::npos);
}
