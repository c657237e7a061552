#include "qclim/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#ifndef QCLIM_PRESET_DIR
#define QCLIM_PRESET_DIR "presets"
#endif

namespace qclim {

namespace fs = std::filesystem;

std::string preset_directory() { return QCLIM_PRESET_DIR; }

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  std::ostringstream o;
  o << std::hex;
  o.width(16);
  o.fill('0');
  o << h;
  return o.str();
}

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& why) {
  fail(ErrorKind::Config, "config key '" + key + "': " + why);
}

Json read_json(const fs::path& p) {
  std::ifstream in(p);
  if (!in) fail(ErrorKind::Config, "cannot read config " + p.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Config, "malformed JSON in " + p.string() + ": " + e.what());
  }
}

fs::path resolve_include(const std::string& name, const fs::path& dir) {
  const std::string file = name.size() > 5 && name.substr(name.size() - 5) == ".json" ? name : name + ".json";
  for (const fs::path& cand : {dir / file, dir / "presets" / file, fs::path(preset_directory()) / file})
    if (fs::exists(cand)) return cand;
  fail(ErrorKind::Config, "preset '" + name + "' not found");
}

Json layered(const fs::path& path, std::set<std::string>& stack) {
  const std::string key = fs::weakly_canonical(path).string();
  if (stack.count(key)) fail(ErrorKind::Config, "include cycle through " + path.string());
  stack.insert(key);
  Json body = read_json(path);
  if (!body.is_object()) fail(ErrorKind::Config, "config root must be an object: " + path.string());
  Json merged = Json::object();
  if (body.contains("include")) {
    const Json inc = body["include"];
    if (!inc.is_array()) bad("include", "must be an array of preset names");
    for (const auto& n : inc) {
      if (!n.is_string()) bad("include", "entries must be strings");
      merged.merge_patch(layered(resolve_include(n.get<std::string>(), path.parent_path()), stack));
    }
    body.erase("include");
  }
  merged.merge_patch(body);
  stack.erase(key);
  return merged;
}

double num(const Json& j, const std::string& key) {
  if (!j.is_number()) bad(key, "must be a number");
  return j.get<double>();
}

int integer(const Json& j, const std::string& key) {
  if (!j.is_number_integer()) bad(key, "must be an integer");
  return j.get<int>();
}

std::string str(const Json& j, const std::string& key) {
  if (!j.is_string()) bad(key, "must be a string");
  return j.get<std::string>();
}

const Json& need(const Json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object() || !obj.contains(key)) bad(path.empty() ? key : path + "." + key, "missing");
  return obj.at(key);
}

void only_keys(const Json& obj, const std::set<std::string>& allowed, const std::string& path) {
  if (!obj.is_object()) bad(path, "must be an object");
  for (const auto& [k, v] : obj.items())
    if (!allowed.count(k)) bad(path.empty() ? k : path + "." + k, "unknown key");
}

std::vector<double> reals(const Json& j, const std::string& key) {
  if (!j.is_array()) bad(key, "must be an array");
  std::vector<double> v;
  for (const auto& x : j) v.push_back(num(x, key));
  return v;
}

std::vector<int> ints(const Json& j, const std::string& key) {
  if (!j.is_array()) bad(key, "must be an array");
  std::vector<int> v;
  for (const auto& x : j) v.push_back(integer(x, key));
  return v;
}

// complex entries as [re, im] pairs or plain reals
std::vector<cplx> complexes(const Json& j, const std::string& key) {
  if (!j.is_array()) bad(key, "must be an array");
  std::vector<cplx> v;
  for (const auto& x : j) {
    if (x.is_number()) {
      v.emplace_back(x.get<double>(), 0.0);
    } else if (x.is_array() && x.size() == 2) {
      v.emplace_back(num(x[0], key), num(x[1], key));
    } else {
      bad(key, "entries must be numbers or [re, im] pairs");
    }
  }
  return v;
}

Json encode(const std::vector<cplx>& v) {
  Json a = Json::array();
  for (const auto& c : v) a.push_back(Json::array({c.real(), c.imag()}));
  return a;
}

template <class T>
Json encode_list(const std::vector<T>& v) {
  Json a = Json::array();
  for (const auto& x : v) a.push_back(x);
  return a;
}

// Mode basis descriptor kept alongside the plan so it can be re-encoded.
struct ModeSpec {
  std::string type = "lattice_1d";
  double box = 16.0;
  std::vector<int> n{1, 2};
  int dimension = 3;
  double spacing = 0.5;
  double extent = 2.0;
  bool polarized = false;
};

ModeBasis decode_modes(const Json& j, ModeSpec& ms) {
  only_keys(j, {"type", "box", "n", "dimension", "spacing", "extent", "polarized"}, "modes");
  ms.type = str(need(j, "type", "modes"), "modes.type");
  if (ms.type == "lattice_1d" || ms.type == "lattice_1d_polarized") {
    ms.box = num(need(j, "box", "modes"), "modes.box");
    ms.n = ints(need(j, "n", "modes"), "modes.n");
    return ms.type == "lattice_1d" ? ModeBasis::lattice_1d(ms.box, ms.n) : ModeBasis::lattice_1d_polarized(ms.box, ms.n);
  }
  if (ms.type == "cubic") {
    ms.dimension = integer(need(j, "dimension", "modes"), "modes.dimension");
    ms.spacing = num(need(j, "spacing", "modes"), "modes.spacing");
    ms.extent = num(need(j, "extent", "modes"), "modes.extent");
    ms.polarized = j.contains("polarized") ? j["polarized"].get<bool>() : false;
    return ModeBasis::cubic(ms.dimension, ms.spacing, ms.extent, ms.polarized);
  }
  bad("modes.type", "unknown mode layout '" + ms.type + "'");
}

Json encode_modes(const ModeSpec& ms) {
  Json j;
  j["type"] = ms.type;
  if (ms.type == "cubic") {
    j["dimension"] = ms.dimension;
    j["spacing"] = ms.spacing;
    j["extent"] = ms.extent;
    j["polarized"] = ms.polarized;
  } else {
    j["box"] = ms.box;
    j["n"] = encode_list(ms.n);
  }
  return j;
}

Dispersion decode_dispersion(const Json& j) {
  only_keys(j, {"preset", "mass"}, "dispersion");
  const std::string p = str(need(j, "preset", "dispersion"), "dispersion.preset");
  if (p == "massless") return Dispersion::massless();
  if (p == "massive") return Dispersion::massive(num(need(j, "mass", "dispersion"), "dispersion.mass"));
  bad("dispersion.preset", "unknown preset '" + p + "'");
}

Json encode_dispersion(const Dispersion& d) {
  Json j;
  j["preset"] = d.kind == DispersionKind::Massless ? "massless" : "massive";
  if (d.kind == DispersionKind::Massive) j["mass"] = d.mass;
  return j;
}

Cutoff decode_chi(const Json& j) {
  only_keys(j, {"preset", "lambda", "width"}, "chi");
  const std::string p = str(need(j, "preset", "chi"), "chi.preset");
  if (p == "one") return Cutoff::one();
  if (p == "omega") return Cutoff::omega_like();
  if (p == "sharp") return Cutoff::sharp(num(need(j, "lambda", "chi"), "chi.lambda"));
  if (p == "smooth") return Cutoff::smooth(num(need(j, "lambda", "chi"), "chi.lambda"), num(need(j, "width", "chi"), "chi.width"));
  bad("chi.preset", "unknown preset '" + p + "'");
}

Json encode_chi(const Cutoff& c) {
  Json j;
  switch (c.kind) {
    case CutoffKind::One:
      j["preset"] = "one";
      break;
    case CutoffKind::Omega:
      j["preset"] = "omega";
      break;
    case CutoffKind::Sharp:
      j["preset"] = "sharp";
      j["lambda"] = c.lambda;
      break;
    case CutoffKind::Smooth:
      j["preset"] = "smooth";
      j["lambda"] = c.lambda;
      j["width"] = c.width;
      break;
  }
  return j;
}

ExternalPotential decode_u(const Json& j) {
  only_keys(j, {"preset", "strength", "softening", "table"}, "U");
  const std::string p = str(need(j, "preset", "U"), "U.preset");
  const double s = j.contains("strength") ? num(j["strength"], "U.strength") : 1.0;
  if (p == "zero") return ExternalPotential::zero();
  if (p == "harmonic") return ExternalPotential::harmonic(s);
  if (p == "coulomb_regularized") return ExternalPotential::coulomb(s, num(need(j, "softening", "U"), "U.softening"));
  if (p == "custom_table") return ExternalPotential::custom(reals(need(j, "table", "U"), "U.table"));
  bad("U.preset", "unknown preset '" + p + "'");
}

Json encode_u(const ExternalPotential& u) {
  Json j;
  switch (u.kind) {
    case ExternalKind::Zero:
      j["preset"] = "zero";
      break;
    case ExternalKind::Harmonic:
      j["preset"] = "harmonic";
      j["strength"] = u.strength;
      break;
    case ExternalKind::CoulombRegularized:
      j["preset"] = "coulomb_regularized";
      j["strength"] = u.strength;
      j["softening"] = u.softening;
      break;
    case ExternalKind::CustomTable:
      j["preset"] = "custom_table";
      j["table"] = encode_list(u.table);
      break;
  }
  return j;
}

FamilySpec decode_family(const Json& j) {
  only_keys(j, {"kind", "z0", "g", "z1", "squeeze_r", "squeeze_phi", "grade"}, "family");
  FamilySpec f;
  try {
    f.kind = family_kind_from_string(str(need(j, "kind", "family"), "family.kind"));
  } catch (const Error& e) {
    bad("family.kind", e.what());
  }
  if (j.contains("z0")) f.z0 = complexes(j["z0"], "family.z0");
  if (j.contains("g")) f.g = complexes(j["g"], "family.g");
  if (j.contains("z1")) f.z1 = complexes(j["z1"], "family.z1");
  if (j.contains("squeeze_r")) f.squeeze_r = reals(j["squeeze_r"], "family.squeeze_r");
  if (j.contains("squeeze_phi")) f.squeeze_phi = reals(j["squeeze_phi"], "family.squeeze_phi");
  if (j.contains("grade")) {
    const std::string g = str(j["grade"], "family.grade");
    if (g == "nelson") f.grade = EnergyGrade::Nelson;
    else if (g == "pauli_fierz") f.grade = EnergyGrade::PauliFierz;
    else bad("family.grade", "unknown grade '" + g + "'");
  }
  return f;
}

Json encode_family(const FamilySpec& f) {
  Json j;
  j["kind"] = to_string(f.kind);
  j["z0"] = encode(f.z0);
  j["g"] = encode(f.g);
  j["z1"] = encode(f.z1);
  j["squeeze_r"] = encode_list(f.squeeze_r);
  j["squeeze_phi"] = encode_list(f.squeeze_phi);
  j["grade"] = f.grade == EnergyGrade::Nelson ? "nelson" : "pauli_fierz";
  return j;
}

const std::set<std::string> kTopKeys{"schema_version", "model",    "seed", "threads", "output",   "dispersion", "chi",     "U",
                                     "family",         "modes",    "grid", "sweep",   "converge", "uv",         "spectrum", "lorentz"};

}  // namespace

Json load_layered(const std::string& path) {
  std::set<std::string> stack;
  return layered(fs::path(path), stack);
}

ExperimentConfig config_from_json(const Json& doc) {
  ExperimentConfig cfg;
  only_keys(doc, kTopKeys, "");
  try {
    if (doc.contains("schema_version") && integer(doc["schema_version"], "schema_version") != kSchemaVersion)
      bad("schema_version", "unsupported version");
    SweepPlan& p = cfg.plan;
    p.model = model_from_string(str(need(doc, "model", ""), "model"));
    const Json& seed = need(doc, "seed", "");
    if (!seed.is_number_unsigned() && !seed.is_number_integer()) bad("seed", "must be a nonnegative integer");
    p.seed = seed.get<std::uint64_t>();
    p.threads = doc.contains("threads") ? integer(doc["threads"], "threads") : 1;
    if (doc.contains("output")) cfg.output_dir = str(doc["output"], "output");

    p.coupling.kind = p.model == Model::Nelson ? CouplingKind::NelsonScalar : CouplingKind::PauliFierzVector;
    p.coupling.dispersion = decode_dispersion(need(doc, "dispersion", ""));
    p.coupling.chi = decode_chi(need(doc, "chi", ""));
    p.u = decode_u(need(doc, "U", ""));

    ModeSpec ms;
    p.basis = decode_modes(need(doc, "modes", ""), ms);
    cfg.modes = encode_modes(ms);

    const Json& g = need(doc, "grid", "");
    only_keys(g, {"d", "n", "length", "boundary"}, "grid");
    p.grid.d = integer(need(g, "d", "grid"), "grid.d");
    p.grid.n = integer(need(g, "n", "grid"), "grid.n");
    p.grid.length = num(need(g, "length", "grid"), "grid.length");
    const std::string bc = g.contains("boundary") ? str(g["boundary"], "grid.boundary") : "periodic";
    if (bc == "periodic") p.grid.boundary = Boundary::Periodic;
    else if (bc == "dirichlet") p.grid.boundary = Boundary::Dirichlet;
    else bad("grid.boundary", "unknown boundary '" + bc + "'");
    p.grid.spinor = p.model == Model::Nelson ? 1 : 2;

    p.family = decode_family(need(doc, "family", ""));

    const Json& s = need(doc, "sweep", "");
    only_keys(s, {"epsilons", "corpus_size", "lambda0", "backend"}, "sweep");
    p.epsilons = reals(need(s, "epsilons", "sweep"), "sweep.epsilons");
    if (s.contains("corpus_size")) p.corpus_size = integer(s["corpus_size"], "sweep.corpus_size");
    if (s.contains("lambda0")) p.lambda0 = num(s["lambda0"], "sweep.lambda0");
    if (s.contains("backend")) {
      const std::string b = str(s["backend"], "sweep.backend");
      if (b == "closed_form") p.backend = Backend::ClosedForm;
      else if (b == "fock_exact") p.backend = Backend::FockExact;
      else bad("sweep.backend", "unknown backend '" + b + "'");
    }

    if (doc.contains("converge")) {
      const Json& c = doc["converge"];
      only_keys(c, {"experiments", "fock_oracle"}, "converge");
      if (c.contains("experiments")) {
        cfg.converge.experiments.clear();
        const std::set<std::string> known{"state", "potential", "gamma", "resolvent_strong", "resolvent_norm"};
        for (const auto& e : c["experiments"]) {
          const std::string name = str(e, "converge.experiments");
          if (!known.count(name)) bad("converge.experiments", "unknown experiment '" + name + "'");
          cfg.converge.experiments.push_back(name);
        }
      }
      if (c.contains("fock_oracle")) cfg.converge.fock_oracle = c["fock_oracle"].get<bool>();
    }
    if (doc.contains("uv")) {
      const Json& u = doc["uv"];
      only_keys(u, {"exponents", "width"}, "uv");
      if (u.contains("exponents")) cfg.uv.exponents = reals(u["exponents"], "uv.exponents");
      if (u.contains("width")) cfg.uv.width = num(u["width"], "uv.width");
    }
    if (doc.contains("spectrum")) {
      const Json& sp = doc["spectrum"];
      only_keys(sp, {"count", "epsilon", "export_triplets"}, "spectrum");
      if (sp.contains("count")) cfg.spectrum.count = integer(sp["count"], "spectrum.count");
      if (sp.contains("epsilon")) cfg.spectrum.epsilon = num(sp["epsilon"], "spectrum.epsilon");
      if (sp.contains("export_triplets")) cfg.spectrum.export_triplets = sp["export_triplets"].get<bool>();
    }
    if (doc.contains("lorentz")) {
      const Json& l = doc["lorentz"];
      only_keys(l, {"corpus_id", "seed", "members", "grid_sizes", "box", "weak_norm_n"}, "lorentz");
      if (l.contains("corpus_id")) cfg.lorentz.corpus.corpus_id = str(l["corpus_id"], "lorentz.corpus_id");
      if (l.contains("seed")) cfg.lorentz.corpus.seed = l["seed"].get<std::uint64_t>();
      if (l.contains("members")) cfg.lorentz.corpus.members = integer(l["members"], "lorentz.members");
      if (l.contains("grid_sizes")) cfg.lorentz.corpus.grid_sizes = ints(l["grid_sizes"], "lorentz.grid_sizes");
      if (l.contains("box")) cfg.lorentz.corpus.box = num(l["box"], "lorentz.box");
      if (l.contains("weak_norm_n")) cfg.lorentz.weak_norm_n = integer(l["weak_norm_n"], "lorentz.weak_norm_n");
    }

    p.validate();
    p.build().check_admissible(p.epsilons.front());
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Config, std::string("config decode: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config) throw;
    fail(ErrorKind::Config, std::string("invalid config: ") + e.what());
  }
  cfg.document = config_to_json(cfg);
  return cfg;
}

Json config_to_json(const ExperimentConfig& cfg) {
  const SweepPlan& p = cfg.plan;
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["model"] = to_string(p.model);
  j["seed"] = p.seed;
  j["threads"] = p.threads;
  j["output"] = cfg.output_dir;
  j["dispersion"] = encode_dispersion(p.coupling.dispersion);
  j["chi"] = encode_chi(p.coupling.chi);
  j["U"] = encode_u(p.u);
  j["family"] = encode_family(p.family);
  j["modes"] = cfg.modes;
  j["grid"] = {{"d", p.grid.d},
               {"n", p.grid.n},
               {"length", p.grid.length},
               {"boundary", p.grid.boundary == Boundary::Periodic ? "periodic" : "dirichlet"}};
  j["sweep"] = {{"epsilons", encode_list(p.epsilons)},
                {"corpus_size", p.corpus_size},
                {"lambda0", p.lambda0},
                {"backend", p.backend == Backend::ClosedForm ? "closed_form" : "fock_exact"}};
  j["converge"] = {{"experiments", encode_list(cfg.converge.experiments)}, {"fock_oracle", cfg.converge.fock_oracle}};
  j["uv"] = {{"exponents", encode_list(cfg.uv.exponents)}, {"width", cfg.uv.width}};
  j["spectrum"] = {{"count", cfg.spectrum.count},
                   {"epsilon", cfg.spectrum.epsilon},
                   {"export_triplets", cfg.spectrum.export_triplets}};
  j["lorentz"] = {{"corpus_id", cfg.lorentz.corpus.corpus_id},
                  {"seed", cfg.lorentz.corpus.seed},
                  {"members", cfg.lorentz.corpus.members},
                  {"grid_sizes", encode_list(cfg.lorentz.corpus.grid_sizes)},
                  {"box", cfg.lorentz.corpus.box},
                  {"weak_norm_n", cfg.lorentz.weak_norm_n}};
  return j;
}

ExperimentConfig load_config(const std::string& path) { return config_from_json(load_layered(path)); }

std::string config_hash(const ExperimentConfig& cfg) {
  Json j = cfg.document;
  j.erase("output");
  j.erase("threads");
  return fnv1a_hex(j.dump());
}

}  // namespace qclim
