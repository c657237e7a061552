#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <set>
#include <sstream>

#include "qclim/config.hpp"
#include "qclim/lorentz.hpp"
#include "qclim/report.hpp"
#include "qclim/solvers.hpp"

using namespace qclim;
namespace fs = std::filesystem;

namespace {

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::Config:
    case ErrorKind::Domain:
      return 2;
    case ErrorKind::Assumption:
      return 3;
    case ErrorKind::Solver:
      return 4;
    case ErrorKind::Verdict:
      return 5;
  }
  return 1;
}

struct Run {
  ExperimentConfig cfg;
  RunStamp stamp;
  std::string out;
  bool strict = false;
};

std::string audit_csv(const std::vector<AuditItem>& items, const RunStamp& st) {
  std::ostringstream o;
  o << "config_hash,code_version,functional,value,extended,passed,detail\n";
  for (const auto& a : items)
    o << st.config_hash << ',' << st.code_version << ',' << a.name << ',' << format_double(a.value) << ','
      << format_double(a.extended) << ',' << (a.passed ? "true" : "false") << ",\"" << a.detail << "\"\n";
  return o.str();
}

std::vector<std::string> failed_functionals(const std::vector<AuditItem>& items) {
  std::vector<std::string> bad;
  for (const auto& a : items)
    if (!a.passed) bad.push_back(a.name);
  return bad;
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : ", ") + x;
  return s;
}

// --strict: any failed audit item aborts the command before work starts.
void strict_gate(const Run& r) {
  if (!r.strict) return;
  const auto bad = failed_functionals(assumption_audit(r.cfg.plan));
  if (!bad.empty()) fail(ErrorKind::Assumption, "assumption audit failed: " + join(bad));
}

int finish(const ConvergenceReport& rep, const Run& r) {
  for (const auto& p : write_report(rep, r.stamp, r.out)) std::cout << "wrote " << p << "\n";
  for (const auto& v : rep.verdicts) std::cout << (v.passed ? "PASS " : "FAIL ") << v.name << "  " << v.detail << "\n";
  std::cout << "verdict " << (rep.passed() ? "PASS" : "FAIL") << "\n";
  return rep.passed() ? 0 : 5;
}

int cmd_check(const Run& r) {
  const auto items = assumption_audit(r.cfg.plan);
  write_text((fs::path(r.out) / "assumptions.csv").string(), audit_csv(items, r.stamp));
  for (const auto& a : items)
    std::cout << (a.passed ? "ok   " : "FAIL ") << a.name << " value=" << format_double(a.value)
              << " extended=" << format_double(a.extended) << "  " << a.detail << "\n";
  const auto bad = failed_functionals(items);
  if (!bad.empty()) {
    std::cerr << "assumption audit failed: " << join(bad) << "\n";
    return 3;
  }
  return 0;
}

int cmd_lorentz(const Run& r) {
  strict_gate(r);
  const auto& ls = r.cfg.lorentz;
  const double weak = weak_norm_inverse_k(ls.weak_norm_n);
  const double exact = weak_norm_inverse_k_exact();
  const auto rows = run_corpus(ls.corpus);
  std::ostringstream o;
  o << "config_hash,code_version,corpus_id,lemma_id,grid_size,ratio_max,ratio_p95,reference\n";
  o << r.stamp.config_hash << ',' << r.stamp.code_version << ",analytic,weak_norm_inverse_k," << ls.weak_norm_n << ','
    << format_double(weak) << ',' << format_double(weak) << ',' << format_double(exact) << '\n';
  std::set<std::string> lemmas;
  for (const auto& row : rows) {
    lemmas.insert(row.lemma_id);
    o << r.stamp.config_hash << ',' << r.stamp.code_version << ',' << row.corpus_id << ',' << row.lemma_id << ','
      << row.grid_size << ',' << format_double(row.ratio_max) << ',' << format_double(row.ratio_p95) << ",\n";
  }
  const std::string path = (fs::path(r.out) / "lorentz.csv").string();
  write_text(path, o.str());
  std::cout << "wrote " << path << "\n";
  bool ok = std::abs(weak / exact - 1.0) < 0.05;
  std::cout << (ok ? "PASS " : "FAIL ") << "weak_norm_inverse_k " << format_double(weak) << " vs "
            << format_double(exact) << "\n";
  for (const auto& l : lemmas) {
    const double spread = corpus_max_spread(rows, l);
    const bool pass = std::isfinite(spread) && spread < 0.2;
    ok = ok && pass;
    std::cout << (pass ? "PASS " : "FAIL ") << l << " spread=" << format_double(spread) << "\n";
  }
  return ok ? 0 : 5;
}

int cmd_potentials(const Run& r) {
  strict_gate(r);
  const SweepPlan& plan = r.cfg.plan;
  const FieldStateFamily fam = plan.build();
  const std::string coupling = plan.coupling.dispersion.name() + "/" + plan.coupling.chi.name();
  const auto dump = [&](const EffectiveSet& s, const std::string& tag) {
    const fs::path dir = fs::path(r.out) / "potentials";
    fs::create_directories(dir);
    if (plan.model == Model::Nelson) {
      export_potential((dir / ("V_" + tag)).string(), s.v, plan.grid, coupling, r.stamp.config_hash);
    } else {
      export_potential((dir / ("A_" + tag)).string(), s.a, plan.grid, coupling, r.stamp.config_hash);
      export_potential((dir / ("W_" + tag)).string(), s.w, plan.grid, coupling, r.stamp.config_hash);
      export_potential((dir / ("B_" + tag)).string(), s.b, plan.grid, coupling, r.stamp.config_hash);
    }
    std::cout << "exported " << tag << "\n";
  };
  for (double eps : plan.epsilons) {
    std::ostringstream tag;
    tag << "eps_" << eps;  // short form for file names; the sidecar keeps the exact value
    dump(effective_set(plan, fam, eps), tag.str());
  }
  dump(effective_set(plan, fam, std::nullopt), "limit");
  return 0;
}

int cmd_spectrum(const Run& r) {
  strict_gate(r);
  const SweepPlan& plan = r.cfg.plan;
  const auto& sp = r.cfg.spectrum;
  const FieldStateFamily fam = plan.build();
  const std::optional<double> eps = sp.epsilon > 0.0 ? std::optional<double>(sp.epsilon) : std::nullopt;
  const QuadraticForm q = assemble(plan, effective_set(plan, fam, eps));
  SolverOptions so;
  so.seed = plan.seed;
  const EigenResult e = lowest_eigenpairs(q, sp.count, so);
  std::ostringstream o;
  o << "config_hash,code_version,epsilon,index,eigenvalue,residual,method\n";
  for (std::size_t i = 0; i < e.values.size(); ++i)
    o << r.stamp.config_hash << ',' << r.stamp.code_version << ',' << format_double(sp.epsilon) << ',' << i << ','
      << format_double(e.values[i]) << ',' << format_double(e.residuals[i]) << ','
      << e.method << '\n';
  const std::string path = (fs::path(r.out) / "spectrum.csv").string();
  write_text(path, o.str());
  std::cout << "wrote " << path << "\n";
  if (sp.export_triplets) {
    const std::string tp = (fs::path(r.out) / "form.triplets").string();
    write_text(tp, "# config_hash " + r.stamp.config_hash + "\n" + q.triplets(1e-15));
    std::cout << "wrote " << tp << "\n";
  }
  for (std::size_t i = 0; i < e.values.size(); ++i) std::cout << "E" << i << " = " << format_double(e.values[i]) << "\n";
  return 0;
}

int cmd_converge(const Run& r) {
  strict_gate(r);
  const SweepPlan& plan = r.cfg.plan;
  ConvergenceReport all;
  all.experiment = "converge";
  for (const auto& name : r.cfg.converge.experiments) {
    ConvergenceReport rep;
    if (name == "state") {
      rep = state_convergence(plan);
    } else if (name == "potential") {
      PotentialOptions po;
      po.fock_oracle = r.cfg.converge.fock_oracle;
      rep = potential_convergence(plan, po);
    } else if (name == "gamma") {
      rep = gamma_convergence_probe(plan);
    } else if (name == "resolvent_strong" || name == "resolvent_norm") {
      ResolventOptions ro;
      ro.mode = name == "resolvent_strong" ? ResolventMode::Strong : ResolventMode::Norm;
      ro.solver.seed = plan.seed;
      rep = resolvent_convergence(plan, ro);
    }
    std::cout << name << ": " << (rep.passed() ? "PASS" : "FAIL") << "\n";
    all.absorb(rep);
  }
  return finish(all, r);
}

int cmd_uv(const Run& r) {
  strict_gate(r);
  ConvergenceReport rep = uv_commutation_experiment(r.cfg.plan, r.cfg.uv);
  return finish(rep, r);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qcl: quasi-classical limit experiments"};
  app.require_subcommand(1);
  std::string config_path, out;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  bool strict = false;
  app.add_option("--config", config_path, "experiment config (JSON)")->required();
  app.add_option("--out", out, "output directory (overrides the config)");
  app.add_option("--seed", seed, "override the config seed");
  app.add_option("--threads", threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--strict", strict, "treat assumption audit failures as fatal");
  const std::vector<std::string> commands{"check-assumptions", "lorentz-suite", "potentials",
                                          "spectrum",          "converge",      "uv-sweep"};
  for (const auto& c : commands) app.add_subcommand(c)->fallthrough();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  try {
    Json doc = load_layered(config_path);
    if (seed) doc["seed"] = *seed;
    if (threads) doc["threads"] = *threads;
    if (!out.empty()) doc["output"] = out;
    Run r;
    r.cfg = config_from_json(doc);
    r.stamp.config_hash = config_hash(r.cfg);
    r.out = r.cfg.output_dir;
    r.strict = strict;
    fs::create_directories(r.out);
    write_text((fs::path(r.out) / "config.resolved.json").string(), r.cfg.document.dump(2) + "\n");
    std::cout << "config_hash " << r.stamp.config_hash << " code_version " << r.stamp.code_version << "\n";
    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "check-assumptions") return cmd_check(r);
    if (cmd == "lorentz-suite") return cmd_lorentz(r);
    if (cmd == "potentials") return cmd_potentials(r);
    if (cmd == "spectrum") return cmd_spectrum(r);
    if (cmd == "converge") return cmd_converge(r);
    return cmd_uv(r);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
