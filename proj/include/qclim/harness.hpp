#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "qclim/families.hpp"
#include "qclim/forms.hpp"
#include "qclim/potentials.hpp"
#include "qclim/solvers.hpp"

namespace qclim {

enum class Model { Nelson, PauliFierz };
std::string to_string(Model m);
Model model_from_string(const std::string& s);

struct SweepPlan {
  Model model = Model::Nelson;
  std::vector<double> epsilons{0.4, 0.2, 0.1, 0.05};
  FamilySpec family;
  ModeBasis basis;
  CouplingSpec coupling;
  ParticleGrid grid;
  ExternalPotential u;
  std::uint64_t seed = 1;
  int corpus_size = 4;
  double lambda0 = 0.0;
  Backend backend = Backend::ClosedForm;
  int threads = 1;

  /// Strictly decreasing positive epsilons; model, coupling kind and spinor size consistent.
  void validate() const;
  FieldStateFamily build() const;
};

struct MetricRow {
  double epsilon = 0.0;
  std::string metric;
  double value = 0.0;
};

/// Least-squares slope of log(metric) against log(eps) over the last `window` points.
struct OrderFit {
  double order = 0.0;
  double stderr_order = 0.0;
  double intercept = 0.0;
  int points = 0;
  bool valid = false;  // needs at least 4 points above the floor
};

struct Verdict {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ConvergenceReport {
  std::string experiment;
  std::vector<MetricRow> rows;
  std::map<std::string, OrderFit> fits;
  std::vector<Verdict> verdicts;

  void add(double eps, const std::string& metric, double value);
  std::vector<std::string> metrics() const;
  std::vector<double> series(const std::string& metric) const;
  std::vector<double> epsilons(const std::string& metric) const;
  bool passed() const;
  /// Appends another report's rows, fits and verdicts under a name prefix.
  void absorb(const ConvergenceReport& other);
};

constexpr double kMetricFloor = 1e-14;
constexpr int kFitWindow = 4;

OrderFit fit_order(const std::vector<double>& eps, const std::vector<double>& values, int window = kFitWindow,
                   double floor = kMetricFloor);
/// Two-point moving average is nonincreasing up to slack * max + floor.
bool monotone_nonincreasing(const std::vector<double>& values, double slack = 1e-9, double floor = 1e-12);

/// Runs f(0..n-1) on up to `threads` workers; results land by index so the output is order-independent.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& f);

/// Seeded smooth test vectors (Gaussian bumps times a phase) normalized in the grid norm.
std::vector<VectorXc> test_corpus(const ParticleGrid& grid, std::uint64_t seed, int count);

/// Effective objects at eps (from the family) or at the limit measure (nullopt).
struct EffectiveSet {
  EffectivePotential v;     // Nelson
  EffectivePotential a, w, b;  // Pauli-Fierz
};
EffectiveSet effective_set(const SweepPlan& plan, const FieldStateFamily& family, std::optional<double> eps);
/// Same objects computed from moments contracted on the truncated Fock state.
EffectiveSet effective_set_fock(const SweepPlan& plan, const FieldStateFamily& family, double eps);
QuadraticForm assemble(const SweepPlan& plan, const EffectiveSet& s);

struct StateOptions {
  int probes = 6;
  double eta_norm = 1.0;  // probe directions scaled to ||eta|| <= eta_norm
};
ConvergenceReport state_convergence(const SweepPlan& plan, const StateOptions& opt = {});

struct PotentialOptions {
  bool fock_oracle = false;        // also contract on truncated Fock states, report the gap
  bool weak_operator = true;       // ||(V_eps - V_mu)|P|^{-1/2} psi|| on the corpus (periodic grids)
  double regularity_cap = 1e6;     // test pairs with a larger Lorentz quasi-norm are rejected
};
ConvergenceReport potential_convergence(const SweepPlan& plan, const PotentialOptions& opt = {});

struct GammaOptions {
  double tol = 1e-9;
  double lambda = 1.0;   // shift used for the liminf energies
  double lambda0 = 1.0;  // resolvent weight of the uniform-bound audit
};
ConvergenceReport gamma_convergence_probe(const SweepPlan& plan, const GammaOptions& opt = {});

enum class ResolventMode { Strong, Norm };
struct ResolventOptions {
  ResolventMode mode = ResolventMode::Strong;
  int power_iterations = 50;
  bool second_lambda = true;  // repeat the strong metric at lambda + 2 (lambda-independence)
  SolverOptions solver;
};
ConvergenceReport resolvent_convergence(const SweepPlan& plan, const ResolventOptions& opt = {});

/// Self-test: H_n = -Delta + U + V + bump / n against H = -Delta + U + V; strong metric ~ 1/n.
ConvergenceReport toy_resolvent_selftest(const ParticleGrid& grid, const ExternalPotential& u, const Multiplier& v,
                                         const Multiplier& bump, const std::vector<int>& ns, std::uint64_t seed = 1);

struct UvOptions {
  std::vector<double> exponents{0.25, 0.5};  // Lambda(eps) = eps^{-s}
  double width = 0.0;                        // 0: sharp cutoff, otherwise smooth with this width
};
/// Nelson: Richardson-extrapolated limits of the pairing <psi, V_eps^{Lambda(eps)} phi> per schedule,
/// compared pairwise against twice the larger last-step change. Pauli-Fierz: wick constants per schedule,
/// expected bounded iff s (d - 1) <= 1.
ConvergenceReport uv_commutation_experiment(const SweepPlan& plan, const UvOptions& opt = {});

/// Wick constant over sharp cutoffs at fixed eps; reports the log-log slope in Lambda.
struct WickScaling {
  std::vector<double> lambdas;
  std::vector<double> values;
  double slope = 0.0;
};
WickScaling wick_cutoff_scaling(const Dispersion& disp, double eps, const std::vector<double>& lambdas, double spacing);

/// Assumption audit rows: A_omega, A_chi, A'_chi (coupling), A_U (KLMN of U_minus), A_Psi (uniform energy).
std::vector<AuditItem> assumption_audit(const SweepPlan& plan);

}  // namespace qclim
