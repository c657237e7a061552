#include <doctest.h>

#include "oracles.hpp"
#include "qclim/harness.hpp"

using namespace qclim;

namespace {

SweepPlan nelson_plan(FamilyKind kind) {
  SweepPlan p;
  p.model = Model::Nelson;
  p.basis = ModeBasis::lattice_1d(10.0, {1, 2});
  p.grid = ParticleGrid{1, 32, 10.0, Boundary::Periodic, 1};
  p.family.kind = kind;
  p.family.z0 = {{0.6, 0.2}, {-0.3, 0.4}};
  p.family.g = {{0.15, 0.0}, {0.0, 0.15}};
  p.family.z1 = {{-0.5, 0.1}, {0.2, -0.2}};
  p.family.grade = EnergyGrade::Nelson;
  return p;
}

SweepPlan pf_plan(FamilyKind kind) {
  SweepPlan p;
  p.model = Model::PauliFierz;
  p.coupling.kind = CouplingKind::PauliFierzVector;
  p.basis = ModeBasis::lattice_1d_polarized(8.0, {1, 2});
  p.grid = ParticleGrid{1, 32, 8.0, Boundary::Periodic, 2};
  p.family.kind = kind;
  p.family.z0 = {{0.4, 0.1}, {0.2, -0.3}, {-0.2, 0.2}, {0.1, 0.1}};
  p.family.g = {{0.3, 0.0}, {0.0, 0.3}, {0.2, 0.1}, {0.1, -0.2}};
  return p;
}

const Verdict* find(const ConvergenceReport& r, const std::string& prefix) {
  for (const auto& v : r.verdicts)
    if (v.name.rfind(prefix, 0) == 0) return &v;
  return nullptr;
}

}  // namespace

TEST_CASE("order fit recovers an exact power law and refuses short series") {
  const std::vector<double> e{0.4, 0.2, 0.1, 0.05};
  std::vector<double> v;
  for (double x : e) v.push_back(3.0 * x * x);
  const OrderFit f = fit_order(e, v);
  CHECK(f.valid);
  CHECK(std::abs(f.order - 2.0) < 1e-12);
  CHECK(std::abs(std::exp(f.intercept) - 3.0) < 1e-12);
  CHECK_FALSE(fit_order({0.2, 0.1, 0.05}, {1.0, 0.5, 0.25}).valid);
  CHECK_FALSE(fit_order(e, {1.0, 0.5, 0.0, 0.0}).valid);
}

TEST_CASE("monotone trend check uses the two-point moving average") {
  CHECK(monotone_nonincreasing({4.0, 2.0, 1.0, 0.5}));
  CHECK(monotone_nonincreasing({4.0, 2.0, 2.1, 0.5}));  // smoothed: 3, 2.05, 1.3
  CHECK_FALSE(monotone_nonincreasing({1.0, 1.0, 3.0, 3.0}));
}

TEST_CASE("sweep validation") {
  SweepPlan p = nelson_plan(FamilyKind::Coherent);
  p.epsilons = {0.1, 0.2};
  CHECK_THROWS_AS(p.validate(), Error);
  p = nelson_plan(FamilyKind::Coherent);
  p.grid.spinor = 2;
  CHECK_THROWS_AS(p.validate(), Error);
  p = pf_plan(FamilyKind::Coherent);
  p.basis = ModeBasis::lattice_1d(8.0, {1, 2});
  CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("coherent Nelson sweep: every metric exact") {
  const SweepPlan p = nelson_plan(FamilyKind::Coherent);
  const auto pot = potential_convergence(p);
  for (double v : pot.series("pair_V")) CHECK(v <= 1e-9);
  CHECK(pot.passed());
  const auto gam = gamma_convergence_probe(p);
  for (double v : gam.series("limsup_gap")) CHECK(v <= 1e-9);
  CHECK(gam.passed());
  const auto res = resolvent_convergence(p);
  for (double v : res.series("strong_resolvent")) CHECK(v <= 1e-9);
  CHECK(res.passed());
}

TEST_CASE("coherent state convergence: Weyl error is (1 - e^{-eps |eta|^2/2}) |mu-hat|") {
  const SweepPlan p = nelson_plan(FamilyKind::Coherent);
  StateOptions o;
  o.probes = 3;
  const auto r = state_convergence(p, o);
  const auto w = r.series("weyl");
  REQUIRE(w.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    const double eps = p.epsilons[i];
    // probes are scaled to ||eta|| = eta_norm, |mu-hat| = 1 for a Dirac measure
    CHECK(std::abs(w[i] - (1.0 - std::exp(-0.5 * eps))) < 1e-10);
  }
  CHECK(std::abs(r.fits.at("weyl").order - 1.0) < 0.1);
}

TEST_CASE("excited_coherent pairings are O(eps) and match the Fock oracle") {
  const SweepPlan p = nelson_plan(FamilyKind::ExcitedCoherent);
  const auto r = potential_convergence(p);
  CHECK(r.fits.at("pair_V").order >= 0.9);
  const FieldStateFamily fam = p.build();
  const auto corpus = test_corpus(p.grid, p.seed, p.corpus_size);
  const auto vals = r.series("pair_V");
  for (std::size_t i = 0; i < p.epsilons.size(); ++i) {
    const FockState st = fam.fock_state(p.epsilons[i]).state;
    std::vector<double> d(p.grid.points());
    for (std::size_t j = 0; j < d.size(); ++j) {
      const Vec3 x = p.grid.point(j);
      d[j] = oracle::contract(st, p.basis, p.coupling, x).v - oracle::classical(p.family.z0, p.basis, p.coupling, x).v;
    }
    double m = 0.0;
    for (std::size_t a = 0; a < corpus.size(); ++a)
      m = std::max(m, std::abs(oracle::pairing(d, corpus[a], corpus[(a + 1) % corpus.size()], p.grid)));
    CHECK(std::abs(vals[i] - m) < 1e-8);
  }
}

TEST_CASE("two-branch superposition converges to the average of the atoms") {
  const SweepPlan p = nelson_plan(FamilyKind::Cat);
  const FieldStateFamily fam = p.build();
  const auto mu = fam.declared_limit();
  REQUIRE(mu);
  REQUIRE(mu->atoms.size() == 2);
  const auto v = v_eps(fam, 0.01, p.coupling);
  const auto v0 = v_mu(WignerMeasure::dirac(p.family.z0), p.basis, p.coupling);
  const auto v1 = v_mu(WignerMeasure::dirac(p.family.z1), p.basis, p.coupling);
  for (double x : {-2.0, 0.0, 1.5}) {
    const double got = v.series.eval({x, 0.0, 0.0})[0].real();
    const double a = v0.series.eval({x, 0.0, 0.0})[0].real(), b = v1.series.eval({x, 0.0, 0.0})[0].real();
    CHECK(std::abs(got - 0.5 * (a + b)) < 1e-3);
  }
  const auto r = potential_convergence(p);
  CHECK(r.passed());
}

TEST_CASE("oscillatory tails raise the energy when V = 0") {
  SweepPlan p = nelson_plan(FamilyKind::Vacuum);
  const auto r = gamma_convergence_probe(p);
  for (double m : r.series("liminf_margin_modulated")) CHECK(m > 0.0);
  CHECK(find(r, "liminf")->passed);
}

TEST_CASE("Pauli-Fierz excited sweep certifies A, W, B and the 3/8 audit") {
  const SweepPlan p = pf_plan(FamilyKind::ExcitedCoherent);
  const auto r = potential_convergence(p);
  for (const char* m : {"pair_A", "pair_W", "pair_B"}) CHECK(r.fits.at(m).order >= 0.9);
  const auto g = gamma_convergence_probe(p);
  CHECK(g.passed());
  CHECK(find(g, "uniform bound")->detail.find("0.375") != std::string::npos);
}

TEST_CASE("toy resolvent self-test decays like 1/n") {
  const ParticleGrid g{1, 64, 10.0, Boundary::Periodic, 1};
  const Multiplier v(g, [](const Vec3& x) { return cplx(-1.0 / std::cosh(x[0])); });
  const Multiplier bump(g, [](const Vec3& x) { return cplx(std::exp(-x[0] * x[0])); });
  const auto r = toy_resolvent_selftest(g, ExternalPotential::harmonic(0.5), v, bump, {2, 4, 8, 16});
  CHECK(std::abs(r.fits.at("strong_resolvent").order - 1.0) < 0.1);
  CHECK(r.passed());
}

TEST_CASE("parallel sweeps reproduce serial numbers bit for bit") {
  SweepPlan p = nelson_plan(FamilyKind::ExcitedCoherent);
  const auto serial = gamma_convergence_probe(p);
  p.threads = 4;
  const auto par = gamma_convergence_probe(p);
  REQUIRE(serial.rows.size() == par.rows.size());
  for (std::size_t i = 0; i < serial.rows.size(); ++i) CHECK(serial.rows[i].value == par.rows[i].value);
}

TEST_CASE("UV schedules: Nelson limits agree and PF Wick constants track eps Lambda^2") {
  SweepPlan p = nelson_plan(FamilyKind::Coherent);
  p.basis = ModeBasis::lattice_1d(10.0, {1, 2, 3, 4, 5, 6, 7, 8});
  p.grid.n = 64;
  p.family.z0 = {{0.8, 0.0}, {0.4, 0.2}, {0.2, 0.0}, {0.1, 0.1}, {0.05, 0.0}, {0.025, 0.0}, {0.0125, 0.0}, {0.00625, 0.0}};
  p.family.g.assign(p.basis.size(), cplx(0.0));
  p.family.z1.clear();
  const auto r = uv_commutation_experiment(p);
  CHECK(r.passed());
  UvOptions o;
  o.exponents = {2.0};
  CHECK_THROWS_AS(uv_commutation_experiment(p, o), Error);

  // 1D: eps log Lambda, bounded under both schedules; 3D: eps Lambda^2, bounded iff s <= 1/2
  SweepPlan q = pf_plan(FamilyKind::Vacuum);
  q.basis = ModeBasis::lattice_1d_polarized(8.0, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12, 13, 14, 15, 16, 17, 18, 19, 20,
                                                  21, 22, 23, 24, 25, 26});
  q.family.z0.assign(q.basis.size(), cplx(0.0));
  q.family.g.assign(q.basis.size(), cplx(0.0));
  q.grid.n = 128;
  UvOptions w;
  w.exponents = {0.5, 1.0};
  CHECK(uv_commutation_experiment(q, w).passed());
  q.basis = ModeBasis::cubic(3, 0.5, 20.0, true);
  q.family.z0.assign(q.basis.size(), cplx(0.0));
  q.family.g.assign(q.basis.size(), cplx(0.0));
  const auto rw = uv_commutation_experiment(q, w);
  CHECK(rw.series("wick_s=1").back() > 4.0 * rw.series("wick_s=1").front());
  CHECK(rw.passed());
}

TEST_CASE("assumption audit flags chi = omega and passes the default coupling") {
  SweepPlan p = nelson_plan(FamilyKind::Coherent);
  for (const auto& a : assumption_audit(p)) CHECK(a.passed);
  p.coupling.chi = Cutoff::omega_like();
  bool flagged = false;
  for (const auto& a : assumption_audit(p))
    if (!a.passed && a.name.rfind("A_chi", 0) == 0) flagged = true;
  CHECK(flagged);
}
