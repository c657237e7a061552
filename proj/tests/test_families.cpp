#include <doctest.h>

#include "oracles.hpp"
#include "qclim/families.hpp"

using namespace qclim;

namespace {

FamilySpec excited() {
  FamilySpec s;
  s.kind = FamilyKind::ExcitedCoherent;
  s.z0 = {{0.6, 0.2}, {-0.3, 0.4}};
  s.g = {{0.15, 0.0}, {0.0, 0.15}};
  s.grade = EnergyGrade::PauliFierz;
  return s;
}

}  // namespace

TEST_CASE("closed-form moments agree with contractions on the truncated Fock state") {
  const ModeBasis b = ModeBasis::lattice_1d(10.0, {1, 2});
  for (FamilyKind k : {FamilyKind::Coherent, FamilyKind::ExcitedCoherent, FamilyKind::GaussianSqueezed, FamilyKind::Cat}) {
    FamilySpec s = excited();
    s.kind = k;
    s.z1 = {{-0.6, 0.1}, {0.3, 0.3}};
    s.squeeze_r = {0.3, 0.1};
    s.squeeze_phi = {0.4, -0.2};
    const FieldStateFamily f(s, b, Dispersion::massless());
    for (double eps : {0.4, 0.1}) {
      const Moments m = f.moments(eps);
      const Moments q = fock_moments(f.fock_state(eps).state, b);
      CAPTURE(to_string(k));
      CHECK((m.m1 - q.m1).norm() < 1e-9);
      CHECK((m.m2_aa - q.m2_aa).norm() < 1e-9);
      CHECK((m.m2_ada - q.m2_ada).norm() < 1e-9);
      CHECK(m.hermiticity_defect() < 1e-14);
    }
  }
}

TEST_CASE("coherent Weyl expectation: both backends against the BCH closed form") {
  const ModeBasis b = ModeBasis::lattice_1d(10.0, {1, 2});
  FamilySpec s = excited();
  s.kind = FamilyKind::Coherent;
  const FieldStateFamily f(s, b, Dispersion::massless());
  const std::vector<cplx> eta{{0.5, -0.1}, {0.2, 0.3}};
  const cplx want = oracle::coherent_weyl(b, eta, s.z0, 0.25);
  CHECK(std::abs(weyl_expectation(f, eta, 0.25, Backend::FockExact) - want) < 1e-8);
  CHECK(std::abs(weyl_expectation(f, eta, 0.25, Backend::ClosedForm) - want) < 1e-12);
  // the limit functional
  const auto mu = f.declared_limit();
  REQUIRE(mu);
  CHECK(std::abs(mu->characteristic(b, eta) - oracle::coherent_weyl(b, eta, s.z0, 0.0)) < 1e-14);
}

TEST_CASE("excited_coherent first moment is linear in eps") {
  const ModeBasis b = ModeBasis::lattice_1d(10.0, {1, 2});
  const FieldStateFamily f(excited(), b, Dispersion::massless());
  const VectorXc m4 = f.moments(0.4).m1, m2 = f.moments(0.2).m1, m1 = f.moments(0.1).m1;
  // second difference of an affine function vanishes; first difference halves
  CHECK((m4 - m2 - 2.0 * (m2 - m1)).norm() < 1e-12);
  CHECK((m2 - m1).norm() > 1e-3);
}

TEST_CASE("vacuum has zero moments and a Gaussian characteristic functional") {
  const ModeBasis b = ModeBasis::lattice_1d(10.0, {1, 2});
  FamilySpec s;
  const FieldStateFamily f(s, b, Dispersion::massless());
  const Moments m = f.moments(0.3);
  CHECK(m.m1.norm() == 0.0);
  CHECK(m.m2_ada.norm() == 0.0);
  const std::vector<cplx> eta{{0.5, 0.0}, {0.0, 0.5}};
  CHECK(std::abs(f.weyl(eta, 0.3) - oracle::coherent_weyl(b, eta, {0.0, 0.0}, 0.3)) < 1e-14);
}

TEST_CASE("monomial degree is limited by the energy grade") {
  const ModeBasis b = ModeBasis::lattice_1d(10.0, {1, 2});
  FamilySpec s = excited();
  s.grade = EnergyGrade::Nelson;
  const FieldStateFamily f(s, b, Dispersion::massless());
  const std::vector<cplx> g{{1.0, 0.0}, {0.0, 1.0}};
  CHECK_NOTHROW(wick_monomial_expectation(f, {g}, {}, 0.2));
  CHECK_THROWS_AS(wick_monomial_expectation(f, {g}, {g}, 0.2), Error);
}

TEST_CASE("malformed family specs are rejected") {
  const ModeBasis b = ModeBasis::lattice_1d(10.0, {1, 2});
  FamilySpec s = excited();
  s.z0 = {{1.0, 0.0}};
  CHECK_THROWS_AS(FieldStateFamily(s, b, Dispersion::massless()), Error);
  CHECK_THROWS_AS(family_kind_from_string("thermal"), Error);
}
