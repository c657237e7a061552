#include <doctest.h>

#include "oracles.hpp"
#include "qclim/fock.hpp"

using namespace qclim;

TEST_CASE("truncated commutator is eps off the top level and -eps n_max at the top") {
  for (double eps : {0.5, 0.1, 0.01})
    for (int n : {4, 8, 16}) {
      const MatrixXc c = truncated_commutator(n, eps);
      for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j) {
          if (i == n && j == n) continue;
          const double want = (i == j) ? eps : 0.0;
          CHECK(std::abs(c(i, j) - want) <= 1e-12);
        }
      CHECK(std::abs(c(n, n) + eps * n) <= 1e-12);
    }
}

TEST_CASE("ladder operators raise and lower occupation with sqrt(eps n) weights") {
  const ModeBasis b = ModeBasis::lattice_1d(6.0, {1, 2});
  FockTruncation tr{{3, 2}, 0.2};
  VectorXc c = VectorXc::Zero(static_cast<Eigen::Index>(tr.dimension()));
  c(1 * 3 + 1) = 1.0;  // |1, 1>
  const FockState s(tr, c);
  const FockState up = ladder_apply(s, b, 0, Ladder::Create);
  CHECK(std::abs(up.coefficients()(2 * 3 + 1) - std::sqrt(0.2 * 2)) < 1e-15);
  const FockState down = ladder_apply(s, b, 1, Ladder::Annihilate);
  CHECK(std::abs(down.coefficients()(1 * 3 + 0) - std::sqrt(0.2)) < 1e-15);
  // agrees with the raw-tensor oracle
  const oracle::Layout l(tr.n_max);
  CHECK((oracle::create(c, l, 0, 0.2) - up.coefficients()).norm() < 1e-15);
  CHECK((oracle::annihilate(c, l, 1, 0.2) - down.coefficients()).norm() < 1e-15);
}

TEST_CASE("single-mode Weyl matrix on a coherent vector reproduces the displacement phase") {
  const double eps = 0.25, cell = 1.0;
  const cplx beta(0.8, -0.3), eta(0.4, 0.7);
  const int n = 60;
  const VectorXc v = coherent_vector(beta, n);
  CHECK(std::abs(v.norm() - 1.0) < 1e-12);
  const MatrixXc w = weyl_mode_matrix(n + 40, eps, cell, eta);
  VectorXc pad = VectorXc::Zero(n + 41);
  pad.head(n + 1) = v;
  const cplx got = pad.dot(w * pad);
  // <beta| exp(i g (eta b* + conj(eta) b)) |beta>, g = sqrt(eps cell)
  const double g = std::sqrt(eps * cell);
  const cplx want = std::exp(cplx(0.0, 2.0 * g * (eta * std::conj(beta)).real())) * std::exp(-0.5 * g * g * std::norm(eta));
  CHECK(std::abs(got - want) < 1e-12);
}

TEST_CASE("Poisson tail policy and dGamma expectations") {
  const int n = poisson_cutoff(4.0, 1e-12);
  CHECK(poisson_tail(4.0, n) < 1e-12);
  CHECK(poisson_tail(4.0, n - 1) >= 1e-12);
  const ModeBasis b = ModeBasis::lattice_1d(6.0, {1, 3});
  const double eps = 0.1;
  FockTruncation tr{{40, 40}, eps};
  const FockState s = FockState::product(tr, {coherent_vector(cplx(1.5, 0.5), 40), coherent_vector(cplx(-0.5, 1.0), 40)});
  const Dispersion d = Dispersion::massive(0.5);
  const double want = eps * (d.omega(b[0].k) * 2.5 + d.omega(b[1].k) * 1.25);
  CHECK(std::abs(dgamma_expectation(s, b, d, DGammaSymbol::Omega) - want) < 1e-10);
  CHECK(std::abs(oracle::field_energy(s, b, d) - want) < 1e-10);
  // coherent states: dGamma2 = dGamma^2 - eps dGamma(omega^2) = (sum eps omega |b|^2)^2
  CHECK(std::abs(dgamma2_expectation(s, b, d) - want * want) < 1e-9);
}

TEST_CASE("multi-mode Weyl expectation matches the coherent closed form") {
  const ModeBasis b = ModeBasis::lattice_1d(8.0, {1, 2});
  const double eps = 0.25;
  const std::vector<cplx> z0{{0.6, 0.2}, {-0.3, 0.4}};
  std::vector<VectorXc> f;
  FockTruncation tr{{30, 30}, eps};
  for (std::size_t m = 0; m < 2; ++m) f.push_back(coherent_vector(std::sqrt(b[m].cell / eps) * z0[m], 30));
  const FockState s = FockState::product(tr, f);
  const std::vector<cplx> eta{{0.3, -0.2}, {0.1, 0.5}};
  const WeylResult r = weyl_expectation_fock(s, b, eta);
  CHECK(std::abs(r.value - oracle::coherent_weyl(b, eta, z0, eps)) < 1e-10);
  CHECK(r.unitarity_defect < 1e-10);
}

TEST_CASE("truncation validation") {
  FockTruncation bad{{-1}, 0.1};
  CHECK_THROWS_AS(bad.validate(), Error);
  FockTruncation zero_eps{{2}, 0.0};
  CHECK_THROWS_AS(zero_eps.validate(), Error);
  FockTruncation huge{{999, 999, 999}, 0.1, 1000};
  CHECK_THROWS_AS(huge.validate(), Error);
}
