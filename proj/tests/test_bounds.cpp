#include <doctest.h>

#include <random>

#include "qclim/spectral_bounds.hpp"

using namespace qclim;

TEST_CASE("KLMN bound for V = 0 is (0, 0)") {
  ParticleGrid g{1, 32, 10.0, Boundary::Periodic, 1};
  const Multiplier v(g, [](const Vec3&) { return cplx(0.0); });
  const KlmnResult r = klmn_bound(v, g);
  CHECK(r.a == 0.0);
  CHECK(r.b == 0.0);
  CHECK(r.admissible);
}

TEST_CASE("bounded V admits the trivial pair (0, sup|V|)") {
  ParticleGrid g{1, 32, 10.0, Boundary::Periodic, 1};
  const Multiplier v(g, [](const Vec3&) { return cplx(-0.8); });
  const KlmnResult r = klmn_bound(v, g);
  CHECK(r.trivial_witness);
  CHECK(r.a == 0.0);
  CHECK(std::abs(r.b - 0.8) < 1e-14);
  // pencil of a constant: a(b) = c / b
  for (const auto& rung : r.ladder) CHECK(std::abs(rung.a - 0.8 / rung.b) < 1e-10);
}

TEST_CASE("a(b) is nonincreasing along the ladder and the selected pair bounds the form") {
  for (Boundary bc : {Boundary::Periodic, Boundary::Dirichlet}) {
    ParticleGrid g{1, 64, 12.0, bc, 1};
    const Multiplier v(g, [](const Vec3& x) { return cplx(-3.0 / std::sqrt(x[0] * x[0] + 0.04)); });
    const KlmnResult r = klmn_bound(v, g);
    for (std::size_t i = 1; i < r.ladder.size(); ++i) CHECK(r.ladder[i].a <= r.ladder[i - 1].a * (1.0 + 1e-10));
    CHECK(r.a < 1.0);
    // |<psi, V psi>| <= a <psi, -Delta psi> + b ||psi||^2 on random vectors
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n01;
    for (int t = 0; t < 20; ++t) {
      VectorXc psi(64);
      for (auto& c : psi) c = cplx(n01(rng), n01(rng));
      const double lhs = std::abs(g.inner(psi, v.apply(psi)));
      const double rhs = r.a * g.inner(psi, laplacian_apply(g, psi)).real() + r.b * g.inner(psi, psi).real();
      CHECK(lhs <= rhs * (1.0 + 1e-10));
    }
  }
}

TEST_CASE("sandwich norm of the identity is the largest spectral weight") {
  ParticleGrid g{1, 32, 8.0, Boundary::Periodic, 1};
  const LinearOp id = [](const VectorXc& x) { return x; };
  SandwichOptions o;
  o.lambda0 = 2.0;
  CHECK(std::abs(fractional_sandwich_norm(id, g, 0.25, 0.5, o) - std::pow(2.0, -0.75)) < 1e-10);
  o.kind = SandwichKind::AbsMomentum;
  const double k1 = 2.0 * kPi / 8.0;
  CHECK(std::abs(fractional_sandwich_norm(id, g, 0.5, 0.5, o) - 1.0 / k1) < 1e-9);
}

TEST_CASE("sandwich of a multiplier by resolvent powers matches the dense computation") {
  ParticleGrid g{1, 16, 6.0, Boundary::Periodic, 1};
  const Multiplier v(g, [](const Vec3& x) { return cplx(std::cos(2.0 * kPi * x[0] / 6.0) + 0.3); });
  const LinearOp part = [&](const VectorXc& x) { return v.apply(x); };
  SandwichOptions o;
  o.lambda0 = 1.5;
  MatrixXc s(16, 16);
  VectorXc e = VectorXc::Zero(16);
  const auto f = [&](double k2) { return std::pow(k2 + 1.5, -0.25); };
  for (int j = 0; j < 16; ++j) {
    e(j) = 1.0;
    s.col(j) = spectral_function_apply(g, v.apply(spectral_function_apply(g, e, f)), f);
    e(j) = 0.0;
  }
  Eigen::JacobiSVD<MatrixXc> svd(s);
  CHECK(std::abs(fractional_sandwich_norm(part, g, 0.25, 0.25, o) - svd.singularValues()(0)) < 1e-9);
}

TEST_CASE("polarization supremum is attained at phi = psi") {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> n01;
  const auto rnd = [&](int n) {
    VectorXc v(n);
    for (auto& c : v) c = cplx(n01(rng), n01(rng));
    return v;
  };
  for (int trial = 0; trial < 100; ++trial) {
    MatrixXc m(10, 10);
    for (int j = 0; j < 10; ++j) m.col(j) = rnd(10);
    const MatrixXc a = m.adjoint() * m;
    const SesquilinearForm q = [&](const VectorXc& x, const VectorXc& y) { return x.dot(a * y); };
    const VectorXc psi = rnd(10);
    std::vector<VectorXc> probes;
    for (int p = 0; p < 8; ++p) probes.push_back(rnd(10));
    const PolarizationResult r = polarization_sup(q, psi, probes);
    CHECK(r.gap == 0.0);
    CHECK(r.argmax == probes.size());
    for (double v : r.values) CHECK(v <= r.q_psi);
  }
}

TEST_CASE("zero form gives zero everywhere and negative forms are refused") {
  const SesquilinearForm zero = [](const VectorXc&, const VectorXc&) { return cplx(0.0); };
  const VectorXc psi = VectorXc::Ones(4);
  const PolarizationResult r = polarization_sup(zero, psi, {VectorXc::Zero(4), 2.0 * psi});
  for (double v : r.values) CHECK(v == 0.0);
  CHECK(r.gap == 0.0);
  const SesquilinearForm neg = [](const VectorXc& x, const VectorXc& y) { return -x.dot(y); };
  CHECK_THROWS_AS(polarization_sup(neg, psi, {}), Error);
}
