#include <doctest.h>

#include <algorithm>

#include "qclim/fft.hpp"
#include "qclim/forms.hpp"
#include "qclim/solvers.hpp"

using namespace qclim;

namespace {

QuadraticForm free_form(const ParticleGrid& g) {
  return assemble_nelson(g, ExternalPotential::zero(), static_cast<const Multiplier*>(nullptr));
}

QuadraticForm oscillator(int n, double len, Boundary bc) {
  return assemble_nelson(ParticleGrid{1, n, len, bc, 1}, ExternalPotential::harmonic(1.0),
                         static_cast<const Multiplier*>(nullptr));
}

}  // namespace

TEST_CASE("free periodic Laplacian eigenvalues (2 pi n / L)^2 with multiplicities") {
  const double len = 5.0;
  ParticleGrid g{1, 24, len, Boundary::Periodic, 1};
  const EigenResult e = lowest_eigenpairs(free_form(g), 7);
  const double k = 2.0 * kPi / len;
  const double expect[] = {0.0, k * k, k * k, 4 * k * k, 4 * k * k, 9 * k * k, 9 * k * k};
  for (int i = 0; i < 7; ++i) CHECK(std::abs(e.values[static_cast<std::size_t>(i)] - expect[i]) < 1e-9);
  for (double r : e.residuals) CHECK(r <= 1e-8);
}

TEST_CASE("iterative eigensolver agrees with the dense path") {
  SolverOptions it;
  it.dense_limit = 0;
  for (Boundary bc : {Boundary::Periodic, Boundary::Dirichlet}) {
    const QuadraticForm q = oscillator(256, 16.0, bc);
    const EigenResult d = lowest_eigenpairs(q, 3);
    const EigenResult k = lowest_eigenpairs(q, 3, it);
    CHECK(k.method == "davidson");
    for (int i = 0; i < 3; ++i) {
      CHECK(std::abs(d.values[static_cast<std::size_t>(i)] - k.values[static_cast<std::size_t>(i)]) < 1e-9);
      CHECK(k.residuals[static_cast<std::size_t>(i)] <= 1e-8);
    }
  }
}

TEST_CASE("resolvent of the Fourier-diagonal free operator is 1/(k^2 + lambda)") {
  ParticleGrid g{2, 16, 7.0, Boundary::Periodic, 1};
  const QuadraticForm q = free_form(g);
  const double lambda = 0.7;
  VectorXc rhs(static_cast<Eigen::Index>(g.points()));
  for (Eigen::Index i = 0; i < rhs.size(); ++i) rhs(i) = cplx(std::sin(0.3 * i), std::cos(0.17 * i * i));
  const ResolventResult r = resolvent_apply(q, lambda, rhs, 0.0);
  VectorXc uh = r.u, bh = rhs;
  fft::forward(g.dims(), uh);
  fft::forward(g.dims(), bh);
  const auto sym = laplacian_symbol(g);
  double err = 0.0;
  for (Eigen::Index i = 0; i < uh.size(); ++i)
    err = std::max(err, std::abs(uh(i) - bh(i) / (sym[static_cast<std::size_t>(i)] + lambda)));
  CHECK(err < 1e-9 * bh.cwiseAbs().maxCoeff());
}

TEST_CASE("oscillator resolvent on low eigenvectors matches sum 1/(2n+1+lambda)") {
  for (Boundary bc : {Boundary::Periodic, Boundary::Dirichlet}) {
    const QuadraticForm q = oscillator(256, 16.0, bc);
    const EigenResult e = lowest_eigenpairs(q, 10);
    const double lambda = admissible_lambda(e.values[0]);
    double trace = 0.0, oracle = 0.0;
    for (int n = 0; n < 10; ++n) {
      const VectorXc& v = e.vectors[static_cast<std::size_t>(n)];
      const ResolventResult r = resolvent_apply(q, lambda, v, e.values[0]);
      // resolvent identity (H + lambda) u = v
      CHECK((q.apply(r.u) + lambda * r.u - v).norm() <= 1e-9 * v.norm());
      trace += q.grid().inner(v, r.u).real();
      oracle += 1.0 / (2 * n + 1 + lambda);
    }
    CHECK(std::abs(trace - oracle) < 0.01 * oracle);
  }
}

TEST_CASE("indefinite shifts are rejected") {
  const QuadraticForm q = oscillator(64, 12.0, Boundary::Dirichlet);
  VectorXc rhs = VectorXc::Ones(64);
  CHECK_THROWS_AS(resolvent_apply(q, -1.5, rhs), Error);
  CHECK_NOTHROW(resolvent_apply(q, 0.0, rhs));
}

TEST_CASE("Lanczos top eigenvalue of a diagonal operator") {
  VectorXc d(50);
  for (int i = 0; i < 50; ++i) d(i) = 1.0 + 0.1 * i;
  const LinearOp op = [&](const VectorXc& x) -> VectorXc { return d.cwiseProduct(x); };
  const ExtremeEigen e = largest_eigenvalue(op, 50, 200, 1e-12);
  CHECK(e.converged);
  CHECK(std::abs(e.value - 5.9) < 1e-10);
}
