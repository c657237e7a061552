#include "qclim/spectral_bounds.hpp"

#include <algorithm>
#include <limits>

#include <Eigen/Eigenvalues>

namespace qclim {

namespace {

double pencil_top_periodic(const Multiplier& absv, const ParticleGrid& g, double b) {
  const auto half = [&](const VectorXc& x) {
    return spectral_function_apply(g, x, [b](double k2) { return 1.0 / std::sqrt(k2 + b); });
  };
  const LinearOp t = [&](const VectorXc& x) { return half(absv.apply(half(x))); };
  const ExtremeEigen e = largest_eigenvalue(t, g.points(), 400, 1e-13);
  if (!e.converged) throw Error(ErrorKind::Solver, "pencil iteration did not converge");
  return std::max(0.0, e.value);
}

double pencil_top_dense(const Multiplier& absv, const ParticleGrid& g, double b) {
  const auto n = static_cast<Eigen::Index>(g.points());
  require(n <= 4096, "dense pencil solve limited to 4096 grid points");
  Eigen::MatrixXd k(n, n), v(n, n);
  VectorXc e = VectorXc::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    e(j) = 1.0;
    k.col(j) = laplacian_apply(g, e).real();
    v.col(j) = absv.apply(e).real();
    e(j) = 0.0;
  }
  k.diagonal().array() += b;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (v + v.transpose()), 0.5 * (k + k.transpose()),
                                                               Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::Solver, "pencil solve failed");
  return std::max(0.0, es.eigenvalues()(n - 1));
}

}  // namespace

KlmnResult klmn_bound(const Multiplier& part, const ParticleGrid& grid, double scale, int rungs) {
  require(part.is_real(), "KLMN needs a Hermitian (real) potential part");
  const ParticleGrid g = grid.scalar();
  const Multiplier absv = part.abs();
  const double sup = absv.sup_abs();

  KlmnResult out;
  double best = sup / scale;  // trivial witness (0, sup|V|)
  out.a = 0.0;
  out.b = sup;
  out.trivial_witness = true;
  out.admissible = true;
  for (int r = 0; r < rungs; ++r) {
    const double b = std::ldexp(1.0, r);
    const double a = sup == 0.0 ? 0.0
                     : g.boundary == Boundary::Periodic ? pencil_top_periodic(absv, g, b)
                                                        : pencil_top_dense(absv, g, b);
    out.ladder.push_back({b, a});
    if (a < 1.0 && a + a * b / scale < best) {
      best = a + a * b / scale;
      out.a = a;
      out.b = a * b;
      out.trivial_witness = false;
    }
  }
  return out;
}

double fractional_sandwich_norm(const LinearOp& part, const ParticleGrid& grid, double s_left, double s_right,
                                const SandwichOptions& opt) {
  require(grid.boundary == Boundary::Periodic, "fractional powers need a periodic grid");
  const auto power = [&](double s) -> std::function<double(double)> {
    if (opt.kind == SandwichKind::Resolvent) {
      require(opt.lambda0 > 0.0, "lambda0 must be positive");
      return [s, l = opt.lambda0](double k2) { return std::pow(k2 + l, -s); };
    }
    return [s](double k2) { return k2 > 1e-14 ? std::pow(k2, -0.5 * s) : 0.0; };
  };
  const auto fl = power(s_left), fr = power(s_right);
  const LinearOp s = [&](const VectorXc& x) {
    return spectral_function_apply(grid, part(spectral_function_apply(grid, x, fr)), fl);
  };
  const LinearOp s_adj = [&](const VectorXc& x) {
    return spectral_function_apply(grid, part(spectral_function_apply(grid, x, fl)), fr);
  };
  const LinearOp sts = [&](const VectorXc& x) { return s_adj(s(x)); };
  const ExtremeEigen e = largest_eigenvalue(sts, grid.dimension(), opt.max_iter, opt.tol, opt.seed);
  if (!e.converged) throw Error(ErrorKind::Solver, "power iteration did not converge for the sandwich norm");
  return std::sqrt(std::max(0.0, e.value));
}

double fractional_sandwich_norm(const QuadraticForm& form, PartTag tag, double s_left, double s_right,
                                const SandwichOptions& opt) {
  const LinearOp part = [&](const VectorXc& x) { return form.apply_part(tag, x); };
  return fractional_sandwich_norm(part, form.grid(), s_left, s_right, opt);
}

PolarizationResult polarization_sup(const SesquilinearForm& q, const VectorXc& psi, const std::vector<VectorXc>& probes,
                                    double negative_tol) {
  PolarizationResult out;
  out.q_psi = q(psi, psi).real();
  const double scale = std::max(1.0, std::abs(out.q_psi));
  if (out.q_psi < -negative_tol * scale) throw Error(ErrorKind::Domain, "negative form detected; shift required");
  std::vector<VectorXc> all = probes;
  all.push_back(psi);
  out.sup = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < all.size(); ++i) {
    const VectorXc& phi = all[i];
    const double qphi = q(phi, phi).real();
    if (qphi < -negative_tol * std::max(1.0, std::abs(qphi)))
      throw Error(ErrorKind::Domain, "negative form detected; shift required");
    const double v = q(phi, 2.0 * psi - phi).real();
    out.values.push_back(v);
    if (v > out.sup) {
      out.sup = v;
      out.argmax = i;
    }
  }
  out.gap = out.q_psi - out.sup;
  return out;
}

PolarizationResult polarization_sup(const QuadraticForm& form, double shift, const VectorXc& psi,
                                    const std::vector<VectorXc>& probes) {
  const SesquilinearForm q = [&](const VectorXc& x, const VectorXc& y) {
    return form.form(x, y) + shift * form.grid().inner(x, y);
  };
  return polarization_sup(q, psi, probes);
}

}  // namespace qclim
