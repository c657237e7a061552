#include "qclim/solvers.hpp"

#include <algorithm>
#include <random>

#include <Eigen/Eigenvalues>

namespace qclim {

namespace {

VectorXc random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  VectorXc v(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = cplx(g(rng), g(rng));
  return v / v.norm();
}

// Mean of the scalar potential parts (the diagonal beyond the kinetic symbol).
double potential_mean(const QuadraticForm& form) {
  const ParticleGrid& g = form.grid();
  if (g.boundary == Boundary::Dirichlet) return 0.0;
  const VectorXr d = form.diagonal();
  const auto sym = laplacian_symbol(g.scalar());
  double kin = 0.0;
  for (double s : sym) kin += s;
  kin /= static_cast<double>(sym.size());
  return d.mean() - kin;
}

// Approximate inverse of (H - theta): spectral on periodic grids, Jacobi on Dirichlet grids.
LinearOp shifted_preconditioner(const QuadraticForm& form, double theta, double floor) {
  const ParticleGrid g = form.grid();
  if (g.boundary == Boundary::Periodic) {
    const double shift = potential_mean(form) - theta;
    return [g, shift, floor](const VectorXc& r) {
      return spectral_function_apply(g, r, [&](double k2) { return 1.0 / std::max(k2 + shift, floor); });
    };
  }
  const VectorXr d = form.diagonal();
  return [d, theta, floor](const VectorXc& r) {
    VectorXc t(r.size());
    for (Eigen::Index i = 0; i < r.size(); ++i) t(i) = r(i) / std::max(d(i) - theta, floor);
    return t;
  };
}

// Orthogonalize v against the columns of basis (twice for stability); returns the remaining norm.
double orthogonalize(const std::vector<VectorXc>& basis, VectorXc& v) {
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& b : basis) v -= b.dot(v) * b;
  return v.norm();
}

EigenResult dense_eigenpairs(const QuadraticForm& form, int count) {
  const MatrixXc h = form.to_dense();
  const MatrixXc hs = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(hs);
  if (es.info() != Eigen::Success) throw Error(ErrorKind::Solver, "dense eigensolver failed");
  EigenResult out;
  out.method = "dense";
  const double scale = 1.0 / std::sqrt(form.grid().cell());
  for (int i = 0; i < count; ++i) {
    VectorXc v = es.eigenvectors().col(i) * scale;
    const double theta = es.eigenvalues()(i);
    const VectorXc r = form.apply(v) - theta * v;
    out.values.push_back(theta);
    out.residuals.push_back(form.grid().norm(r));
    out.vectors.push_back(std::move(v));
  }
  return out;
}

// Block Davidson with thick restart: the basis keeps the current Ritz vectors and is extended by
// preconditioned residuals of the unconverged pairs.
EigenResult davidson(const QuadraticForm& form, int count, const SolverOptions& opt) {
  const std::size_t n = form.dimension();
  const int keep = std::min<int>(static_cast<int>(n), count + std::max(4, count / 2));
  const int cap = std::max(opt.krylov, 3 * keep);
  std::vector<VectorXc> v, hv;
  auto push = [&](VectorXc x) {
    if (orthogonalize(v, x) < 1e-10) return false;
    x.normalize();
    hv.push_back(form.apply(x));
    v.push_back(std::move(x));
    return true;
  };
  for (int i = 0; i < keep; ++i) push(random_vector(n, opt.seed + static_cast<std::uint64_t>(i)));

  EigenResult out;
  out.method = "davidson";
  for (int it = 1; it <= opt.max_iter; ++it) {
    const auto m = static_cast<Eigen::Index>(v.size());
    MatrixXc g(m, m);
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = 0; j < m; ++j) g(i, j) = v[static_cast<std::size_t>(i)].dot(hv[static_cast<std::size_t>(j)]);
    Eigen::SelfAdjointEigenSolver<MatrixXc> es(0.5 * (g + g.adjoint()));
    const int k = std::min<int>(keep, static_cast<int>(m));
    std::vector<VectorXc> x(static_cast<std::size_t>(k)), hx(static_cast<std::size_t>(k));
    std::vector<double> theta(static_cast<std::size_t>(k)), res(static_cast<std::size_t>(k));
    for (int c = 0; c < k; ++c) {
      VectorXc xc = VectorXc::Zero(static_cast<Eigen::Index>(n)), hc = xc;
      for (Eigen::Index i = 0; i < m; ++i) {
        xc += es.eigenvectors()(i, c) * v[static_cast<std::size_t>(i)];
        hc += es.eigenvectors()(i, c) * hv[static_cast<std::size_t>(i)];
      }
      theta[static_cast<std::size_t>(c)] = es.eigenvalues()(c);
      res[static_cast<std::size_t>(c)] = (hc - es.eigenvalues()(c) * xc).norm() / xc.norm();
      x[static_cast<std::size_t>(c)] = std::move(xc);
      hx[static_cast<std::size_t>(c)] = std::move(hc);
    }
    bool done = true;
    for (int c = 0; c < count; ++c) done = done && res[static_cast<std::size_t>(c)] <= 0.5 * opt.eig_tol;
    if (done) {
      const double scale = 1.0 / std::sqrt(form.grid().cell());
      for (int c = 0; c < count; ++c) {
        VectorXc vec = x[static_cast<std::size_t>(c)] / x[static_cast<std::size_t>(c)].norm() * scale;
        out.values.push_back(theta[static_cast<std::size_t>(c)]);
        out.residuals.push_back(form.grid().norm(form.apply(vec) - theta[static_cast<std::size_t>(c)] * vec));
        out.vectors.push_back(std::move(vec));
      }
      out.iterations = it;
      return out;
    }
    std::vector<VectorXc> corrections;
    const double spread = std::abs(theta.back() - theta.front()) + 1.0;
    for (int c = 0; c < k; ++c) {
      if (res[static_cast<std::size_t>(c)] <= 0.5 * opt.eig_tol) continue;
      const VectorXc r = hx[static_cast<std::size_t>(c)] - theta[static_cast<std::size_t>(c)] * x[static_cast<std::size_t>(c)];
      corrections.push_back(shifted_preconditioner(form, theta[static_cast<std::size_t>(c)], 1e-2 * spread)(r));
    }
    if (static_cast<int>(v.size() + corrections.size()) > cap) {
      v.clear();
      hv.clear();
      for (int c = 0; c < k; ++c) {
        VectorXc xc = x[static_cast<std::size_t>(c)];
        const VectorXc hc = hx[static_cast<std::size_t>(c)];
        const double before = xc.norm();
        if (orthogonalize(v, xc) < 1e-8 * before) continue;
        // Ritz vectors are already orthonormal up to rounding; recompute H x only if it drifted
        const double nrm = xc.norm();
        xc /= nrm;
        hv.push_back(std::abs(nrm - 1.0) < 1e-12 ? hc : form.apply(xc));
        v.push_back(std::move(xc));
      }
    }
    int added = 0;
    for (auto& t : corrections) added += push(std::move(t)) ? 1 : 0;
    if (added == 0 && !push(random_vector(n, opt.seed + 7919u * static_cast<std::uint64_t>(it))))
      throw Error(ErrorKind::Solver, "eigensolver basis exhausted");
  }
  throw Error(ErrorKind::Solver, "eigensolver iteration budget exceeded");
}

}  // namespace

EigenResult lowest_eigenpairs(const QuadraticForm& form, int count, const SolverOptions& opt) {
  const std::size_t n = form.dimension();
  require(count >= 1 && static_cast<std::size_t>(count) <= n, "eigenpair count out of range");
  EigenResult r = n <= opt.dense_limit ? dense_eigenpairs(form, count) : davidson(form, count, opt);
  for (double res : r.residuals)
    if (!(res <= opt.eig_tol * std::max(1.0, std::abs(r.values.back()))))
      throw Error(ErrorKind::Solver, "eigenpair residual above tolerance");
  return r;
}

double admissible_lambda(double lower_bound, double lambda0) { return std::max(-lower_bound, lambda0) + 1.0; }

ResolventResult resolvent_apply(const QuadraticForm& form, double lambda, const VectorXc& rhs,
                                std::optional<double> lower_bound, const SolverOptions& opt, double margin) {
  require(static_cast<std::size_t>(rhs.size()) == form.dimension(), "right-hand side size does not match the form");
  const double m = lower_bound ? *lower_bound : lowest_eigenpairs(form, 1, opt).values[0];
  if (!(lambda + m > margin)) throw Error(ErrorKind::Solver, "indefinite shift: lambda + m must be positive");

  ResolventResult out;
  out.u = VectorXc::Zero(rhs.size());
  const double bnorm = rhs.norm();
  if (bnorm == 0.0) return out;
  const auto op = [&](const VectorXc& x) -> VectorXc { return form.apply(x) + lambda * x; };
  const LinearOp pre = shifted_preconditioner(form, -lambda, std::max(lambda + m, 1e-3));

  VectorXc r = rhs;
  VectorXc z = pre(r);
  VectorXc p = z;
  cplx rz = r.dot(z);
  int it = 0;
  for (; it < opt.max_iter; ++it) {
    if (r.norm() <= opt.cg_tol * bnorm) break;
    const VectorXc ap = op(p);
    const cplx pap = p.dot(ap);
    if (!(pap.real() > 0.0)) throw Error(ErrorKind::Solver, "CG met a non-positive direction");
    const cplx alpha = rz / pap;
    out.u += alpha * p;
    r -= alpha * ap;
    // periodic true-residual refresh guards against drift of the recursive residual
    if ((it + 1) % 50 == 0) r = rhs - op(out.u);
    z = pre(r);
    const cplx rz_new = r.dot(z);
    p = z + (rz_new / rz) * p;
    rz = rz_new;
  }
  out.iterations = it;
  out.residual = (op(out.u) - rhs).norm() / bnorm;
  if (!(out.residual <= std::max(opt.cg_tol, 1e-10))) throw Error(ErrorKind::Solver, "CG iteration budget exceeded");
  return out;
}

ExtremeEigen largest_eigenvalue(const LinearOp& op, std::size_t n, int max_iter, double tol, std::uint64_t seed) {
  ExtremeEigen out;
  std::vector<VectorXc> q{random_vector(n, seed)};
  std::vector<double> alpha, beta;
  double prev = 0.0;
  int stable = 0;
  const int steps = std::min<int>(max_iter, static_cast<int>(n));
  for (int j = 0; j < steps; ++j) {
    VectorXc w = op(q.back());
    alpha.push_back(q.back().dot(w).real());
    orthogonalize(q, w);
    const double b = w.norm();
    const auto k = static_cast<Eigen::Index>(alpha.size());
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
      t(i, i) = alpha[static_cast<std::size_t>(i)];
      if (i + 1 < k) t(i, i + 1) = t(i + 1, i) = beta[static_cast<std::size_t>(i)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t, Eigen::EigenvaluesOnly);
    const double top = es.eigenvalues()(k - 1);
    out.value = top;
    out.iterations = j + 1;
    const double scale = std::max(std::abs(top), 1e-300);
    stable = (j > 0 && std::abs(top - prev) <= tol * scale) ? stable + 1 : 0;
    if (b <= 1e-14 * scale || stable >= 3 || j + 1 == static_cast<int>(n)) {
      out.converged = true;
      return out;
    }
    prev = top;
    beta.push_back(b);
    q.push_back(w / b);
  }
  return out;
}

}  // namespace qclim
