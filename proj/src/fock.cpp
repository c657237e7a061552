#include "qclim/fock.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <numeric>

namespace qclim {

namespace {

std::size_t product_of(const std::vector<int>& dims) {
  std::size_t n = 1;
  for (int d : dims) n *= static_cast<std::size_t>(d);
  return n;
}

// y = (I x .. x op_on_axis x .. x I) x for a row-major tensor with the given dims
VectorXc apply_axis(const VectorXc& x, const std::vector<int>& dims, std::size_t axis, const MatrixXc& op) {
  const std::size_t n = static_cast<std::size_t>(dims[axis]);
  std::size_t inner = 1;
  for (std::size_t a = axis + 1; a < dims.size(); ++a) inner *= static_cast<std::size_t>(dims[a]);
  const std::size_t outer = static_cast<std::size_t>(x.size()) / (n * inner);
  VectorXc y = VectorXc::Zero(x.size());
  for (std::size_t o = 0; o < outer; ++o) {
    const std::size_t base = o * n * inner;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const cplx a = op(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        if (a == cplx(0.0)) continue;
        const cplx* src = x.data() + base + j * inner;
        cplx* dst = y.data() + base + i * inner;
        for (std::size_t t = 0; t < inner; ++t) dst[t] += a * src[t];
      }
    }
  }
  return y;
}

}  // namespace

std::size_t FockTruncation::dimension() const {
  std::size_t n = 1;
  for (int m : n_max) {
    n *= static_cast<std::size_t>(m + 1);
    if (n > budget) return n;
  }
  return n;
}

void FockTruncation::validate() const {
  require(!n_max.empty(), "truncation needs at least one mode");
  for (int m : n_max) require(m >= 0, "n_max must be nonnegative");
  require(epsilon > 0.0 && epsilon < 1.0, "epsilon must lie in (0,1)");
  require(dimension() <= budget, "Fock dimension exceeds the configured budget");
}

FockState::FockState(FockTruncation trunc) : trunc_(std::move(trunc)) {
  trunc_.validate();
  coeffs_ = VectorXc::Zero(static_cast<Eigen::Index>(trunc_.dimension()));
}

FockState::FockState(FockTruncation trunc, VectorXc coefficients) : trunc_(std::move(trunc)), coeffs_(std::move(coefficients)) {
  trunc_.validate();
  require(static_cast<std::size_t>(coeffs_.size()) == trunc_.dimension(), "coefficient tensor shape mismatch");
}

FockState FockState::vacuum(const FockTruncation& trunc) {
  FockState s(trunc);
  s.coeffs_(0) = 1.0;
  return s;
}

FockState FockState::product(const FockTruncation& trunc, const std::vector<VectorXc>& factors) {
  FockState s(trunc);
  require(factors.size() == trunc.n_max.size(), "one factor per mode required");
  VectorXc acc = VectorXc::Ones(1);
  for (std::size_t m = 0; m < factors.size(); ++m) {
    require(factors[m].size() == trunc.n_max[m] + 1, "factor length must equal n_max + 1");
    VectorXc next(acc.size() * factors[m].size());
    for (Eigen::Index i = 0; i < acc.size(); ++i)
      for (Eigen::Index j = 0; j < factors[m].size(); ++j) next(i * factors[m].size() + j) = acc(i) * factors[m](j);
    acc = std::move(next);
  }
  s.coeffs_ = std::move(acc);
  return s;
}

void FockState::normalize() {
  const double n = coeffs_.norm();
  require(n > 0.0, "cannot normalize the zero tensor");
  coeffs_ /= n;
}

cplx FockState::inner(const FockState& other) const {
  require(other.coeffs_.size() == coeffs_.size(), "state shape mismatch");
  return coeffs_.dot(other.coeffs_);
}

FockState FockState::apply_mode(std::size_t mode, const MatrixXc& op) const {
  require(mode < modes(), "invalid mode index");
  require(op.rows() == levels(mode) && op.cols() == levels(mode), "operator size mismatch");
  std::vector<int> dims(trunc_.n_max.size());
  for (std::size_t m = 0; m < dims.size(); ++m) dims[m] = trunc_.n_max[m] + 1;
  return FockState(trunc_, apply_axis(coeffs_, dims, mode, op));
}

std::vector<int> FockState::occupations(std::size_t flat) const {
  std::vector<int> occ(trunc_.n_max.size());
  for (std::size_t m = occ.size(); m-- > 0;) {
    const int d = trunc_.n_max[m] + 1;
    occ[m] = static_cast<int>(flat % static_cast<std::size_t>(d));
    flat /= static_cast<std::size_t>(d);
  }
  return occ;
}

MatrixXc annihilation_matrix(int n_max, double scale) {
  require(n_max >= 0, "n_max must be nonnegative");
  MatrixXc b = MatrixXc::Zero(n_max + 1, n_max + 1);
  for (int n = 1; n <= n_max; ++n) b(n - 1, n) = scale * std::sqrt(static_cast<double>(n));
  return b;
}

FockState ladder_apply(const FockState& state, const ModeBasis& basis, std::size_t mode, Ladder kind) {
  require(mode < state.modes() && mode < basis.size(), "invalid mode index");
  MatrixXc b = annihilation_matrix(state.truncation().n_max[mode], std::sqrt(state.epsilon()));
  if (kind == Ladder::Create) b.adjointInPlace();
  return state.apply_mode(mode, b);
}

MatrixXc truncated_commutator(int n_max, double epsilon) {
  const MatrixXc a = annihilation_matrix(n_max, std::sqrt(epsilon));
  return a * a.adjoint() - a.adjoint() * a;
}

double dgamma_expectation(const FockState& state, const ModeBasis& basis, const Dispersion& disp, DGammaSymbol symbol) {
  require(state.modes() == basis.size(), "state/basis mode count mismatch");
  const double alpha = symbol == DGammaSymbol::One ? 0.0 : (symbol == DGammaSymbol::Omega ? 1.0 : 2.0);
  std::vector<double> w(basis.size());
  for (std::size_t m = 0; m < basis.size(); ++m) w[m] = disp.power(basis[m].k, alpha);
  double total = 0.0;
  const auto& c = state.coefficients();
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    const double p = std::norm(c(i));
    if (p == 0.0) continue;
    const auto occ = state.occupations(static_cast<std::size_t>(i));
    double e = 0.0;
    for (std::size_t m = 0; m < occ.size(); ++m) e += w[m] * occ[m];
    total += p * e;
  }
  return state.epsilon() * total / c.squaredNorm();
}

double dgamma2_expectation(const FockState& state, const ModeBasis& basis, const Dispersion& disp) {
  require(state.modes() == basis.size(), "state/basis mode count mismatch");
  const double eps = state.epsilon();
  std::vector<double> w(basis.size());
  for (std::size_t m = 0; m < basis.size(); ++m) w[m] = disp.omega(basis[m].k);
  double sq = 0.0, lin2 = 0.0;
  const auto& c = state.coefficients();
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    const double p = std::norm(c(i));
    if (p == 0.0) continue;
    const auto occ = state.occupations(static_cast<std::size_t>(i));
    double e = 0.0, e2 = 0.0;
    for (std::size_t m = 0; m < occ.size(); ++m) {
      e += w[m] * occ[m];
      e2 += w[m] * w[m] * occ[m];
    }
    sq += p * (eps * e) * (eps * e);
    lin2 += p * eps * e2;
  }
  return (sq - eps * lin2) / c.squaredNorm();
}

MatrixXc expi_hermitian(const MatrixXc& g) {
  Eigen::SelfAdjointEigenSolver<MatrixXc> es(g);
  const VectorXr& lam = es.eigenvalues();
  VectorXc phase(lam.size());
  for (Eigen::Index i = 0; i < lam.size(); ++i) phase(i) = std::exp(cplx(0.0, lam(i)));
  return es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
}

MatrixXc weyl_mode_matrix(int n_max, double epsilon, double cell, cplx eta) {
  const MatrixXc b = annihilation_matrix(n_max, std::sqrt(epsilon * cell));
  const MatrixXc g = eta * b.adjoint() + std::conj(eta) * b;
  return expi_hermitian(g);
}

WeylResult weyl_expectation_fock(const FockState& state, const ModeBasis& basis, const std::vector<cplx>& eta, double tail_tol) {
  require(state.modes() == basis.size() && eta.size() == basis.size(), "Weyl argument must have one entry per mode");
  const auto& nm = state.truncation().n_max;
  const double eps = state.epsilon();
  const std::size_t budget = state.truncation().budget;

  for (int attempt = 0; attempt < 4; ++attempt) {
    std::vector<int> padded(nm.size());
    for (std::size_t m = 0; m < nm.size(); ++m) {
      const double g = std::sqrt(eps * basis[m].cell) * std::abs(eta[m]);
      const int extra = static_cast<int>(std::ceil(g * g + 8.0 * g * std::sqrt(nm[m] + 1.0) + 10.0)) << attempt;
      padded[m] = nm[m] + 1 + (g == 0.0 ? 0 : extra);
    }
    require(product_of(padded) <= budget, "padded Weyl tensor exceeds the budget", ErrorKind::Solver);

    // embed the state into the padded tensor
    VectorXc x = VectorXc::Zero(static_cast<Eigen::Index>(product_of(padded)));
    const auto& c = state.coefficients();
    for (Eigen::Index i = 0; i < c.size(); ++i) {
      if (c(i) == cplx(0.0)) continue;
      const auto occ = state.occupations(static_cast<std::size_t>(i));
      std::size_t flat = 0;
      for (std::size_t m = 0; m < occ.size(); ++m) flat = flat * static_cast<std::size_t>(padded[m]) + static_cast<std::size_t>(occ[m]);
      x(static_cast<Eigen::Index>(flat)) = c(i);
    }
    const VectorXc x0 = x;

    double unitarity = 0.0;
    for (std::size_t m = 0; m < nm.size(); ++m) {
      if (eta[m] == cplx(0.0)) continue;
      const MatrixXc u = weyl_mode_matrix(padded[m] - 1, eps, basis[m].cell, eta[m]);
      unitarity = std::max(unitarity, (u.adjoint() * u - MatrixXc::Identity(u.rows(), u.cols())).norm());
      x = apply_axis(x, padded, m, u);
    }

    // mass in the top guard band of each padded mode
    double guard = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
      const double p = std::norm(x(i));
      if (p == 0.0) continue;
      std::size_t flat = static_cast<std::size_t>(i);
      bool in_guard = false;
      for (std::size_t m = padded.size(); m-- > 0;) {
        const int occ = static_cast<int>(flat % static_cast<std::size_t>(padded[m]));
        flat /= static_cast<std::size_t>(padded[m]);
        const int band = std::max(2, (padded[m] - nm[m] - 1) / 4);
        if (padded[m] > nm[m] + 1 && occ >= padded[m] - band) in_guard = true;
      }
      if (in_guard) guard += p;
    }
    const double tail = std::sqrt(guard);
    if (tail <= tail_tol) return {x0.dot(x) / c.squaredNorm(), tail, unitarity};
  }
  fail(ErrorKind::Solver, "Weyl expectation truncation tail exceeds tolerance");
}

double poisson_tail(double mean, int n) {
  if (mean <= 0.0) return 0.0;
  // sum_{j > n} e^{-mean} mean^j / j!, summed upward until negligible
  double tail = 0.0;
  for (int j = n + 1;; ++j) {
    const double lp = -mean + j * std::log(mean) - std::lgamma(j + 1.0);
    const double p = std::exp(lp);
    tail += p;
    if (j > mean && p < 1e-30 * std::max(tail, 1e-300)) break;
    if (j > n + 100000) break;
  }
  return tail;
}

int poisson_cutoff(double mean, double tol) {
  if (mean <= 0.0) return 0;
  int n = static_cast<int>(std::floor(mean));
  while (n > 0 && poisson_tail(mean, n - 1) < tol) --n;
  while (poisson_tail(mean, n) >= tol) ++n;
  return n;
}

VectorXc coherent_vector(cplx beta, int n_max) {
  VectorXc v(n_max + 1);
  v(0) = std::exp(-0.5 * std::norm(beta));
  for (int n = 1; n <= n_max; ++n) v(n) = v(n - 1) * beta / std::sqrt(static_cast<double>(n));
  return v;
}

VectorXc displaced_one_vector(cplx beta, int n_max) {
  const VectorXc c = coherent_vector(beta, n_max);
  VectorXc v(n_max + 1);
  for (int n = 0; n <= n_max; ++n) {
    const cplx up = n > 0 ? std::sqrt(static_cast<double>(n)) * c(n - 1) : cplx(0.0);
    v(n) = up - std::conj(beta) * c(n);
  }
  return v;
}

VectorXc squeezed_vacuum_vector(double r, double phi, int n_max) {
  VectorXc v = VectorXc::Zero(n_max + 1);
  const cplx t = -std::exp(cplx(0.0, phi)) * std::tanh(r);
  v(0) = 1.0 / std::sqrt(std::cosh(r));
  for (int n = 2; n <= n_max; n += 2) v(n) = v(n - 2) * t * std::sqrt(static_cast<double>(n) * (n - 1)) / static_cast<double>(n);
  return v;
}

VectorXc displace_vector(const VectorXc& v, cplx beta, int n_max_out, double* tail) {
  const double a = std::abs(beta);
  const int n_in = static_cast<int>(v.size()) - 1;
  const int work = std::max(n_max_out, n_in) + static_cast<int>(std::ceil(a * a + 10.0 * a + 30.0));
  const MatrixXc b = annihilation_matrix(work);
  // D = exp(beta b^* - conj(beta) b) = exp(i G), G = -i (beta b^* - conj(beta) b)
  const MatrixXc g = cplx(0.0, -1.0) * (beta * b.adjoint() - std::conj(beta) * b);
  const MatrixXc d = expi_hermitian(g);
  VectorXc padded = VectorXc::Zero(work + 1);
  padded.head(v.size()) = v;
  const VectorXc out = d * padded;
  if (tail) *tail = out.tail(work - n_max_out).squaredNorm();
  return out.head(n_max_out + 1);
}

}  // namespace qclim
