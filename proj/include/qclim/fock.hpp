#pragma once

#include <cstddef>
#include <vector>

#include "qclim/mode_basis.hpp"
#include "qclim/types.hpp"

namespace qclim {

/// Per-mode occupation caps and the semiclassical parameter eps of the rescaled CCR.
struct FockTruncation {
  std::vector<int> n_max;
  double epsilon = 0.1;
  std::size_t budget = 4'000'000;

  std::size_t dimension() const;
  void validate() const;
};

/// Dense coefficient tensor over per-mode occupation numbers (row-major, last mode fastest).
class FockState {
 public:
  FockState() = default;
  explicit FockState(FockTruncation trunc);  // zero tensor of the right shape
  FockState(FockTruncation trunc, VectorXc coefficients);

  static FockState vacuum(const FockTruncation& trunc);
  /// Tensor product of per-mode vectors (each of length n_max(m) + 1).
  static FockState product(const FockTruncation& trunc, const std::vector<VectorXc>& factors);

  const FockTruncation& truncation() const { return trunc_; }
  const VectorXc& coefficients() const { return coeffs_; }
  VectorXc& coefficients() { return coeffs_; }
  std::size_t modes() const { return trunc_.n_max.size(); }
  int levels(std::size_t mode) const { return trunc_.n_max[mode] + 1; }
  double epsilon() const { return trunc_.epsilon; }

  double norm() const { return coeffs_.norm(); }
  void normalize();
  cplx inner(const FockState& other) const;

  /// Applies a (levels x levels) matrix on one mode axis.
  FockState apply_mode(std::size_t mode, const MatrixXc& op) const;
  /// Occupation numbers of the flat index.
  std::vector<int> occupations(std::size_t flat) const;

 private:
  FockTruncation trunc_;
  VectorXc coeffs_;
};

enum class Ladder { Create, Annihilate };

/// Truncated single-mode annihilation matrix b with b(n-1, n) = sqrt(n), scaled by `scale`.
MatrixXc annihilation_matrix(int n_max, double scale = 1.0);

/// Mode operator A_m = sqrt(eps) b or its adjoint (A_m = sqrt(cell) a_eps(k_m)); the top level is truncated to zero.
FockState ladder_apply(const FockState& state, const ModeBasis& basis, std::size_t mode, Ladder kind);

/// Commutator [a, a^*] of the truncated, eps-scaled single-mode ladder matrices.
MatrixXc truncated_commutator(int n_max, double epsilon);

enum class DGammaSymbol { One, Omega, OmegaSquared };

/// <Psi, dGamma_eps(omega^alpha) Psi> = eps sum_m omega_m^alpha <n_m>.
double dgamma_expectation(const FockState& state, const ModeBasis& basis, const Dispersion& disp, DGammaSymbol symbol);
/// <Psi, dGamma^(2)_eps(omega x omega) Psi> = <dGamma(omega)^2> - eps <dGamma(omega^2)>.
double dgamma2_expectation(const FockState& state, const ModeBasis& basis, const Dispersion& disp);

/// Result of a truncated Weyl-operator expectation together with its truncation diagnostics.
struct WeylResult {
  cplx value;
  double tail_estimate = 0.0;
  double unitarity_defect = 0.0;
};

/// <Psi, W_eps(eta) Psi>, W_eps(eta) = exp(i(a^*(eta) + a(eta))), with per-mode matrix
/// exponentials on padded occupation spaces. Throws when the tail estimate exceeds `tail_tol`.
WeylResult weyl_expectation_fock(const FockState& state, const ModeBasis& basis, const std::vector<cplx>& eta,
                                 double tail_tol = 1e-9);

/// Single-mode Weyl matrix exp(i sqrt(eps cell)(eta b^* + conj(eta) b)) on n_max + 1 levels.
MatrixXc weyl_mode_matrix(int n_max, double epsilon, double cell, cplx eta);

/// exp(i G) for Hermitian G.
MatrixXc expi_hermitian(const MatrixXc& g);

// --- single-mode building blocks for the constructed families ---

/// Smallest n with Poisson tail P(N > n) < tol for mean `mean`.
int poisson_cutoff(double mean, double tol);
/// P(N > n) for Poisson(mean).
double poisson_tail(double mean, int n);
/// Coherent amplitudes e^{-|beta|^2/2} beta^n / sqrt(n!), n = 0..n_max.
VectorXc coherent_vector(cplx beta, int n_max);
/// Columns D(beta)|0> and D(beta)|1> truncated to n_max.
VectorXc displaced_one_vector(cplx beta, int n_max);
/// S(xi)|0> with xi = r e^{i phi}, truncated to n_max.
VectorXc squeezed_vacuum_vector(double r, double phi, int n_max);
/// D(beta) applied to a truncated vector, computed on a padded space and cut back.
/// `tail` receives the mass discarded by the cut.
VectorXc displace_vector(const VectorXc& v, cplx beta, int n_max_out, double* tail = nullptr);

}  // namespace qclim
