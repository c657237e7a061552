#pragma once

#include <functional>
#include <string>
#include <vector>

#include "qclim/types.hpp"

namespace qclim {

enum class Boundary { Periodic, Dirichlet };

/// Uniform particle grid on [-L/2, L/2)^d. Periodic: x_i = -L/2 + i h, h = L/n.
/// Dirichlet: interior nodes x_i = -L/2 + (i+1) h, h = L/(n+1).
struct ParticleGrid {
  int d = 1;
  int n = 64;
  double length = 10.0;
  Boundary boundary = Boundary::Periodic;
  int spinor = 1;

  void validate(std::size_t budget = std::size_t{1} << 22) const;
  double spacing() const { return boundary == Boundary::Periodic ? length / n : length / (n + 1); }
  double cell() const { return std::pow(spacing(), d); }
  std::size_t points() const;
  std::size_t dimension() const { return points() * static_cast<std::size_t>(spinor); }
  std::vector<int> dims() const { return std::vector<int>(static_cast<std::size_t>(d), n); }
  Vec3 point(std::size_t flat) const;
  /// Momentum vector of a spectral index (periodic grids; linear symbol, Nyquist index -> -n/2).
  Vec3 momentum(std::size_t flat) const;
  /// The 2x oversampled periodic grid used for dealiased products.
  ParticleGrid fine() const;
  ParticleGrid scalar() const;
  /// <f, g> = h^d sum conj(f) g.
  cplx inner(const VectorXc& f, const VectorXc& g) const { return cell() * f.dot(g); }
  double norm(const VectorXc& f) const { return std::sqrt(inner(f, f).real()); }
};

/// Multiplication by a function on a scalar grid. Periodic grids: Galerkin product (the function is
/// sampled on the 2x oversampled grid; exact for potentials band-limited there). Dirichlet: pointwise.
class Multiplier {
 public:
  Multiplier() = default;
  Multiplier(const ParticleGrid& grid, const std::function<cplx(const Vec3&)>& f);
  /// From samples already on the evaluation grid (fine grid for periodic, nodes for Dirichlet).
  Multiplier(const ParticleGrid& grid, std::vector<cplx> samples);

  VectorXc apply(const VectorXc& psi) const;
  const std::vector<cplx>& samples() const { return samples_; }
  bool is_real(double tol = 1e-10) const;
  double sup_abs() const;
  Multiplier abs() const;
  Multiplier scaled(double s) const;

 private:
  ParticleGrid grid_;
  std::vector<cplx> samples_;
};

/// Sample points where a Multiplier evaluates its function on this grid.
std::vector<Vec3> evaluation_points(const ParticleGrid& grid);

/// p_axis psi by the spectral symbol (periodic) or central differences (Dirichlet).
VectorXc momentum_apply(const ParticleGrid& grid, int axis, const VectorXc& psi);
/// -Laplacian: spectral |kappa|^2 (periodic) or the 2nd-order stencil with zero boundary (Dirichlet).
VectorXc laplacian_apply(const ParticleGrid& grid, const VectorXc& psi);
/// f(-Laplacian) on a periodic grid by spectral calculus; f receives |kappa|^2.
VectorXc spectral_function_apply(const ParticleGrid& grid, const VectorXc& psi, const std::function<double(double)>& f);
/// Eigenvalues of the discrete -Laplacian, indexed like the grid.
std::vector<double> laplacian_symbol(const ParticleGrid& grid);

enum class ExternalKind { Zero, Harmonic, CoulombRegularized, CustomTable };

/// External potential U with U = U_plus - U_minus.
struct ExternalPotential {
  ExternalKind kind = ExternalKind::Zero;
  double strength = 1.0;   // harmonic: U = strength |x|^2; coulomb: U = -strength / sqrt(|x|^2 + a^2)
  double softening = 1.0;  // a
  std::vector<double> table;  // custom table on the particle grid nodes

  static ExternalPotential zero() { return {}; }
  static ExternalPotential harmonic(double s = 1.0) { return {ExternalKind::Harmonic, s, 1.0, {}}; }
  static ExternalPotential coulomb(double z, double a) { return {ExternalKind::CoulombRegularized, z, a, {}}; }
  static ExternalPotential custom(std::vector<double> values) { return {ExternalKind::CustomTable, 1.0, 1.0, std::move(values)}; }

  std::string name() const;
  bool confining() const { return kind == ExternalKind::Harmonic && strength > 0.0; }
  /// U on the evaluation points of the grid.
  std::vector<double> sample(const ParticleGrid& grid) const;
  Multiplier u_plus(const ParticleGrid& grid) const;
  Multiplier u_minus(const ParticleGrid& grid) const;
  Multiplier total(const ParticleGrid& grid) const;
};

ExternalKind external_kind_from_string(const std::string& s);

}  // namespace qclim
