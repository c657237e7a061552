#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "qclim/particle_grid.hpp"
#include "qclim/potentials.hpp"

namespace qclim {

enum class PartTag { Kinetic, UPlus, UMinus, V, ACross, W, SigmaB };
/// PauliProduct: -sum_ij sigma_i sigma_j (P_i A_j + A_i P_j). Split: -(P.A + A.P) - sigma.B.
enum class PauliRoute { PauliProduct, Split };

std::string to_string(PartTag t);

/// Hermitian form on a particle grid, kept as tagged parts and applied matrix-free.
/// Spinor vectors are component-major: [psi_up ; psi_down].
class QuadraticForm {
 public:
  QuadraticForm() = default;
  explicit QuadraticForm(ParticleGrid grid);

  const ParticleGrid& grid() const { return grid_; }
  std::size_t dimension() const { return grid_.dimension(); }
  std::vector<PartTag> tags() const;

  void add_scalar(PartTag tag, Multiplier m, double sign = 1.0);
  void set_vector_potential(std::array<Multiplier, 3> a, std::array<Multiplier, 3> b, PauliRoute route);

  VectorXc apply(const VectorXc& psi) const;
  VectorXc apply_part(PartTag tag, const VectorXc& psi) const;
  /// Q[x, y] = <x, H y> with the grid inner product.
  cplx form(const VectorXc& x, const VectorXc& y) const { return grid_.inner(x, apply(y)); }
  double energy(const VectorXc& x) const { return form(x, x).real(); }

  MatrixXc to_dense() const;
  MatrixXc part_dense(PartTag tag) const;
  double hermiticity_defect() const;
  /// Diagonal in the node basis (used for Jacobi preconditioning).
  VectorXr diagonal() const;
  /// "# qclim-triplets v1" header, then "row col re im" for entries with |value| > drop.
  std::string triplets(double drop = 0.0) const;

 private:
  VectorXc apply_scalar_parts(const VectorXc& psi, std::optional<PartTag> only) const;
  VectorXc apply_pauli(const VectorXc& psi, bool cross, bool sigma_b) const;

  ParticleGrid grid_;
  std::vector<std::pair<PartTag, Multiplier>> scalars_;
  bool has_vector_ = false;
  std::array<Multiplier, 3> a_;
  std::array<Multiplier, 3> b_;
  PauliRoute route_ = PauliRoute::Split;
};

/// -Laplacian + U_plus - U_minus + V.
QuadraticForm assemble_nelson(const ParticleGrid& grid, const ExternalPotential& u, const Multiplier* v);
QuadraticForm assemble_nelson(const ParticleGrid& grid, const ExternalPotential& u, const EffectivePotential* v);

/// P^2 - (P.A + A.P) - sigma.B + W + U. When B is supplied it must match the spectral curl of A
/// within b_tolerance; otherwise the spectral curl is used.
QuadraticForm assemble_pauli(const ParticleGrid& grid, const ExternalPotential& u, const EffectivePotential* a,
                             const EffectivePotential* w, const EffectivePotential* b,
                             PauliRoute route = PauliRoute::Split, double b_tolerance = 1e-8);

}  // namespace qclim
