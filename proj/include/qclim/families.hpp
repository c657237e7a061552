#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qclim/fock.hpp"
#include "qclim/mode_basis.hpp"
#include "qclim/types.hpp"

namespace qclim {

/// Finitely-atomic probability measure sum_i w_i delta_{z_i}; atoms are continuum densities z(k_m).
struct WignerMeasure {
  std::vector<std::vector<cplx>> atoms;
  std::vector<double> weights;

  static WignerMeasure dirac(std::vector<cplx> z);
  void validate(const ModeBasis& basis, const Dispersion& disp) const;
  /// mu_hat(eta) = sum_i w_i exp(2i Re<eta, z_i>).
  cplx characteristic(const ModeBasis& basis, const std::vector<cplx>& eta) const;
};

enum class FamilyKind { Vacuum, Coherent, ExcitedCoherent, GaussianSqueezed, Cat };
enum class Backend { FockExact, ClosedForm };
/// Uniform-energy class: Nelson needs <1 + dGamma(omega)>, PF additionally <dGamma^(2)>.
enum class EnergyGrade { Nelson, PauliFierz };

std::string to_string(FamilyKind k);
FamilyKind family_kind_from_string(const std::string& s);

struct FamilySpec {
  FamilyKind kind = FamilyKind::Vacuum;
  std::vector<cplx> z0;            // coherent centre (all kinds but vacuum)
  std::vector<cplx> g;             // excited_coherent correction direction
  std::vector<cplx> z1;            // second branch of a cat state
  std::vector<double> squeeze_r;   // gaussian_squeezed, per mode
  std::vector<double> squeeze_phi;
  EnergyGrade grade = EnergyGrade::PauliFierz;
};

/// Mode-operator moments, A_m = sqrt(cell_m) a_eps(k_m):
/// m1_m = <A_m>, m2_aa(m,n) = <A_m A_n>, m2_ada(m,n) = <A_m^* A_n>.
struct Moments {
  VectorXc m1;
  MatrixXc m2_aa;
  MatrixXc m2_ada;

  /// Continuum-density views <a_eps(k)>, <a_eps(k) a_eps(k')>, <a_eps^*(k) a_eps(k')>.
  cplx density_m1(const ModeBasis& b, std::size_t m) const;
  cplx density_m2_aa(const ModeBasis& b, std::size_t m, std::size_t n) const;
  cplx density_m2_ada(const ModeBasis& b, std::size_t m, std::size_t n) const;
  /// max |m2_ada - m2_ada^*|, zero for a consistent moment set.
  double hermiticity_defect() const;
};

struct EnergyMoments {
  double number = 0.0;       // <dGamma(1)>
  double dgamma_omega = 0.0; // <dGamma(omega)>
  double dgamma_omega2 = 0.0;
  double dgamma2 = 0.0;      // <dGamma^(2)(omega x omega)>
};

struct FockBuild {
  FockState state;
  double tail = 0.0;  // discarded probability mass (before renormalization)
};

class FieldStateFamily {
 public:
  FieldStateFamily(FamilySpec spec, ModeBasis basis, Dispersion disp);

  const FamilySpec& spec() const { return spec_; }
  const ModeBasis& basis() const { return basis_; }
  const Dispersion& dispersion() const { return disp_; }
  std::optional<WignerMeasure> declared_limit() const;

  /// Throws Domain when the family is inadmissible at this eps.
  void check_admissible(double eps) const;

  Moments moments(double eps) const;
  /// <A_i^* A_j^* A_i A_j>, the normal-ordered quartic moment.
  cplx quartic(double eps, std::size_t i, std::size_t j) const;
  EnergyMoments energy(double eps) const;
  cplx weyl(const std::vector<cplx>& eta, double eps) const;

  /// Truncated Fock realization; per-mode caps from the Poisson tail policy.
  /// A discarded mass above tail_tol is a hard error.
  FockBuild fock_state(double eps, double tail_tol = 1e-13, std::size_t budget = 4'000'000) const;

 private:
  struct Derived {
    std::vector<cplx> alpha;  // sqrt(c) z0
    std::vector<cplx> u;      // eps sqrt(c) g
    std::vector<cplx> ghat;
    double c = 1.0, s = 0.0;  // cos/sin of the excitation angle
  };
  Derived derive(double eps) const;
  std::vector<cplx> padded(const std::vector<cplx>& v) const;

  FamilySpec spec_;
  ModeBasis basis_;
  Dispersion disp_;
};

FieldStateFamily build_family(const FamilySpec& spec, const ModeBasis& basis, const Dispersion& disp);

/// Moments evaluated by ladder contractions on a truncated Fock state.
Moments fock_moments(const FockState& state, const ModeBasis& basis);

/// Smeared a^*(f) = sum sqrt(c) f_m A_m^* or a(f) = sum sqrt(c) conj(f_m) A_m.
FockState smeared_apply(const FockState& state, const ModeBasis& basis, const std::vector<cplx>& f, Ladder kind);

/// <Psi_eps, W_eps(eta) Psi_eps> from either backend.
cplx weyl_expectation(const FieldStateFamily& family, const std::vector<cplx>& eta, double eps, Backend backend,
                      double tail_tol = 1e-11);

/// <prod_i a^*(creators_i) prod_j a(annihilators_j)>. Degree limited by the family's energy grade.
cplx wick_monomial_expectation(const FieldStateFamily& family, const std::vector<std::vector<cplx>>& creators,
                               const std::vector<std::vector<cplx>>& annihilators, double eps,
                               Backend backend = Backend::ClosedForm);
/// sum_i w_i prod <z_i, g> prod <g', z_i>.
cplx classical_symbol_integral(const WignerMeasure& mu, const ModeBasis& basis,
                               const std::vector<std::vector<cplx>>& creators,
                               const std::vector<std::vector<cplx>>& annihilators);

}  // namespace qclim
