#pragma once

#include <string>
#include <vector>

#include "qclim/families.hpp"
#include "qclim/mode_basis.hpp"
#include "qclim/particle_grid.hpp"
#include "qclim/types.hpp"

namespace qclim {

enum class CouplingKind { NelsonScalar, PauliFierzVector };

struct AuditItem {
  std::string name;
  double value = 0.0;
  double extended = 0.0;  // same functional on the doubled grid
  bool passed = true;
  std::string detail;
};

/// UV function, dispersion and coupling type; w(k, lambda) = chi(k) omega(k)^{-1/2} e_lambda(k).
struct CouplingSpec {
  Cutoff chi = Cutoff::one();
  Dispersion dispersion = Dispersion::massless();
  CouplingKind kind = CouplingKind::NelsonScalar;

  /// Scalar weight chi(k) omega(k)^{-1/2}.
  double weight(const Vec3& k) const { return chi(k, dispersion) / std::sqrt(dispersion.omega(k)); }
  /// Vector weight for a mode: scalar weight times e_lambda (Nelson modes get (w, 0, 0)).
  Vec3 vector_weight(const Mode& m) const;

  /// A_omega, A_chi, A'_chi proxies on nested spherical grids (extent R and 2R).
  std::vector<AuditItem> audit(double extent = 32.0) const;
  /// Throws an Assumption error naming the failed functional.
  void require_grade(CouplingKind needed, double extent = 32.0) const;
};

enum class PotentialKind { ScalarV, VectorA, ScalarW, VectorB };

/// Finite plane-wave series sum_j a_j e^{i q_j . x}; scalar series use component 0.
struct PlaneWaveSeries {
  std::vector<Vec3> q;
  std::vector<CVec3> a;
  int components = 1;

  void add(const Vec3& qv, const CVec3& av);
  /// Merges terms with equal wave vectors (keys rounded to 1e-9) into a deterministic order.
  void merge();
  CVec3 eval(const Vec3& x) const;
  PlaneWaveSeries curl() const;
  PlaneWaveSeries divergence() const;
  PlaneWaveSeries operator-(const PlaneWaveSeries& o) const;
  PlaneWaveSeries component(int c) const;
  double coefficient_sup() const;
};

struct EffectivePotential {
  PotentialKind kind = PotentialKind::ScalarV;
  PlaneWaveSeries series;
  std::string provenance = "from_measure";
  double epsilon = 0.0;

  int components() const { return series.components; }
  /// Samples of one component at the given points; imaginary parts above tol are an error.
  std::vector<double> sample(const std::vector<Vec3>& pts, int component = 0, double tol = 1e-10) const;
  double max_imag(const std::vector<Vec3>& pts) const;
  Multiplier multiplier(const ParticleGrid& grid, int component = 0) const;
  EffectivePotential operator-(const EffectivePotential& o) const;
};

struct WParts {
  EffectivePotential total, aa, adad, ada;  // W = W_{a*a*} + W_{aa} + 2 W_{a*a}
};

/// Builders from mode moments; the family/measure entry points route through these.
EffectivePotential v_from_moments(const Moments& mo, const ModeBasis& basis, const CouplingSpec& c);
EffectivePotential a_from_moments(const Moments& mo, const ModeBasis& basis, const CouplingSpec& c);
WParts w_from_moments(const Moments& mo, const ModeBasis& basis, const CouplingSpec& c);

EffectivePotential v_eps(const FieldStateFamily& family, double eps, const CouplingSpec& c);
EffectivePotential v_mu(const WignerMeasure& mu, const ModeBasis& basis, const CouplingSpec& c);
EffectivePotential a_eps(const FieldStateFamily& family, double eps, const CouplingSpec& c);
EffectivePotential a_mu(const WignerMeasure& mu, const ModeBasis& basis, const CouplingSpec& c);
WParts w_eps(const FieldStateFamily& family, double eps, const CouplingSpec& c);
EffectivePotential w_mu(const WignerMeasure& mu, const ModeBasis& basis, const CouplingSpec& c);
/// Analytic curl of a vector series, coefficient i q x a.
EffectivePotential b_of(const EffectivePotential& a);

/// Spectral curl of sampled vector components on a periodic grid (finite differences with
/// one-sided boundary stencils on Dirichlet grids). Input/output: 3 component arrays on grid nodes.
std::array<std::vector<double>, 3> curl_of(const std::array<std::vector<double>, 3>& a, const ParticleGrid& grid);
/// Max spectral divergence of node samples (periodic grids).
double divergence_residual(const std::array<std::vector<double>, 3>& b, const ParticleGrid& grid);

/// eps * sum over (k, lambda) modes of cell chi^2 / omega (= 2 eps sum_k for two polarizations).
double wick_constant(const ModeBasis& basis, const CouplingSpec& c, double eps);
/// <Omega, A(x).A(x) Omega> - <Omega, :A(x).A(x): Omega> on a truncated Fock vacuum (n_max per mode).
double wick_vacuum_gap(const ModeBasis& basis, const CouplingSpec& c, double eps, const Vec3& x, int n_max = 2);

/// <psi, V phi> = h^d sum V conj(psi) phi on the grid nodes.
cplx pairing_pointwise(const EffectivePotential& v, const VectorXc& psi, const VectorXc& phi, const ParticleGrid& grid,
                       int component = 0);
/// sum_j a_j R(q_j) with R(q) = h^d sum e^{iqx} conj(psi) phi, by FFT for lattice q.
cplx pairing_fourier(const EffectivePotential& v, const VectorXc& psi, const VectorXc& phi, const ParticleGrid& grid,
                     int component = 0);

/// Raw little-endian float64 samples (component-major, grid nodes) plus a JSON metadata sidecar.
void export_potential(const std::string& path_prefix, const EffectivePotential& v, const ParticleGrid& grid,
                      const std::string& coupling_name, const std::string& config_hash);

std::string to_string(PotentialKind k);

}  // namespace qclim
