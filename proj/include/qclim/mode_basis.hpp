#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qclim/types.hpp"

namespace qclim {

/// One discretized field mode: a k-space cell with its Riemann measure and an optional
/// transverse polarization index (1 or 2, 0 meaning scalar field).
struct Mode {
  Vec3 k{0.0, 0.0, 0.0};
  double cell = 1.0;
  int polarization = 0;
};

/// Finite discretization of the one-excitation space. Continuum integrals become
/// sum_m cell_m f(k_m), and the mode operator A_m = sqrt(cell_m) a_eps(k_m) carries the
/// discrete CCR [A_m, A_n^*] = eps delta_mn.
class ModeBasis {
 public:
  ModeBasis() = default;
  ModeBasis(std::vector<Mode> modes, int dimension);

  /// Modes k = 2 pi n / L along the x axis for the given integers n (scalar field).
  static ModeBasis lattice_1d(double box_length, const std::vector<int>& n_values);
  /// Same as lattice_1d but every k carries both transverse polarizations.
  static ModeBasis lattice_1d_polarized(double box_length, const std::vector<int>& n_values);
  /// Cell-centred cubic grid in d dimensions, spacing h, |k_i| <= extent, with the origin
  /// excluded automatically (cells never sit at k = 0). Optional radial cap |k| <= k_cap.
  static ModeBasis cubic(int dimension, double spacing, double extent, bool polarized,
                         std::optional<double> k_cap = std::nullopt);

  std::size_t size() const { return modes_.size(); }
  const Mode& operator[](std::size_t i) const { return modes_[i]; }
  const std::vector<Mode>& modes() const { return modes_; }
  int dimension() const { return dimension_; }
  bool polarized() const;
  double total_measure() const;

  /// Grid inner product <f, g> = sum_m cell_m conj(f_m) g_m on continuum densities.
  cplx inner(const std::vector<cplx>& f, const std::vector<cplx>& g) const;
  double norm2(const std::vector<cplx>& f) const { return inner(f, f).real(); }

 private:
  void validate() const;
  std::vector<Mode> modes_;
  int dimension_ = 3;
};

enum class DispersionKind { Massless, Massive };

/// Field dispersion omega(k): |k| or sqrt(k^2 + m^2).
struct Dispersion {
  DispersionKind kind = DispersionKind::Massless;
  double mass = 0.0;

  static Dispersion massless() { return {DispersionKind::Massless, 0.0}; }
  static Dispersion massive(double m) { return {DispersionKind::Massive, m}; }

  double omega(const Vec3& k) const;
  double power(const Vec3& k, double alpha) const { return std::pow(omega(k), alpha); }
  /// Checks omega > 0 on every grid point and returns min over the outer shell of omega/|k|.
  double check_on(const ModeBasis& basis) const;
  std::string name() const;
};

enum class CutoffKind { One, Sharp, Smooth, Omega };

/// Ultraviolet function chi(k). Omega (chi = omega) exists to exercise the assumption audit.
struct Cutoff {
  CutoffKind kind = CutoffKind::One;
  double lambda = 0.0;
  double width = 1.0;

  static Cutoff one() { return {CutoffKind::One, 0.0, 1.0}; }
  static Cutoff sharp(double lambda) { return {CutoffKind::Sharp, lambda, 1.0}; }
  static Cutoff smooth(double lambda, double width) { return {CutoffKind::Smooth, lambda, width}; }
  static Cutoff omega_like() { return {CutoffKind::Omega, 0.0, 1.0}; }

  double operator()(const Vec3& k, const Dispersion& disp) const;
  std::string name() const;
};

/// Transverse polarization frame: e1 = normalize(k x z), e2 = normalize(k x e1), with
/// (x, y) as fallback when k is (anti)parallel to z.
struct PolarizationFrame {
  static Vec3 e(const Vec3& k, int polarization);
  /// Largest deviation from orthonormality of (e1, e2, k/|k|) over the basis.
  static double orthonormality_defect(const ModeBasis& basis);
};

}  // namespace qclim
