#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "qclim/types.hpp"

namespace qclim {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Standard: p^{1/q} (int_0^inf (t d_f(t)^{1/p})^q dt/t)^{1/q}.
/// WeakP: same integral with prefactor p (the weak-norm convention that yields 3^{2/3}(4 pi)^{1/3}).
enum class LorentzConvention { Standard, WeakP };

struct LorentzIndex {
  double p = 2.0;
  double q = 2.0;  // kInf allowed
  void validate() const;
};

struct SampledFunction {
  std::vector<cplx> values;
  std::vector<double> cells;
  int dimension = 3;

  static SampledFunction uniform(std::vector<cplx> values, double cell, int dimension);
  void validate() const;
  double measure() const;
};

/// Exact layer-cake evaluation over the sorted sample levels.
double quasinorm(const SampledFunction& f, const LorentzIndex& idx, LorentzConvention conv = LorentzConvention::Standard);
double lp_norm(const SampledFunction& f, double p);

/// Cells of a spherical-coordinates grid on the shell r_min <= |k| <= r_max: geometric radial
/// shells, equal-measure polar cells, uniform azimuth. Samples sit at the geometric-mean radius.
struct PointCloud {
  std::vector<Vec3> points;
  std::vector<double> cells;
};
PointCloud spherical_grid(double r_min, double r_max, int n_r, int n_theta, int n_phi);

/// ||1/|k| ||_{L^{3,inf}} (WeakP convention) on an n^3 spherical grid over [R/10, R].
double weak_norm_inverse_k(int n);
inline double weak_norm_inverse_k_exact() { return std::pow(3.0, 2.0 / 3.0) * std::cbrt(4.0 * kPi); }

/// Periodic box [-L/2, L/2)^d with n points per axis, x_i = -L/2 + i h.
struct BoxGrid {
  int d = 3;
  int n = 16;
  double length = 12.0;

  double spacing() const { return length / n; }
  double cell() const { return std::pow(spacing(), d); }
  std::size_t size() const;
  std::vector<int> dims() const { return std::vector<int>(static_cast<std::size_t>(d), n); }
  Vec3 point(std::size_t flat) const;
};

struct RatioReport {
  double ratio = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool degenerate = false;
};

/// ||f1 f2||_{p,q} / (||f1||_{p1,q1} ||f2||_{p2,q2}) with 1/p = 1/p1 + 1/p2, 1/q <= 1/q1 + 1/q2.
RatioReport holder_check(const SampledFunction& f1, const SampledFunction& f2, const LorentzIndex& i1,
                         const LorentzIndex& i2, const LorentzIndex& out);
/// ||f1 * f2||_{p,q} / (||f1|| ||f2||) with 1 + 1/p = 1/p1 + 1/p2, convolution on the zero-padded box.
RatioReport young_check(const std::vector<cplx>& f1, const std::vector<cplx>& f2, const BoxGrid& grid,
                        const LorentzIndex& i1, const LorentzIndex& i2, const LorentzIndex& out);

/// Unitary-convention Fourier samples F(psi)(k_m) on the reciprocal lattice k = 2 pi m / L.
SampledFunction fourier_samples(const std::vector<cplx>& psi, const BoxGrid& grid);
/// || |k|^alpha F psi ||_{L^2}, zero mode carrying weight |0|^alpha (excluded for alpha > 0).
double homogeneous_sobolev_norm(const std::vector<cplx>& psi, const BoxGrid& grid, double alpha);
/// ||F(psi1 psi2)||_{L^{p,2}} / (||psi1||_{H^a1} ||psi2||_{H^a2}), 1/p = (a1 + a2)/d.
RatioReport sobolev_fourier_product_ratio(const std::vector<cplx>& psi1, const std::vector<cplx>& psi2, double alpha1,
                                          double alpha2, const BoxGrid& grid);

/// Seeded Gaussian mixture sampled on the box; the same (seed, member) gives the same profile on every grid.
std::vector<cplx> gaussian_mixture(const BoxGrid& grid, std::uint64_t seed, int member, bool complex_phase = false);

struct CorpusSpec {
  std::string corpus_id = "gm";
  std::uint64_t seed = 1;
  int members = 8;
  std::vector<int> grid_sizes{16, 24, 32};
  double box = 12.0;
};

struct CorpusRow {
  std::string corpus_id;
  std::string lemma_id;
  int grid_size = 0;
  double ratio_max = 0.0;
  double ratio_p95 = 0.0;
};

/// Hoelder, Young, embedding, L^{p,p} = L^p, and Fourier-product suites on d = 3 grids.
std::vector<CorpusRow> run_corpus(const CorpusSpec& spec);
/// Largest relative spread (max - min) / min of ratio_max across grid sizes, per lemma.
double corpus_max_spread(const std::vector<CorpusRow>& rows, const std::string& lemma_id);

}  // namespace qclim
