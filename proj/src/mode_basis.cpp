#include "qclim/mode_basis.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace qclim {

ModeBasis::ModeBasis(std::vector<Mode> modes, int dimension) : modes_(std::move(modes)), dimension_(dimension) {
  validate();
}

void ModeBasis::validate() const {
  require(dimension_ >= 1 && dimension_ <= 3, "mode basis dimension must be 1, 2 or 3");
  std::map<std::tuple<int, long long, long long, long long>, int> seen;
  for (const auto& m : modes_) {
    require(m.cell > 0.0 && std::isfinite(m.cell), "mode cell measure must be positive and finite");
    require(m.polarization >= 0 && m.polarization <= 2, "polarization index must be 0, 1 or 2");
    auto key = std::make_tuple(m.polarization, std::llround(m.k[0] * 1e9), std::llround(m.k[1] * 1e9),
                               std::llround(m.k[2] * 1e9));
    require(seen.emplace(key, 1).second, "duplicate k point for the same polarization");
  }
  double mu = total_measure();
  require(std::isfinite(mu), "total mode measure must be finite");
}

ModeBasis ModeBasis::lattice_1d(double box_length, const std::vector<int>& n_values) {
  require(box_length > 0.0, "box length must be positive");
  std::vector<Mode> modes;
  const double dk = 2.0 * kPi / box_length;
  for (int n : n_values) {
    require(n != 0, "lattice modes exclude k = 0");
    modes.push_back({{dk * n, 0.0, 0.0}, dk, 0});
  }
  return ModeBasis(std::move(modes), 1);
}

ModeBasis ModeBasis::lattice_1d_polarized(double box_length, const std::vector<int>& n_values) {
  require(box_length > 0.0, "box length must be positive");
  std::vector<Mode> modes;
  const double dk = 2.0 * kPi / box_length;
  for (int n : n_values) {
    require(n != 0, "lattice modes exclude k = 0");
    for (int lam = 1; lam <= 2; ++lam) modes.push_back({{dk * n, 0.0, 0.0}, dk, lam});
  }
  return ModeBasis(std::move(modes), 1);
}

ModeBasis ModeBasis::cubic(int dimension, double spacing, double extent, bool polarized, std::optional<double> k_cap) {
  require(dimension >= 1 && dimension <= 3, "cubic grid dimension must be 1, 2 or 3");
  require(spacing > 0.0 && extent > 0.0, "cubic grid needs positive spacing and extent");
  const int half = static_cast<int>(std::floor(extent / spacing + 1e-9));
  // cell centres at (i + 1/2) h for i in [-half, half): never on the origin
  std::vector<Mode> modes;
  const double cell = std::pow(spacing, dimension);
  const int ny = dimension >= 2 ? half : 1;
  const int nz = dimension >= 3 ? half : 1;
  for (int i = -half; i < half; ++i) {
    for (int j = (dimension >= 2 ? -ny : 0); j < ny; ++j) {
      for (int l = (dimension >= 3 ? -nz : 0); l < nz; ++l) {
        Vec3 k{(i + 0.5) * spacing, dimension >= 2 ? (j + 0.5) * spacing : 0.0,
               dimension >= 3 ? (l + 0.5) * spacing : 0.0};
        if (k_cap && norm(k) > *k_cap) continue;
        if (polarized) {
          modes.push_back({k, cell, 1});
          modes.push_back({k, cell, 2});
        } else {
          modes.push_back({k, cell, 0});
        }
      }
    }
  }
  return ModeBasis(std::move(modes), dimension);
}

bool ModeBasis::polarized() const {
  return std::any_of(modes_.begin(), modes_.end(), [](const Mode& m) { return m.polarization != 0; });
}

double ModeBasis::total_measure() const {
  double s = 0.0;
  for (const auto& m : modes_) s += m.cell;
  return s;
}

cplx ModeBasis::inner(const std::vector<cplx>& f, const std::vector<cplx>& g) const {
  require(f.size() == modes_.size() && g.size() == modes_.size(), "grid function size mismatch");
  cplx s = 0.0;
  for (std::size_t i = 0; i < modes_.size(); ++i) s += modes_[i].cell * std::conj(f[i]) * g[i];
  return s;
}

double Dispersion::omega(const Vec3& k) const {
  const double kk = dot(k, k);
  if (kind == DispersionKind::Massless) return std::sqrt(kk);
  return std::sqrt(kk + mass * mass);
}

double Dispersion::check_on(const ModeBasis& basis) const {
  double kmax = 0.0;
  for (const auto& m : basis.modes()) {
    const double w = omega(m.k);
    require(w > 0.0 && std::isfinite(w), "dispersion must be positive on every grid point",
            ErrorKind::Assumption);
    kmax = std::max(kmax, norm(m.k));
  }
  double ratio = std::numeric_limits<double>::infinity();
  for (const auto& m : basis.modes()) {
    const double kn = norm(m.k);
    if (kn >= 0.5 * kmax && kn > 0.0) ratio = std::min(ratio, omega(m.k) / kn);
  }
  return ratio;
}

std::string Dispersion::name() const {
  if (kind == DispersionKind::Massless) return "massless";
  std::ostringstream os;
  os << "massive(" << mass << ")";
  return os.str();
}

double Cutoff::operator()(const Vec3& k, const Dispersion& disp) const {
  switch (kind) {
    case CutoffKind::One:
      return 1.0;
    case CutoffKind::Sharp:
      return norm(k) <= lambda ? 1.0 : 0.0;
    case CutoffKind::Smooth:
      return 0.5 * std::erfc((norm(k) - lambda) / width);
    case CutoffKind::Omega:
      return disp.omega(k);
  }
  return 1.0;
}

std::string Cutoff::name() const {
  std::ostringstream os;
  switch (kind) {
    case CutoffKind::One:
      os << "one";
      break;
    case CutoffKind::Sharp:
      os << "sharp(" << lambda << ")";
      break;
    case CutoffKind::Smooth:
      os << "smooth(" << lambda << "," << width << ")";
      break;
    case CutoffKind::Omega:
      os << "omega";
      break;
  }
  return os.str();
}

Vec3 PolarizationFrame::e(const Vec3& k, int polarization) {
  require(polarization == 1 || polarization == 2, "polarization must be 1 or 2");
  const double kn = norm(k);
  require(kn > 0.0, "polarization frame undefined at k = 0");
  const Vec3 khat = scale(k, 1.0 / kn);
  Vec3 e1 = cross(khat, {0.0, 0.0, 1.0});
  double n1 = norm(e1);
  if (n1 < 1e-9) {
    e1 = {1.0, 0.0, 0.0};
    n1 = 1.0;
    if (polarization == 1) return e1;
    return {0.0, khat[2] > 0 ? 1.0 : -1.0, 0.0};
  }
  e1 = scale(e1, 1.0 / n1);
  if (polarization == 1) return e1;
  Vec3 e2 = cross(khat, e1);
  return scale(e2, 1.0 / norm(e2));
}

double PolarizationFrame::orthonormality_defect(const ModeBasis& basis) {
  double worst = 0.0;
  for (const auto& m : basis.modes()) {
    if (norm(m.k) == 0.0) continue;
    const Vec3 khat = scale(m.k, 1.0 / norm(m.k));
    const Vec3 e1 = e(m.k, 1), e2 = e(m.k, 2);
    const std::array<Vec3, 3> b{e1, e2, khat};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) worst = std::max(worst, std::abs(dot(b[i], b[j]) - (i == j ? 1.0 : 0.0)));
  }
  return worst;
}

}  // namespace qclim
