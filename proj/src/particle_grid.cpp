#include "qclim/particle_grid.hpp"

#include <algorithm>

#include "qclim/fft.hpp"

namespace qclim {

void ParticleGrid::validate(std::size_t budget) const {
  require(d >= 1 && d <= 3, "particle grid dimension must be 1, 2 or 3");
  require(n >= 2, "particle grid needs at least 2 points per axis");
  require(length > 0.0 && std::isfinite(length), "particle box length must be positive");
  require(spinor == 1 || spinor == 2, "spinor dimension must be 1 or 2");
  require(dimension() <= budget, "particle grid dimension exceeds the budget");
}

std::size_t ParticleGrid::points() const {
  std::size_t s = 1;
  for (int a = 0; a < d; ++a) s *= static_cast<std::size_t>(n);
  return s;
}

Vec3 ParticleGrid::point(std::size_t flat) const {
  Vec3 x{0.0, 0.0, 0.0};
  const double h = spacing();
  const double off = boundary == Boundary::Periodic ? 0.0 : 1.0;
  for (int a = d - 1; a >= 0; --a) {
    x[static_cast<std::size_t>(a)] = -0.5 * length + h * (static_cast<double>(flat % static_cast<std::size_t>(n)) + off);
    flat /= static_cast<std::size_t>(n);
  }
  return x;
}

Vec3 ParticleGrid::momentum(std::size_t flat) const {
  Vec3 k{0.0, 0.0, 0.0};
  const double dk = 2.0 * kPi / length;
  for (int a = d - 1; a >= 0; --a) {
    k[static_cast<std::size_t>(a)] = dk * fft::frequency(static_cast<int>(flat % static_cast<std::size_t>(n)), n);
    flat /= static_cast<std::size_t>(n);
  }
  return k;
}

ParticleGrid ParticleGrid::fine() const {
  ParticleGrid f = *this;
  f.n = 2 * n;
  f.spinor = 1;
  return f;
}

ParticleGrid ParticleGrid::scalar() const {
  ParticleGrid s = *this;
  s.spinor = 1;
  return s;
}

std::vector<Vec3> evaluation_points(const ParticleGrid& grid) {
  const ParticleGrid g = grid.boundary == Boundary::Periodic ? grid.fine() : grid.scalar();
  std::vector<Vec3> pts(g.points());
  for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = g.point(i);
  return pts;
}

namespace {

// coarse spectral index -> index of the same frequency on the 2x grid
std::vector<std::size_t> fine_index_map(const ParticleGrid& g) {
  const int n = g.n, m = 2 * n;
  std::vector<std::size_t> map(g.points());
  for (std::size_t flat = 0; flat < map.size(); ++flat) {
    std::size_t rem = flat, out = 0, stride = 1;
    for (int a = g.d - 1; a >= 0; --a) {
      const int f = fft::frequency(static_cast<int>(rem % static_cast<std::size_t>(n)), n);
      rem /= static_cast<std::size_t>(n);
      out += static_cast<std::size_t>((f + m) % m) * stride;
      stride *= static_cast<std::size_t>(m);
    }
    map[flat] = out;
  }
  return map;
}

}  // namespace

Multiplier::Multiplier(const ParticleGrid& grid, const std::function<cplx(const Vec3&)>& f) : grid_(grid.scalar()) {
  const auto pts = evaluation_points(grid_);
  samples_.resize(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) samples_[i] = f(pts[i]);
}

Multiplier::Multiplier(const ParticleGrid& grid, std::vector<cplx> samples) : grid_(grid.scalar()), samples_(std::move(samples)) {
  const std::size_t expect = grid_.boundary == Boundary::Periodic ? grid_.fine().points() : grid_.points();
  require(samples_.size() == expect, "multiplier samples do not match the evaluation grid");
}

VectorXc Multiplier::apply(const VectorXc& psi) const {
  const std::size_t p = grid_.points();
  require(static_cast<std::size_t>(psi.size()) == p, "multiplier applied to a vector of the wrong size");
  if (grid_.boundary == Boundary::Dirichlet) {
    VectorXc out(psi.size());
    for (std::size_t i = 0; i < p; ++i) out(static_cast<Eigen::Index>(i)) = samples_[i] * psi(static_cast<Eigen::Index>(i));
    return out;
  }
  const ParticleGrid fg = grid_.fine();
  const std::size_t pf = fg.points();
  static thread_local std::vector<std::size_t> map;
  static thread_local std::pair<int, int> key{0, 0};
  if (key != std::make_pair(grid_.d, grid_.n) || map.size() != p) {
    map = fine_index_map(grid_);
    key = {grid_.d, grid_.n};
  }
  VectorXc c = psi;
  fft::forward(grid_.dims(), c);
  VectorXc f = VectorXc::Zero(static_cast<Eigen::Index>(pf));
  for (std::size_t i = 0; i < p; ++i) f(static_cast<Eigen::Index>(map[i])) = c(static_cast<Eigen::Index>(i));
  fft::inverse(fg.dims(), f);
  for (std::size_t i = 0; i < pf; ++i) f(static_cast<Eigen::Index>(i)) *= samples_[i];
  fft::forward(fg.dims(), f);
  // fine forward times coarse inverse picks up pf * p
  const double s = 1.0 / (static_cast<double>(pf) * static_cast<double>(p));
  for (std::size_t i = 0; i < p; ++i) c(static_cast<Eigen::Index>(i)) = f(static_cast<Eigen::Index>(map[i])) * s;
  fft::inverse(grid_.dims(), c);
  return c;
}

bool Multiplier::is_real(double tol) const {
  return std::all_of(samples_.begin(), samples_.end(), [tol](const cplx& v) { return std::abs(v.imag()) <= tol; });
}

double Multiplier::sup_abs() const {
  double s = 0.0;
  for (const auto& v : samples_) s = std::max(s, std::abs(v));
  return s;
}

Multiplier Multiplier::abs() const {
  Multiplier m = *this;
  for (auto& v : m.samples_) v = std::abs(v);
  return m;
}

Multiplier Multiplier::scaled(double s) const {
  Multiplier m = *this;
  for (auto& v : m.samples_) v *= s;
  return m;
}

std::vector<double> laplacian_symbol(const ParticleGrid& grid) {
  const ParticleGrid g = grid.scalar();
  std::vector<double> sym(g.points());
  const double h = g.spacing();
  for (std::size_t i = 0; i < sym.size(); ++i) {
    if (g.boundary == Boundary::Periodic) {
      const Vec3 k = g.momentum(i);
      sym[i] = dot(k, k);
    } else {
      // sine-basis eigenvalues of the stencil, indexed by mode number per axis
      std::size_t rem = i;
      double s = 0.0;
      for (int a = g.d - 1; a >= 0; --a) {
        const int j = static_cast<int>(rem % static_cast<std::size_t>(g.n)) + 1;
        rem /= static_cast<std::size_t>(g.n);
        const double sn = std::sin(0.5 * kPi * j / (g.n + 1));
        s += 4.0 * sn * sn / (h * h);
      }
      sym[i] = s;
    }
  }
  return sym;
}

VectorXc spectral_function_apply(const ParticleGrid& grid, const VectorXc& psi, const std::function<double(double)>& f) {
  require(grid.boundary == Boundary::Periodic, "spectral calculus needs a periodic grid");
  const ParticleGrid g = grid.scalar();
  const std::size_t p = g.points();
  require(static_cast<std::size_t>(psi.size()) % p == 0, "vector size does not match the grid");
  VectorXc out(psi.size());
  const auto sym = laplacian_symbol(g);
  for (Eigen::Index off = 0; off < psi.size(); off += static_cast<Eigen::Index>(p)) {
    VectorXc c = psi.segment(off, static_cast<Eigen::Index>(p));
    fft::forward(g.dims(), c);
    for (std::size_t i = 0; i < p; ++i) c(static_cast<Eigen::Index>(i)) *= f(sym[i]) / static_cast<double>(p);
    fft::inverse(g.dims(), c);
    out.segment(off, static_cast<Eigen::Index>(p)) = c;
  }
  return out;
}

VectorXc laplacian_apply(const ParticleGrid& grid, const VectorXc& psi) {
  const ParticleGrid g = grid.scalar();
  if (g.boundary == Boundary::Periodic) return spectral_function_apply(g, psi, [](double k2) { return k2; });
  const std::size_t p = g.points();
  require(static_cast<std::size_t>(psi.size()) % p == 0, "vector size does not match the grid");
  const double ih2 = 1.0 / (g.spacing() * g.spacing());
  VectorXc out = VectorXc::Zero(psi.size());
  for (Eigen::Index off = 0; off < psi.size(); off += static_cast<Eigen::Index>(p)) {
    std::size_t stride = 1;
    for (int a = g.d - 1; a >= 0; --a) {
      for (std::size_t i = 0; i < p; ++i) {
        const int j = static_cast<int>((i / stride) % static_cast<std::size_t>(g.n));
        cplx v = 2.0 * psi(off + static_cast<Eigen::Index>(i));
        if (j > 0) v -= psi(off + static_cast<Eigen::Index>(i - stride));
        if (j < g.n - 1) v -= psi(off + static_cast<Eigen::Index>(i + stride));
        out(off + static_cast<Eigen::Index>(i)) += ih2 * v;
      }
      stride *= static_cast<std::size_t>(g.n);
    }
  }
  return out;
}

VectorXc momentum_apply(const ParticleGrid& grid, int axis, const VectorXc& psi) {
  require(axis >= 0 && axis < grid.d, "momentum axis out of range");
  const ParticleGrid g = grid.scalar();
  const std::size_t p = g.points();
  require(static_cast<std::size_t>(psi.size()) % p == 0, "vector size does not match the grid");
  VectorXc out(psi.size());
  std::size_t stride = 1;
  for (int a = g.d - 1; a > axis; --a) stride *= static_cast<std::size_t>(g.n);
  for (Eigen::Index off = 0; off < psi.size(); off += static_cast<Eigen::Index>(p)) {
    if (g.boundary == Boundary::Periodic) {
      VectorXc c = psi.segment(off, static_cast<Eigen::Index>(p));
      fft::forward(g.dims(), c);
      for (std::size_t i = 0; i < p; ++i)
        c(static_cast<Eigen::Index>(i)) *= g.momentum(i)[static_cast<std::size_t>(axis)] / static_cast<double>(p);
      fft::inverse(g.dims(), c);
      out.segment(off, static_cast<Eigen::Index>(p)) = c;
    } else {
      const double s = 1.0 / (2.0 * g.spacing());
      for (std::size_t i = 0; i < p; ++i) {
        const int j = static_cast<int>((i / stride) % static_cast<std::size_t>(g.n));
        cplx v = 0.0;
        if (j < g.n - 1) v += psi(off + static_cast<Eigen::Index>(i + stride));
        if (j > 0) v -= psi(off + static_cast<Eigen::Index>(i - stride));
        out(off + static_cast<Eigen::Index>(i)) = cplx(0.0, -s) * v;
      }
    }
  }
  return out;
}

std::string ExternalPotential::name() const {
  switch (kind) {
    case ExternalKind::Zero:
      return "zero";
    case ExternalKind::Harmonic:
      return "harmonic";
    case ExternalKind::CoulombRegularized:
      return "coulomb_regularized";
    case ExternalKind::CustomTable:
      return "custom_table";
  }
  return "zero";
}

ExternalKind external_kind_from_string(const std::string& s) {
  for (auto k : {ExternalKind::Zero, ExternalKind::Harmonic, ExternalKind::CoulombRegularized, ExternalKind::CustomTable})
    if (ExternalPotential{k, 1.0, 1.0, {}}.name() == s) return k;
  fail(ErrorKind::Config, "unknown U preset '" + s + "'");
}

std::vector<double> ExternalPotential::sample(const ParticleGrid& grid) const {
  const auto pts = evaluation_points(grid);
  std::vector<double> u(pts.size(), 0.0);
  switch (kind) {
    case ExternalKind::Zero:
      break;
    case ExternalKind::Harmonic:
      for (std::size_t i = 0; i < pts.size(); ++i) u[i] = strength * dot(pts[i], pts[i]);
      break;
    case ExternalKind::CoulombRegularized:
      require(softening > 0.0, "regularized Coulomb needs positive softening");
      for (std::size_t i = 0; i < pts.size(); ++i) u[i] = -strength / std::sqrt(dot(pts[i], pts[i]) + softening * softening);
      break;
    case ExternalKind::CustomTable: {
      const ParticleGrid g = grid.scalar();
      require(table.size() == g.points(), "custom U table must have one value per grid node");
      for (double v : table) require(std::isfinite(v), "custom U table contains non-finite values");
      if (g.boundary == Boundary::Dirichlet) return table;
      // trigonometric interpolation onto the oversampled grid
      VectorXc c(static_cast<Eigen::Index>(table.size()));
      for (std::size_t i = 0; i < table.size(); ++i) c(static_cast<Eigen::Index>(i)) = table[i];
      fft::forward(g.dims(), c);
      const ParticleGrid fg = g.fine();
      VectorXc f = VectorXc::Zero(static_cast<Eigen::Index>(fg.points()));
      const auto map = fine_index_map(g);
      for (std::size_t i = 0; i < map.size(); ++i) f(static_cast<Eigen::Index>(map[i])) = c(static_cast<Eigen::Index>(i));
      fft::inverse(fg.dims(), f);
      for (std::size_t i = 0; i < u.size(); ++i) u[i] = f(static_cast<Eigen::Index>(i)).real() / static_cast<double>(table.size());
      break;
    }
  }
  return u;
}

namespace {
Multiplier from_real(const ParticleGrid& grid, const std::vector<double>& v, double sign, bool keep_positive) {
  std::vector<cplx> s(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) s[i] = keep_positive ? std::max(0.0, sign * v[i]) : sign * v[i];
  return Multiplier(grid, std::move(s));
}
}  // namespace

Multiplier ExternalPotential::u_plus(const ParticleGrid& grid) const { return from_real(grid, sample(grid), 1.0, true); }
Multiplier ExternalPotential::u_minus(const ParticleGrid& grid) const { return from_real(grid, sample(grid), -1.0, true); }
Multiplier ExternalPotential::total(const ParticleGrid& grid) const { return from_real(grid, sample(grid), 1.0, false); }

}  // namespace qclim
