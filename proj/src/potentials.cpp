#include "qclim/potentials.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include <json.hpp>

#include "qclim/fft.hpp"
#include "qclim/lorentz.hpp"

namespace qclim {

Vec3 CouplingSpec::vector_weight(const Mode& m) const {
  const double w = weight(m.k);
  if (m.polarization == 0) return {w, 0.0, 0.0};
  return scale(PolarizationFrame::e(m.k, m.polarization), w);
}

namespace {

double weak3_on_shell(const CouplingSpec& c, double r0, double r1, int nr) {
  const PointCloud pc = spherical_grid(r0, r1, nr, 16, 16);
  SampledFunction f;
  f.cells = pc.cells;
  for (const auto& k : pc.points) f.values.emplace_back(c.chi(k, c.dispersion) / c.dispersion.omega(k));
  return quasinorm(f, {3.0, kInf}, LorentzConvention::WeakP);
}

double sup_k_chi_over_omega(const CouplingSpec& c, double r0, double r1, int nr) {
  const PointCloud pc = spherical_grid(r0, r1, nr, 8, 8);
  double s = 0.0;
  for (const auto& k : pc.points) s = std::max(s, norm(k) * std::abs(c.chi(k, c.dispersion)) / c.dispersion.omega(k));
  return s;
}

}  // namespace

std::vector<AuditItem> CouplingSpec::audit(double extent) const {
  require(extent > 1.0, "audit extent must exceed 1");
  std::vector<AuditItem> items;
  const double r0 = 0.05;
  const int nr = 48;
  const int nr2 = static_cast<int>(std::ceil(nr * std::log(2.0 * extent / r0) / std::log(extent / r0)));

  AuditItem aw{"A_omega: inf omega(k)/|k| on the outer shell", 0.0, 0.0, true, ""};
  {
    const PointCloud pc = spherical_grid(r0, 2.0 * extent, nr2, 8, 8);
    double ratio = kInf, ratio_inner = kInf;
    for (const auto& k : pc.points) {
      const double w = dispersion.omega(k);
      if (!(w > 0.0) || !std::isfinite(w)) {
        aw.passed = false;
        aw.detail = "omega not positive on the grid";
      }
      if (norm(k) >= extent) ratio = std::min(ratio, w / norm(k));
      if (norm(k) >= 0.5 * extent && norm(k) <= extent) ratio_inner = std::min(ratio_inner, w / norm(k));
    }
    aw.value = ratio_inner;
    aw.extended = ratio;
    if (!(ratio > 0.0)) aw.passed = false;
  }
  items.push_back(aw);

  AuditItem ac{"A_chi: ||chi/omega||_{L^{3,inf}}", weak3_on_shell(*this, r0, extent, nr),
               weak3_on_shell(*this, r0, 2.0 * extent, nr2), true, ""};
  ac.passed = std::isfinite(ac.extended) && ac.extended <= 1.25 * ac.value + 1e-12;
  if (!ac.passed) ac.detail = "functional grows under grid extension";
  items.push_back(ac);

  AuditItem ap{"A'_chi: sup |k| chi/omega", sup_k_chi_over_omega(*this, r0, extent, nr),
               sup_k_chi_over_omega(*this, r0, 2.0 * extent, nr2), true, ""};
  ap.passed = std::isfinite(ap.extended) && ap.extended <= 1.25 * ap.value + 1e-12;
  if (!ap.passed) ap.detail = "functional grows under grid extension";
  items.push_back(ap);
  return items;
}

void CouplingSpec::require_grade(CouplingKind needed, double extent) const {
  const auto items = audit(extent);
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i == 2 && needed == CouplingKind::NelsonScalar) continue;
    if (!items[i].passed) fail(ErrorKind::Assumption, "assumption audit failed: " + items[i].name + " (" + items[i].detail + ")");
  }
}

void PlaneWaveSeries::add(const Vec3& qv, const CVec3& av) {
  q.push_back(qv);
  a.push_back(av);
}

void PlaneWaveSeries::merge() {
  using Key = std::array<long long, 3>;
  std::map<Key, std::pair<Vec3, CVec3>> acc;
  for (std::size_t j = 0; j < q.size(); ++j) {
    const Key key{std::llround(q[j][0] * 1e9), std::llround(q[j][1] * 1e9), std::llround(q[j][2] * 1e9)};
    auto it = acc.find(key);
    if (it == acc.end()) {
      acc.emplace(key, std::make_pair(q[j], a[j]));
    } else {
      for (int c = 0; c < 3; ++c) it->second.second[static_cast<std::size_t>(c)] += a[j][static_cast<std::size_t>(c)];
    }
  }
  q.clear();
  a.clear();
  for (const auto& [key, v] : acc) {
    const auto& av = v.second;
    if (av[0] == cplx(0.0) && av[1] == cplx(0.0) && av[2] == cplx(0.0)) continue;
    q.push_back(v.first);
    a.push_back(av);
  }
}

CVec3 PlaneWaveSeries::eval(const Vec3& x) const {
  CVec3 s{0.0, 0.0, 0.0};
  for (std::size_t j = 0; j < q.size(); ++j) {
    const cplx e = std::exp(cplx(0.0, dot(q[j], x)));
    for (int c = 0; c < components; ++c) s[static_cast<std::size_t>(c)] += a[j][static_cast<std::size_t>(c)] * e;
  }
  return s;
}

PlaneWaveSeries PlaneWaveSeries::curl() const {
  require(components == 3, "curl needs a vector series");
  PlaneWaveSeries b;
  b.components = 3;
  const cplx i(0.0, 1.0);
  for (std::size_t j = 0; j < q.size(); ++j) {
    const Vec3& k = q[j];
    const CVec3& v = a[j];
    b.add(k, {i * (k[1] * v[2] - k[2] * v[1]), i * (k[2] * v[0] - k[0] * v[2]), i * (k[0] * v[1] - k[1] * v[0])});
  }
  b.merge();
  return b;
}

PlaneWaveSeries PlaneWaveSeries::divergence() const {
  require(components == 3, "divergence needs a vector series");
  PlaneWaveSeries s;
  s.components = 1;
  for (std::size_t j = 0; j < q.size(); ++j)
    s.add(q[j], {cplx(0.0, 1.0) * (q[j][0] * a[j][0] + q[j][1] * a[j][1] + q[j][2] * a[j][2]), 0.0, 0.0});
  s.merge();
  return s;
}

PlaneWaveSeries PlaneWaveSeries::operator-(const PlaneWaveSeries& o) const {
  require(components == o.components, "series component mismatch");
  PlaneWaveSeries r = *this;
  for (std::size_t j = 0; j < o.q.size(); ++j) r.add(o.q[j], {-o.a[j][0], -o.a[j][1], -o.a[j][2]});
  r.merge();
  return r;
}

PlaneWaveSeries PlaneWaveSeries::component(int c) const {
  require(c >= 0 && c < components, "series component out of range");
  PlaneWaveSeries s;
  s.components = 1;
  for (std::size_t j = 0; j < q.size(); ++j) s.add(q[j], {a[j][static_cast<std::size_t>(c)], 0.0, 0.0});
  s.merge();
  return s;
}

double PlaneWaveSeries::coefficient_sup() const {
  double s = 0.0;
  for (const auto& v : a)
    for (const auto& x : v) s = std::max(s, std::abs(x));
  return s;
}

std::vector<double> EffectivePotential::sample(const std::vector<Vec3>& pts, int component, double tol) const {
  std::vector<double> out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const cplx v = series.eval(pts[i])[static_cast<std::size_t>(component)];
    require(std::abs(v.imag()) <= tol * std::max(1.0, std::abs(v.real())), "effective potential is not real on the grid");
    out[i] = v.real();
  }
  return out;
}

double EffectivePotential::max_imag(const std::vector<Vec3>& pts) const {
  double m = 0.0;
  for (const auto& x : pts) {
    const CVec3 v = series.eval(x);
    for (int c = 0; c < components(); ++c) m = std::max(m, std::abs(v[static_cast<std::size_t>(c)].imag()));
  }
  return m;
}

Multiplier EffectivePotential::multiplier(const ParticleGrid& grid, int component) const {
  const auto vals = sample(evaluation_points(grid), component);
  return Multiplier(grid, std::vector<cplx>(vals.begin(), vals.end()));
}

EffectivePotential EffectivePotential::operator-(const EffectivePotential& o) const {
  EffectivePotential r = *this;
  r.series = series - o.series;
  r.provenance = provenance + "-" + o.provenance;
  return r;
}

std::string to_string(PotentialKind k) {
  switch (k) {
    case PotentialKind::ScalarV:
      return "scalar_V";
    case PotentialKind::VectorA:
      return "vector_A";
    case PotentialKind::ScalarW:
      return "scalar_W";
    case PotentialKind::VectorB:
      return "vector_B";
  }
  return "scalar_V";
}

EffectivePotential v_from_moments(const Moments& mo, const ModeBasis& basis, const CouplingSpec& c) {
  EffectivePotential v{PotentialKind::ScalarV, {}, "from_moments", 0.0};
  for (std::size_t m = 0; m < basis.size(); ++m) {
    const cplx s = std::sqrt(basis[m].cell) * c.weight(basis[m].k) * std::conj(mo.m1(static_cast<Eigen::Index>(m)));
    if (s == cplx(0.0)) continue;
    v.series.add(basis[m].k, {s, 0.0, 0.0});
    v.series.add(scale(basis[m].k, -1.0), {std::conj(s), 0.0, 0.0});
  }
  v.series.merge();
  return v;
}

EffectivePotential a_from_moments(const Moments& mo, const ModeBasis& basis, const CouplingSpec& c) {
  EffectivePotential v{PotentialKind::VectorA, {}, "from_moments", 0.0};
  v.series.components = 3;
  for (std::size_t m = 0; m < basis.size(); ++m) {
    const cplx s = std::sqrt(basis[m].cell) * std::conj(mo.m1(static_cast<Eigen::Index>(m)));
    if (s == cplx(0.0)) continue;
    const Vec3 w = c.vector_weight(basis[m]);
    v.series.add(basis[m].k, {s * w[0], s * w[1], s * w[2]});
    v.series.add(scale(basis[m].k, -1.0), {std::conj(s) * w[0], std::conj(s) * w[1], std::conj(s) * w[2]});
  }
  v.series.merge();
  return v;
}

WParts w_from_moments(const Moments& mo, const ModeBasis& basis, const CouplingSpec& c) {
  WParts w;
  for (auto* p : {&w.total, &w.aa, &w.adad, &w.ada}) {
    p->kind = PotentialKind::ScalarW;
    p->provenance = "from_moments";
  }
  const std::size_t n = basis.size();
  std::vector<Vec3> wv(n);
  std::vector<double> sc(n);
  for (std::size_t m = 0; m < n; ++m) {
    wv[m] = c.vector_weight(basis[m]);
    sc[m] = std::sqrt(basis[m].cell);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double cij = sc[i] * sc[j] * dot(wv[i], wv[j]);
      if (cij == 0.0) continue;
      const auto ii = static_cast<Eigen::Index>(i), jj = static_cast<Eigen::Index>(j);
      const cplx adad = cij * std::conj(mo.m2_aa(ii, jj));
      const cplx ada = cij * mo.m2_ada(ii, jj);
      const Vec3 qs = add(basis[i].k, basis[j].k), qd = sub(basis[i].k, basis[j].k);
      if (adad != cplx(0.0)) {
        w.adad.series.add(qs, {adad, 0.0, 0.0});
        w.aa.series.add(scale(qs, -1.0), {std::conj(adad), 0.0, 0.0});
        w.total.series.add(qs, {adad, 0.0, 0.0});
        w.total.series.add(scale(qs, -1.0), {std::conj(adad), 0.0, 0.0});
      }
      if (ada != cplx(0.0)) {
        w.ada.series.add(qd, {ada, 0.0, 0.0});
        w.total.series.add(qd, {2.0 * ada, 0.0, 0.0});
      }
    }
  }
  for (auto* p : {&w.total, &w.aa, &w.adad, &w.ada}) p->series.merge();
  return w;
}

namespace {

Moments first_moment_only(const VectorXc& m1) {
  const auto n = m1.size();
  return {m1, MatrixXc::Zero(n, n), MatrixXc::Zero(n, n)};
}

VectorXc measure_mean(const WignerMeasure& mu, const ModeBasis& basis) {
  require(!mu.atoms.empty(), "Wigner measure has no atoms");
  VectorXc m1 = VectorXc::Zero(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < mu.atoms.size(); ++i) {
    require(mu.atoms[i].size() == basis.size(), "atom must have one value per mode");
    for (std::size_t m = 0; m < basis.size(); ++m)
      m1(static_cast<Eigen::Index>(m)) += mu.weights[i] * std::sqrt(basis[m].cell) * mu.atoms[i][m];
  }
  return m1;
}

void stamp(EffectivePotential& v, const std::string& prov, double eps) {
  v.provenance = prov;
  v.epsilon = eps;
}

void require_pf(const CouplingSpec& c, const ModeBasis& basis) {
  require(c.kind == CouplingKind::PauliFierzVector, "vector potentials need a pf_vector coupling");
  require(basis.polarized(), "vector potentials need a polarized mode basis");
}

}  // namespace

EffectivePotential v_eps(const FieldStateFamily& family, double eps, const CouplingSpec& c) {
  require(c.kind == CouplingKind::NelsonScalar, "V_eps needs a nelson_scalar coupling");
  auto v = v_from_moments(family.moments(eps), family.basis(), c);
  stamp(v, "from_state", eps);
  return v;
}

EffectivePotential v_mu(const WignerMeasure& mu, const ModeBasis& basis, const CouplingSpec& c) {
  require(c.kind == CouplingKind::NelsonScalar, "V_mu needs a nelson_scalar coupling");
  auto v = v_from_moments(first_moment_only(measure_mean(mu, basis)), basis, c);
  stamp(v, "from_measure", 0.0);
  return v;
}

EffectivePotential a_eps(const FieldStateFamily& family, double eps, const CouplingSpec& c) {
  require_pf(c, family.basis());
  auto v = a_from_moments(family.moments(eps), family.basis(), c);
  stamp(v, "from_state", eps);
  return v;
}

EffectivePotential a_mu(const WignerMeasure& mu, const ModeBasis& basis, const CouplingSpec& c) {
  require_pf(c, basis);
  auto v = a_from_moments(first_moment_only(measure_mean(mu, basis)), basis, c);
  stamp(v, "from_measure", 0.0);
  return v;
}

WParts w_eps(const FieldStateFamily& family, double eps, const CouplingSpec& c) {
  require_pf(c, family.basis());
  WParts w = w_from_moments(family.moments(eps), family.basis(), c);
  for (auto* p : {&w.total, &w.aa, &w.adad, &w.ada}) stamp(*p, "from_state", eps);
  return w;
}

EffectivePotential w_mu(const WignerMeasure& mu, const ModeBasis& basis, const CouplingSpec& c) {
  require_pf(c, basis);
  require(!mu.atoms.empty(), "Wigner measure has no atoms");
  EffectivePotential w{PotentialKind::ScalarW, {}, "from_measure", 0.0};
  for (std::size_t i = 0; i < mu.atoms.size(); ++i) {
    const auto a = a_mu(WignerMeasure::dirac(mu.atoms[i]), basis, c).series;
    for (std::size_t j = 0; j < a.q.size(); ++j)
      for (std::size_t l = 0; l < a.q.size(); ++l) {
        const cplx s = a.a[j][0] * a.a[l][0] + a.a[j][1] * a.a[l][1] + a.a[j][2] * a.a[l][2];
        w.series.add(add(a.q[j], a.q[l]), {mu.weights[i] * s, 0.0, 0.0});
      }
  }
  w.series.merge();
  return w;
}

EffectivePotential b_of(const EffectivePotential& a) {
  require(a.kind == PotentialKind::VectorA, "curl needs a vector potential");
  EffectivePotential b{PotentialKind::VectorB, a.series.curl(), a.provenance, a.epsilon};
  return b;
}

std::array<std::vector<double>, 3> curl_of(const std::array<std::vector<double>, 3>& a, const ParticleGrid& grid) {
  const ParticleGrid g = grid.scalar();
  const std::size_t p = g.points();
  for (const auto& c : a) require(c.size() == p, "vector samples must have one value per grid node");
  std::array<std::vector<VectorXc>, 3> da;  // da[i][j] = d_j a_i
  for (int i = 0; i < 3; ++i) {
    da[static_cast<std::size_t>(i)].assign(3, VectorXc::Zero(static_cast<Eigen::Index>(p)));
    VectorXc v(static_cast<Eigen::Index>(p));
    for (std::size_t t = 0; t < p; ++t) v(static_cast<Eigen::Index>(t)) = a[static_cast<std::size_t>(i)][t];
    for (int j = 0; j < g.d; ++j) {
      VectorXc d(static_cast<Eigen::Index>(p));
      if (g.boundary == Boundary::Periodic) {
        d = cplx(0.0, 1.0) * momentum_apply(g, j, v);  // d_j = i P_j
      } else {
        // central differences, 2nd-order one-sided stencils at the ends
        std::size_t stride = 1;
        for (int ax = g.d - 1; ax > j; --ax) stride *= static_cast<std::size_t>(g.n);
        const double h = g.spacing();
        for (std::size_t t = 0; t < p; ++t) {
          const int idx = static_cast<int>((t / stride) % static_cast<std::size_t>(g.n));
          auto at = [&](int o) { return v(static_cast<Eigen::Index>(static_cast<long long>(t) + o * static_cast<long long>(stride))); };
          if (idx == 0)
            d(static_cast<Eigen::Index>(t)) = (-3.0 * at(0) + 4.0 * at(1) - at(2)) / (2.0 * h);
          else if (idx == g.n - 1)
            d(static_cast<Eigen::Index>(t)) = (3.0 * at(0) - 4.0 * at(-1) + at(-2)) / (2.0 * h);
          else
            d(static_cast<Eigen::Index>(t)) = (at(1) - at(-1)) / (2.0 * h);
        }
      }
      da[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = d;
    }
  }
  std::array<std::vector<double>, 3> b;
  for (auto& c : b) c.assign(p, 0.0);
  for (std::size_t t = 0; t < p; ++t) {
    const auto tt = static_cast<Eigen::Index>(t);
    b[0][t] = (da[2][1](tt) - da[1][2](tt)).real();
    b[1][t] = (da[0][2](tt) - da[2][0](tt)).real();
    b[2][t] = (da[1][0](tt) - da[0][1](tt)).real();
  }
  return b;
}

double divergence_residual(const std::array<std::vector<double>, 3>& b, const ParticleGrid& grid) {
  const ParticleGrid g = grid.scalar();
  require(g.boundary == Boundary::Periodic, "spectral divergence needs a periodic grid");
  const std::size_t p = g.points();
  VectorXc div = VectorXc::Zero(static_cast<Eigen::Index>(p));
  for (int j = 0; j < g.d; ++j) {
    VectorXc v(static_cast<Eigen::Index>(p));
    for (std::size_t t = 0; t < p; ++t) v(static_cast<Eigen::Index>(t)) = b[static_cast<std::size_t>(j)][t];
    div += cplx(0.0, 1.0) * momentum_apply(g, j, v);
  }
  return div.cwiseAbs().maxCoeff();
}

double wick_constant(const ModeBasis& basis, const CouplingSpec& c, double eps) {
  require(c.kind == CouplingKind::PauliFierzVector, "wick_constant needs a pf_vector coupling");
  double s = 0.0;
  for (const auto& m : basis.modes()) {
    const double chi = c.chi(m.k, c.dispersion);
    s += m.cell * chi * chi / c.dispersion.omega(m.k);
  }
  return eps * s;
}

double wick_vacuum_gap(const ModeBasis& basis, const CouplingSpec& c, double eps, const Vec3& x, int n_max) {
  require(c.kind == CouplingKind::PauliFierzVector, "wick_vacuum_gap needs a pf_vector coupling");
  FockTruncation tr{std::vector<int>(basis.size(), n_max), eps};
  const FockState vac = FockState::vacuum(tr);
  double unordered = 0.0, ordered = 0.0;
  for (int i = 0; i < 3; ++i) {
    std::vector<cplx> f(basis.size());
    for (std::size_t m = 0; m < basis.size(); ++m)
      f[m] = c.vector_weight(basis[m])[static_cast<std::size_t>(i)] * std::exp(cplx(0.0, dot(basis[m].k, x)));
    const FockState cr = smeared_apply(vac, basis, f, Ladder::Create);
    const FockState an = smeared_apply(vac, basis, f, Ladder::Annihilate);
    FockState ax = cr;
    ax.coefficients() += an.coefficients();
    unordered += ax.coefficients().squaredNorm();  // <Omega, A_i A_i Omega> = ||A_i Omega||^2
    // <a* a*> + <a a> + 2 <a* a>
    const cplx adad = an.inner(cr);
    const cplx aa = vac.inner(smeared_apply(an, basis, f, Ladder::Annihilate));
    ordered += (adad + aa).real() + 2.0 * an.coefficients().squaredNorm();
  }
  return unordered - ordered;
}

cplx pairing_pointwise(const EffectivePotential& v, const VectorXc& psi, const VectorXc& phi, const ParticleGrid& grid,
                       int component) {
  const ParticleGrid g = grid.scalar();
  require(static_cast<std::size_t>(psi.size()) == g.points() && phi.size() == psi.size(), "pairing vectors do not match the grid");
  cplx s = 0.0;
  for (std::size_t i = 0; i < g.points(); ++i) {
    const cplx val = v.series.eval(g.point(i))[static_cast<std::size_t>(component)];
    s += val * std::conj(psi(static_cast<Eigen::Index>(i))) * phi(static_cast<Eigen::Index>(i));
  }
  return g.cell() * s;
}

cplx pairing_fourier(const EffectivePotential& v, const VectorXc& psi, const VectorXc& phi, const ParticleGrid& grid,
                     int component) {
  const ParticleGrid g = grid.scalar();
  require(static_cast<std::size_t>(psi.size()) == g.points() && phi.size() == psi.size(), "pairing vectors do not match the grid");
  VectorXc rho = psi.conjugate().cwiseProduct(phi);
  VectorXc rhat = rho;
  const bool periodic = g.boundary == Boundary::Periodic;
  if (periodic) fft::inverse(g.dims(), rhat);
  const Vec3 x0{-0.5 * g.length, g.d >= 2 ? -0.5 * g.length : 0.0, g.d >= 3 ? -0.5 * g.length : 0.0};
  cplx total = 0.0;
  for (std::size_t j = 0; j < v.series.q.size(); ++j) {
    const Vec3& q = v.series.q[j];
    const cplx a = v.series.a[j][static_cast<std::size_t>(component)];
    bool lattice = periodic;
    std::size_t flat = 0;
    for (int ax = 0; ax < 3 && lattice; ++ax) {
      const double m = q[static_cast<std::size_t>(ax)] * g.length / (2.0 * kPi);
      const double mr = std::round(m);
      if (std::abs(m - mr) > 1e-9 || (ax >= g.d && mr != 0.0)) lattice = false;
      if (ax < g.d) flat = flat * static_cast<std::size_t>(g.n) + static_cast<std::size_t>(((static_cast<long long>(mr) % g.n) + g.n) % g.n);
    }
    cplx r = 0.0;
    if (lattice) {
      r = std::exp(cplx(0.0, dot(q, x0))) * rhat(static_cast<Eigen::Index>(flat));
    } else {
      for (std::size_t i = 0; i < g.points(); ++i) r += std::exp(cplx(0.0, dot(q, g.point(i)))) * rho(static_cast<Eigen::Index>(i));
    }
    total += a * g.cell() * r;
  }
  return total;
}

void export_potential(const std::string& path_prefix, const EffectivePotential& v, const ParticleGrid& grid,
                      const std::string& coupling_name, const std::string& config_hash) {
  const ParticleGrid g = grid.scalar();
  std::vector<Vec3> nodes(g.points());
  for (std::size_t i = 0; i < nodes.size(); ++i) nodes[i] = g.point(i);
  std::ofstream bin(path_prefix + ".bin", std::ios::binary);
  require(static_cast<bool>(bin), "cannot open " + path_prefix + ".bin", ErrorKind::Config);
  for (int c = 0; c < v.components(); ++c) {
    const auto s = v.sample(nodes, c);
    bin.write(reinterpret_cast<const char*>(s.data()), static_cast<std::streamsize>(s.size() * sizeof(double)));
  }
  nlohmann::ordered_json meta;
  meta["schema_version"] = 1;
  meta["config_hash"] = config_hash;
  meta["kind"] = to_string(v.kind);
  meta["provenance"] = v.provenance;
  meta["epsilon"] = v.epsilon;
  meta["components"] = v.components();
  meta["dtype"] = "float64-le";
  meta["layout"] = "component-major, row-major nodes, last axis fastest";
  meta["grid"] = {{"d", g.d},
                  {"n", g.n},
                  {"length", g.length},
                  {"boundary", g.boundary == Boundary::Periodic ? "periodic" : "dirichlet"}};
  meta["coupling"] = coupling_name;
  meta["plane_wave_terms"] = v.series.q.size();
  std::ofstream js(path_prefix + ".json");
  js << meta.dump(2) << "\n";
}

}  // namespace qclim
