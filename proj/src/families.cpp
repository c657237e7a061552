#include "qclim/families.hpp"

#include <algorithm>
#include <numeric>

namespace qclim {

WignerMeasure WignerMeasure::dirac(std::vector<cplx> z) { return {{std::move(z)}, {1.0}}; }

void WignerMeasure::validate(const ModeBasis& basis, const Dispersion& disp) const {
  require(!atoms.empty(), "Wigner measure needs at least one atom");
  require(atoms.size() == weights.size(), "one weight per atom");
  double total = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    require(weights[i] > 0.0, "atom weights must be positive");
    require(atoms[i].size() == basis.size(), "atom must have one value per mode");
    double e = 0.0;
    for (std::size_t m = 0; m < basis.size(); ++m) e += basis[m].cell * disp.omega(basis[m].k) * std::norm(atoms[i][m]);
    require(std::isfinite(e), "atom has infinite field energy");
    total += weights[i];
  }
  require(std::abs(total - 1.0) <= 1e-12, "atom weights must sum to one");
}

cplx WignerMeasure::characteristic(const ModeBasis& basis, const std::vector<cplx>& eta) const {
  cplx s = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    const double re = basis.inner(eta, atoms[i]).real();
    s += weights[i] * std::exp(cplx(0.0, 2.0 * re));
  }
  return s;
}

std::string to_string(FamilyKind k) {
  switch (k) {
    case FamilyKind::Vacuum:
      return "vacuum";
    case FamilyKind::Coherent:
      return "coherent";
    case FamilyKind::ExcitedCoherent:
      return "excited_coherent";
    case FamilyKind::GaussianSqueezed:
      return "gaussian_squeezed";
    case FamilyKind::Cat:
      return "cat";
  }
  return "vacuum";
}

FamilyKind family_kind_from_string(const std::string& s) {
  for (auto k : {FamilyKind::Vacuum, FamilyKind::Coherent, FamilyKind::ExcitedCoherent, FamilyKind::GaussianSqueezed,
                 FamilyKind::Cat})
    if (to_string(k) == s) return k;
  fail(ErrorKind::Config, "unknown family kind '" + s + "'");
}

cplx Moments::density_m1(const ModeBasis& b, std::size_t m) const { return m1(m) / std::sqrt(b[m].cell); }
cplx Moments::density_m2_aa(const ModeBasis& b, std::size_t m, std::size_t n) const {
  return m2_aa(m, n) / std::sqrt(b[m].cell * b[n].cell);
}
cplx Moments::density_m2_ada(const ModeBasis& b, std::size_t m, std::size_t n) const {
  return m2_ada(m, n) / std::sqrt(b[m].cell * b[n].cell);
}
double Moments::hermiticity_defect() const { return (m2_ada - m2_ada.adjoint()).cwiseAbs().maxCoeff(); }

FieldStateFamily::FieldStateFamily(FamilySpec spec, ModeBasis basis, Dispersion disp)
    : spec_(std::move(spec)), basis_(std::move(basis)), disp_(disp) {
  const std::size_t n = basis_.size();
  auto check_len = [n](const auto& v, const char* what) {
    require(v.empty() || v.size() == n, std::string(what) + " must have one entry per mode");
  };
  check_len(spec_.z0, "z0");
  check_len(spec_.g, "g");
  check_len(spec_.z1, "z1");
  check_len(spec_.squeeze_r, "squeeze_r");
  check_len(spec_.squeeze_phi, "squeeze_phi");
  disp_.check_on(basis_);
  for (const auto* v : {&spec_.z0, &spec_.g, &spec_.z1})
    for (const cplx& x : *v) require(std::isfinite(x.real()) && std::isfinite(x.imag()), "non-finite profile value");
  if (spec_.kind == FamilyKind::Cat) require(!spec_.z1.empty(), "cat family needs a second branch z1");
  for (double r : spec_.squeeze_r) require(r >= 0.0 && r < 5.0, "squeeze parameter must lie in [0,5)");
  declared_limit()->validate(basis_, disp_);
}

std::vector<cplx> FieldStateFamily::padded(const std::vector<cplx>& v) const {
  return v.empty() ? std::vector<cplx>(basis_.size(), 0.0) : v;
}

std::optional<WignerMeasure> FieldStateFamily::declared_limit() const {
  const auto z0 = padded(spec_.kind == FamilyKind::Vacuum ? std::vector<cplx>{} : spec_.z0);
  if (spec_.kind == FamilyKind::Cat) return WignerMeasure{{z0, padded(spec_.z1)}, {0.5, 0.5}};
  return WignerMeasure::dirac(z0);
}

void FieldStateFamily::check_admissible(double eps) const {
  require(eps > 0.0 && eps < 1.0, "epsilon must lie in (0,1)");
  if (spec_.kind == FamilyKind::ExcitedCoherent) {
    const double g2 = basis_.norm2(padded(spec_.g));
    require(4.0 * eps * g2 <= 1.0, "excited_coherent requires 4 eps |g|^2 <= 1 (non-normalizable otherwise)");
  }
}

FieldStateFamily::Derived FieldStateFamily::derive(double eps) const {
  check_admissible(eps);
  const std::size_t n = basis_.size();
  Derived d;
  d.alpha.assign(n, 0.0);
  d.u.assign(n, 0.0);
  d.ghat.assign(n, 0.0);
  if (spec_.kind == FamilyKind::Vacuum) return d;
  const auto z0 = padded(spec_.z0);
  for (std::size_t m = 0; m < n; ++m) d.alpha[m] = std::sqrt(basis_[m].cell) * z0[m];
  if (spec_.kind == FamilyKind::ExcitedCoherent) {
    const auto g = padded(spec_.g);
    double un = 0.0;
    for (std::size_t m = 0; m < n; ++m) {
      d.u[m] = eps * std::sqrt(basis_[m].cell) * g[m];
      un += std::norm(d.u[m]);
    }
    un = std::sqrt(un);
    if (un > 0.0) {
      for (std::size_t m = 0; m < n; ++m) d.ghat[m] = d.u[m] / un;
      // sin(2 th)/2 = |u|/sqrt(eps) pins <A> = alpha + u exactly
      const double th = 0.5 * std::asin(std::min(1.0, 2.0 * un / std::sqrt(eps)));
      d.c = std::cos(th);
      d.s = std::sin(th);
    }
  }
  return d;
}

namespace {

struct CatBranches {
  std::vector<cplx> a, b;  // per-mode coherent amplitudes
  cplx o[2][2];            // overlaps <x|y>
  double z = 1.0;
};

CatBranches cat_branches(const ModeBasis& basis, const std::vector<cplx>& z0, const std::vector<cplx>& z1, double eps) {
  CatBranches cb;
  const std::size_t n = basis.size();
  cb.a.resize(n);
  cb.b.resize(n);
  for (std::size_t m = 0; m < n; ++m) {
    const double s = std::sqrt(basis[m].cell / eps);
    cb.a[m] = s * z0[m];
    cb.b[m] = s * z1[m];
  }
  const std::vector<cplx>* br[2] = {&cb.a, &cb.b};
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      cplx lg = 0.0;
      for (std::size_t m = 0; m < n; ++m) {
        const cplx xv = (*br[x])[m], yv = (*br[y])[m];
        lg += -0.5 * std::norm(xv) - 0.5 * std::norm(yv) + std::conj(xv) * yv;
      }
      cb.o[x][y] = std::exp(lg);
    }
  cb.z = (cb.o[0][0] + cb.o[0][1] + cb.o[1][0] + cb.o[1][1]).real();
  return cb;
}

}  // namespace

Moments FieldStateFamily::moments(double eps) const {
  const std::size_t n = basis_.size();
  const auto nn = static_cast<Eigen::Index>(n);
  Moments mo{VectorXc::Zero(nn), MatrixXc::Zero(nn, nn), MatrixXc::Zero(nn, nn)};
  if (spec_.kind == FamilyKind::Cat) {
    check_admissible(eps);
    const auto cb = cat_branches(basis_, padded(spec_.z0), padded(spec_.z1), eps);
    const std::vector<cplx>* br[2] = {&cb.a, &cb.b};
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) {
        const cplx w = cb.o[x][y] / cb.z;
        const auto &xv = *br[x], &yv = *br[y];
        for (std::size_t i = 0; i < n; ++i) {
          mo.m1(static_cast<Eigen::Index>(i)) += w * std::sqrt(eps) * yv[i];
          for (std::size_t j = 0; j < n; ++j) {
            mo.m2_aa(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += w * eps * yv[i] * yv[j];
            mo.m2_ada(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += w * eps * std::conj(xv[i]) * yv[j];
          }
        }
      }
    return mo;
  }
  const Derived d = derive(eps);
  for (std::size_t i = 0; i < n; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    mo.m1(ii) = d.alpha[i] + d.u[i];
    for (std::size_t j = 0; j < n; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      mo.m2_aa(ii, jj) = d.alpha[i] * d.alpha[j] + d.alpha[i] * d.u[j] + d.u[i] * d.alpha[j];
      mo.m2_ada(ii, jj) = std::conj(d.alpha[i]) * d.alpha[j] + std::conj(d.alpha[i]) * d.u[j] + std::conj(d.u[i]) * d.alpha[j] +
                          eps * d.s * d.s * std::conj(d.ghat[i]) * d.ghat[j];
    }
  }
  if (spec_.kind == FamilyKind::GaussianSqueezed) {
    for (std::size_t m = 0; m < n; ++m) {
      const double r = spec_.squeeze_r.empty() ? 0.0 : spec_.squeeze_r[m];
      const double ph = spec_.squeeze_phi.empty() ? 0.0 : spec_.squeeze_phi[m];
      const auto mm = static_cast<Eigen::Index>(m);
      mo.m2_aa(mm, mm) += -eps * std::exp(cplx(0.0, ph)) * std::sinh(r) * std::cosh(r);
      mo.m2_ada(mm, mm) += eps * std::sinh(r) * std::sinh(r);
    }
  }
  return mo;
}

cplx FieldStateFamily::quartic(double eps, std::size_t i, std::size_t j) const {
  if (spec_.kind == FamilyKind::Cat) {
    check_admissible(eps);
    const auto cb = cat_branches(basis_, padded(spec_.z0), padded(spec_.z1), eps);
    const std::vector<cplx>* br[2] = {&cb.a, &cb.b};
    cplx s = 0.0;
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) {
        const auto &xv = *br[x], &yv = *br[y];
        s += cb.o[x][y] * std::conj(xv[i]) * std::conj(xv[j]) * yv[i] * yv[j];
      }
    return eps * eps * s / cb.z;
  }
  const Derived d = derive(eps);
  const cplx ai = d.alpha[i], aj = d.alpha[j], ui = d.u[i], uj = d.u[j];
  // fluctuation moments of B = A - alpha: N = <B^* B>, M = <B B>
  auto nmat = [&](std::size_t p, std::size_t q) -> cplx {
    cplx v = eps * d.s * d.s * std::conj(d.ghat[p]) * d.ghat[q];
    if (spec_.kind == FamilyKind::GaussianSqueezed && p == q && !spec_.squeeze_r.empty())
      v += eps * std::sinh(spec_.squeeze_r[p]) * std::sinh(spec_.squeeze_r[p]);
    return v;
  };
  auto mmat = [&](std::size_t p, std::size_t q) -> cplx {
    if (spec_.kind != FamilyKind::GaussianSqueezed || p != q || spec_.squeeze_r.empty()) return 0.0;
    const double r = spec_.squeeze_r[p];
    const double ph = spec_.squeeze_phi.empty() ? 0.0 : spec_.squeeze_phi[p];
    return -eps * std::exp(cplx(0.0, ph)) * std::sinh(r) * std::cosh(r);
  };
  const cplx cai = std::conj(ai), caj = std::conj(aj);
  cplx v = std::norm(ai) * std::norm(aj);
  v += cai * caj * ai * uj + cai * caj * ui * aj + std::conj(ui) * caj * ai * aj + cai * std::conj(uj) * ai * aj;
  const cplx mij = mmat(i, j);
  v += std::conj(mij) * ai * aj + cai * caj * mij;
  v += nmat(i, i) * std::norm(aj) + nmat(i, j) * caj * ai + nmat(j, i) * cai * aj + nmat(j, j) * std::norm(ai);
  if (spec_.kind == FamilyKind::GaussianSqueezed) v += std::norm(mij) + nmat(i, i) * nmat(j, j) + nmat(i, j) * nmat(j, i);
  return v;
}

EnergyMoments FieldStateFamily::energy(double eps) const {
  const Moments mo = moments(eps);
  const std::size_t n = basis_.size();
  std::vector<double> w(n);
  for (std::size_t m = 0; m < n; ++m) w[m] = disp_.omega(basis_[m].k);
  EnergyMoments e;
  for (std::size_t m = 0; m < n; ++m) {
    const double occ = mo.m2_ada(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m)).real();
    e.number += occ;
    e.dgamma_omega += w[m] * occ;
    e.dgamma_omega2 += w[m] * w[m] * occ;
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) e.dgamma2 += w[i] * w[j] * quartic(eps, i, j).real();
  return e;
}

cplx FieldStateFamily::weyl(const std::vector<cplx>& eta, double eps) const {
  require(eta.size() == basis_.size(), "eta must have one entry per mode");
  const std::size_t n = basis_.size();
  std::vector<cplx> gam(n);
  double g2 = 0.0;
  for (std::size_t m = 0; m < n; ++m) {
    gam[m] = cplx(0.0, std::sqrt(eps * basis_[m].cell)) * eta[m];
    g2 += std::norm(gam[m]);
  }
  if (spec_.kind == FamilyKind::Cat) {
    check_admissible(eps);
    const auto cb = cat_branches(basis_, padded(spec_.z0), padded(spec_.z1), eps);
    const std::vector<cplx>* br[2] = {&cb.a, &cb.b};
    cplx s = 0.0;
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) {
        cplx lg = 0.0;
        for (std::size_t m = 0; m < n; ++m) {
          const cplx xv = (*br[x])[m], yv = (*br[y])[m], yg = yv + gam[m];
          lg += cplx(0.0, (gam[m] * std::conj(yv)).imag()) - 0.5 * std::norm(xv) - 0.5 * std::norm(yg) + std::conj(xv) * yg;
        }
        s += std::exp(lg);
      }
    return s / cb.z;
  }
  const Derived d = derive(eps);
  double phase = 0.0;
  for (std::size_t m = 0; m < n; ++m) phase += 2.0 * (gam[m] * std::conj(d.alpha[m]) / std::sqrt(eps)).imag();
  const cplx ph = std::exp(cplx(0.0, phase));
  switch (spec_.kind) {
    case FamilyKind::Vacuum:
    case FamilyKind::Coherent:
      return ph * std::exp(-0.5 * g2);
    case FamilyKind::ExcitedCoherent: {
      cplx gg = 0.0;  // <ghat, gamma>
      for (std::size_t m = 0; m < n; ++m) gg += std::conj(d.ghat[m]) * gam[m];
      const cplx br = d.c * d.c + d.c * d.s * (gg - std::conj(gg)) + d.s * d.s * (1.0 - std::norm(gg));
      return ph * std::exp(-0.5 * g2) * br;
    }
    case FamilyKind::GaussianSqueezed: {
      double lg = 0.0;
      for (std::size_t m = 0; m < n; ++m) {
        const double r = spec_.squeeze_r.empty() ? 0.0 : spec_.squeeze_r[m];
        const double phi = spec_.squeeze_phi.empty() ? 0.0 : spec_.squeeze_phi[m];
        const cplx gp = gam[m] * std::cosh(r) + std::conj(gam[m]) * std::exp(cplx(0.0, phi)) * std::sinh(r);
        lg += std::norm(gp);
      }
      return ph * std::exp(-0.5 * lg);
    }
    case FamilyKind::Cat:
      break;
  }
  return 0.0;
}

namespace {

// grows n until the exact per-mode vector keeps all but `tol` of its mass
template <class Make>
int fit_cap(double mean, double tol, Make make) {
  int n = std::max(1, poisson_cutoff(mean, tol));
  for (int it = 0; it < 64; ++it) {
    const VectorXc v = make(n);
    if (1.0 - v.squaredNorm() <= tol) return n;
    n += std::max(2, n / 4);
  }
  fail(ErrorKind::Solver, "could not meet the Fock truncation tail tolerance");
}

}  // namespace

FockBuild FieldStateFamily::fock_state(double eps, double tail_tol, std::size_t budget) const {
  const std::size_t n = basis_.size();
  const double per = tail_tol / static_cast<double>(2 * n + 2);
  FockTruncation tr;
  tr.epsilon = eps;
  tr.budget = budget;
  tr.n_max.assign(n, 0);

  auto finish = [&](VectorXc coeffs) {
    FockState st(tr, std::move(coeffs));
    const double tail = std::max(0.0, 1.0 - st.coefficients().squaredNorm());
    require(tail <= tail_tol, "Fock truncation tail exceeds the configured tolerance", ErrorKind::Solver);
    st.normalize();
    return FockBuild{std::move(st), tail};
  };

  if (spec_.kind == FamilyKind::Cat) {
    check_admissible(eps);
    const auto cb = cat_branches(basis_, padded(spec_.z0), padded(spec_.z1), eps);
    for (std::size_t m = 0; m < n; ++m) {
      const int na = fit_cap(std::norm(cb.a[m]), per, [&](int k) { return coherent_vector(cb.a[m], k); });
      const int nb = fit_cap(std::norm(cb.b[m]), per, [&](int k) { return coherent_vector(cb.b[m], k); });
      tr.n_max[m] = std::max(na, nb);
    }
    tr.validate();
    std::vector<VectorXc> fa(n), fb(n);
    for (std::size_t m = 0; m < n; ++m) {
      fa[m] = coherent_vector(cb.a[m], tr.n_max[m]);
      fb[m] = coherent_vector(cb.b[m], tr.n_max[m]);
    }
    VectorXc c = (FockState::product(tr, fa).coefficients() + FockState::product(tr, fb).coefficients()) / std::sqrt(cb.z);
    return finish(std::move(c));
  }

  const Derived d = derive(eps);
  std::vector<cplx> beta(n);
  for (std::size_t m = 0; m < n; ++m) beta[m] = d.alpha[m] / std::sqrt(eps);

  if (spec_.kind == FamilyKind::GaussianSqueezed) {
    std::vector<VectorXc> f(n);
    for (std::size_t m = 0; m < n; ++m) {
      const double r = spec_.squeeze_r.empty() ? 0.0 : spec_.squeeze_r[m];
      const double ph = spec_.squeeze_phi.empty() ? 0.0 : spec_.squeeze_phi[m];
      int nin = 2;
      while (true) {
        const VectorXc v = squeezed_vacuum_vector(r, ph, nin);
        if (1.0 - v.squaredNorm() <= per) break;
        nin += 2;
        require(nin < 4000, "squeezed vacuum truncation did not converge", ErrorKind::Solver);
      }
      const VectorXc sq = squeezed_vacuum_vector(r, ph, nin);
      int nout = nin + poisson_cutoff(std::norm(beta[m]), per) + 4;
      for (;;) {
        double tail = 0.0;
        VectorXc v = displace_vector(sq, beta[m], nout, &tail);
        if (1.0 - v.squaredNorm() <= per) {
          f[m] = std::move(v);
          break;
        }
        nout += std::max(4, nout / 4);
        require(nout < 4000, "displaced squeezed truncation did not converge", ErrorKind::Solver);
      }
      tr.n_max[m] = static_cast<int>(f[m].size()) - 1;
    }
    tr.validate();
    return finish(FockState::product(tr, f).coefficients());
  }

  for (std::size_t m = 0; m < n; ++m) {
    int cap = fit_cap(std::norm(beta[m]), per, [&](int k) { return coherent_vector(beta[m], k); });
    if (d.s != 0.0 && d.ghat[m] != cplx(0.0))
      cap = std::max(cap, fit_cap(std::norm(beta[m]), per, [&](int k) { return displaced_one_vector(beta[m], k); }));
    tr.n_max[m] = cap;
  }
  tr.validate();
  std::vector<VectorXc> coh(n);
  for (std::size_t m = 0; m < n; ++m) coh[m] = coherent_vector(beta[m], tr.n_max[m]);
  VectorXc c = d.c * FockState::product(tr, coh).coefficients();
  if (d.s != 0.0) {
    for (std::size_t j = 0; j < n; ++j) {
      if (d.ghat[j] == cplx(0.0)) continue;
      auto f = coh;
      f[j] = displaced_one_vector(beta[j], tr.n_max[j]);
      c += d.s * d.ghat[j] * FockState::product(tr, f).coefficients();
    }
  }
  return finish(std::move(c));
}

FieldStateFamily build_family(const FamilySpec& spec, const ModeBasis& basis, const Dispersion& disp) {
  return FieldStateFamily(spec, basis, disp);
}

Moments fock_moments(const FockState& state, const ModeBasis& basis) {
  const std::size_t n = state.modes();
  require(n == basis.size(), "state/basis mode count mismatch");
  const auto nn = static_cast<Eigen::Index>(n);
  Moments mo{VectorXc::Zero(nn), MatrixXc::Zero(nn, nn), MatrixXc::Zero(nn, nn)};
  const double nrm = state.coefficients().squaredNorm();
  std::vector<FockState> a(n);
  for (std::size_t m = 0; m < n; ++m) a[m] = ladder_apply(state, basis, m, Ladder::Annihilate);
  for (std::size_t m = 0; m < n; ++m) {
    const auto mm = static_cast<Eigen::Index>(m);
    mo.m1(mm) = state.inner(a[m]) / nrm;
    for (std::size_t k = 0; k < n; ++k) {
      const auto kk = static_cast<Eigen::Index>(k);
      mo.m2_ada(mm, kk) = a[m].inner(a[k]) / nrm;
      mo.m2_aa(mm, kk) = state.inner(ladder_apply(a[k], basis, m, Ladder::Annihilate)) / nrm;
    }
  }
  return mo;
}

FockState smeared_apply(const FockState& state, const ModeBasis& basis, const std::vector<cplx>& f, Ladder kind) {
  require(f.size() == basis.size(), "smearing function must have one entry per mode");
  FockState out(state.truncation());
  for (std::size_t m = 0; m < f.size(); ++m) {
    if (f[m] == cplx(0.0)) continue;
    const cplx w = std::sqrt(basis[m].cell) * (kind == Ladder::Create ? f[m] : std::conj(f[m]));
    out.coefficients() += w * ladder_apply(state, basis, m, kind).coefficients();
  }
  return out;
}

cplx weyl_expectation(const FieldStateFamily& family, const std::vector<cplx>& eta, double eps, Backend backend,
                      double tail_tol) {
  if (backend == Backend::ClosedForm) return family.weyl(eta, eps);
  const FockBuild fb = family.fock_state(eps, std::min(tail_tol, 1e-13));
  return weyl_expectation_fock(fb.state, family.basis(), eta, tail_tol).value;
}

cplx wick_monomial_expectation(const FieldStateFamily& family, const std::vector<std::vector<cplx>>& creators,
                               const std::vector<std::vector<cplx>>& annihilators, double eps, Backend backend) {
  const std::size_t deg = creators.size() + annihilators.size();
  const std::size_t limit = family.spec().grade == EnergyGrade::Nelson ? 1 : 2;
  require(deg <= limit, "monomial degree exceeds the bound admissible for the family's energy class");
  if (deg == 0) return 1.0;
  const ModeBasis& b = family.basis();
  for (const auto& g : creators) require(g.size() == b.size(), "symbol functions must have one entry per mode");
  for (const auto& g : annihilators) require(g.size() == b.size(), "symbol functions must have one entry per mode");

  if (backend == Backend::FockExact) {
    const FockBuild fb = family.fock_state(eps);
    FockState right = fb.state, left = fb.state;
    for (const auto& g : annihilators) right = smeared_apply(right, b, g, Ladder::Annihilate);
    for (const auto& g : creators) left = smeared_apply(left, b, g, Ladder::Annihilate);
    return left.inner(right);
  }

  const Moments mo = family.moments(eps);
  const std::size_t n = b.size();
  std::vector<double> sc(n);
  for (std::size_t m = 0; m < n; ++m) sc[m] = std::sqrt(b[m].cell);
  auto a1 = [&](const std::vector<cplx>& g) {  // <a(g)>
    cplx s = 0.0;
    for (std::size_t m = 0; m < n; ++m) s += sc[m] * std::conj(g[m]) * mo.m1(static_cast<Eigen::Index>(m));
    return s;
  };
  auto a2 = [&](const std::vector<cplx>& g1, const std::vector<cplx>& g2) {  // <a(g1) a(g2)>
    cplx s = 0.0;
    for (std::size_t m = 0; m < n; ++m)
      for (std::size_t k = 0; k < n; ++k)
        s += sc[m] * sc[k] * std::conj(g1[m]) * std::conj(g2[k]) * mo.m2_aa(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k));
    return s;
  };
  if (deg == 1) return creators.empty() ? a1(annihilators[0]) : std::conj(a1(creators[0]));
  if (creators.empty()) return a2(annihilators[0], annihilators[1]);
  if (annihilators.empty()) return std::conj(a2(creators[1], creators[0]));
  cplx s = 0.0;
  const auto& g1 = creators[0];
  const auto& g2 = annihilators[0];
  for (std::size_t m = 0; m < n; ++m)
    for (std::size_t k = 0; k < n; ++k)
      s += sc[m] * sc[k] * g1[m] * std::conj(g2[k]) * mo.m2_ada(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k));
  return s;
}

cplx classical_symbol_integral(const WignerMeasure& mu, const ModeBasis& basis,
                               const std::vector<std::vector<cplx>>& creators,
                               const std::vector<std::vector<cplx>>& annihilators) {
  cplx total = 0.0;
  for (std::size_t i = 0; i < mu.atoms.size(); ++i) {
    cplx v = 1.0;
    for (const auto& g : creators) v *= basis.inner(mu.atoms[i], g);
    for (const auto& g : annihilators) v *= basis.inner(g, mu.atoms[i]);
    total += mu.weights[i] * v;
  }
  return total;
}

}  // namespace qclim
