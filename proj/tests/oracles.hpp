#pragma once

// Independent reference computations used by the tests and the acceptance binary. They work on raw
// coefficient tensors and explicit sums and share no contraction code with the library.

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "qclim/families.hpp"
#include "qclim/particle_grid.hpp"
#include "qclim/potentials.hpp"

namespace oracle {

using qclim::cplx;
using qclim::VectorXc;

struct Layout {
  std::vector<int> levels;
  std::vector<std::size_t> stride;
  std::size_t size = 1;
  explicit Layout(const std::vector<int>& n_max) : levels(n_max.size()), stride(n_max.size()) {
    for (std::size_t m = n_max.size(); m-- > 0;) {
      levels[m] = n_max[m] + 1;
      stride[m] = size;
      size *= static_cast<std::size_t>(levels[m]);
    }
  }
  int occ(std::size_t flat, std::size_t m) const { return static_cast<int>(flat / stride[m]) % levels[m]; }
};

// A_m = sqrt(eps) b on mode m of a raw tensor
inline VectorXc annihilate(const VectorXc& c, const Layout& l, std::size_t m, double eps) {
  VectorXc out = VectorXc::Zero(c.size());
  const double s = std::sqrt(eps);
  for (std::size_t i = 0; i < l.size; ++i) {
    const int n = l.occ(i, m);
    if (n > 0) out(static_cast<Eigen::Index>(i - l.stride[m])) += s * std::sqrt(double(n)) * c(static_cast<Eigen::Index>(i));
  }
  return out;
}

// A_m^* = sqrt(eps) b^* on mode m, top level dropped
inline VectorXc create(const VectorXc& c, const Layout& l, std::size_t m, double eps) {
  VectorXc out = VectorXc::Zero(c.size());
  const double s = std::sqrt(eps);
  for (std::size_t i = 0; i < l.size; ++i) {
    const int n = l.occ(i, m);
    if (n + 1 < l.levels[m])
      out(static_cast<Eigen::Index>(i + l.stride[m])) += s * std::sqrt(double(n + 1)) * c(static_cast<Eigen::Index>(i));
  }
  return out;
}

// Annihilation part of the field at x, component comp: sum_m sqrt(c) w_m,comp e^{-ik.x} A_m applied to Psi.
inline VectorXc field_minus(const VectorXc& psi, const Layout& l, const qclim::ModeBasis& b, const qclim::CouplingSpec& cs,
                            double eps, const qclim::Vec3& x, int comp, bool curl = false) {
  VectorXc out = VectorXc::Zero(psi.size());
  for (std::size_t m = 0; m < b.size(); ++m) {
    const qclim::Vec3 w = cs.vector_weight(b[m]);
    cplx coef;
    if (!curl) {
      coef = w[static_cast<std::size_t>(comp)];
    } else {
      // curl of e^{-ik.x} w is -i k x w
      const qclim::Vec3 kw = qclim::cross(b[m].k, w);
      coef = cplx(0.0, -1.0) * kw[static_cast<std::size_t>(comp)];
    }
    if (coef == cplx(0.0)) continue;
    coef *= std::sqrt(b[m].cell) * std::exp(cplx(0.0, -qclim::dot(b[m].k, x)));
    out += coef * annihilate(psi, l, m, eps);
  }
  return out;
}

struct FieldAt {
  double v = 0.0;               // <Phi(x)> (scalar) or component 0 of <A(x)>
  qclim::Vec3 a{0.0, 0.0, 0.0};  // <A(x)>
  qclim::Vec3 b{0.0, 0.0, 0.0};  // <curl A(x)>
  double w = 0.0;               // <:A(x).A(x):>
};

inline FieldAt contract(const qclim::FockState& st, const qclim::ModeBasis& b, const qclim::CouplingSpec& cs,
                        const qclim::Vec3& x) {
  const Layout l(st.truncation().n_max);
  const double eps = st.epsilon();
  const VectorXc& psi = st.coefficients();
  FieldAt f;
  for (int c = 0; c < 3; ++c) {
    const VectorXc a1 = field_minus(psi, l, b, cs, eps, x, c);
    f.a[static_cast<std::size_t>(c)] = 2.0 * psi.dot(a1).real();
    const VectorXc a2 = field_minus(a1, l, b, cs, eps, x, c);
    f.w += 2.0 * psi.dot(a2).real() + 2.0 * a1.squaredNorm();
    f.b[static_cast<std::size_t>(c)] = 2.0 * psi.dot(field_minus(psi, l, b, cs, eps, x, c, true)).real();
  }
  f.v = f.a[0];
  return f;
}

// Classical field of a coherent centre z (continuum densities): 2 Re sum_m c_m w_m e^{-ik.x} z_m.
inline FieldAt classical(const std::vector<cplx>& z, const qclim::ModeBasis& b, const qclim::CouplingSpec& cs,
                         const qclim::Vec3& x) {
  FieldAt f;
  for (std::size_t m = 0; m < b.size(); ++m) {
    const qclim::Vec3 w = cs.vector_weight(b[m]);
    const cplx ph = b[m].cell * z[m] * std::exp(cplx(0.0, -qclim::dot(b[m].k, x)));
    const qclim::Vec3 kw = qclim::cross(b[m].k, w);
    for (std::size_t c = 0; c < 3; ++c) {
      f.a[c] += 2.0 * (ph * w[c]).real();
      f.b[c] += 2.0 * (cplx(0.0, -1.0) * ph * kw[c]).real();
    }
  }
  f.v = f.a[0];
  f.w = qclim::dot(f.a, f.a);
  return f;
}

// h^d sum D(x_j) conj(psi_j) phi_j
inline cplx pairing(const std::vector<double>& d, const VectorXc& psi, const VectorXc& phi, const qclim::ParticleGrid& g) {
  cplx s = 0.0;
  for (Eigen::Index j = 0; j < psi.size(); ++j) s += d[static_cast<std::size_t>(j)] * std::conj(psi(j)) * phi(j);
  return g.cell() * s;
}

// Field energy eps sum_m omega_m <n_m> of a raw tensor.
inline double field_energy(const qclim::FockState& st, const qclim::ModeBasis& b, const qclim::Dispersion& disp) {
  const Layout l(st.truncation().n_max);
  double e = 0.0;
  for (std::size_t i = 0; i < l.size; ++i) {
    const double p = std::norm(st.coefficients()(static_cast<Eigen::Index>(i)));
    for (std::size_t m = 0; m < b.size(); ++m) e += st.epsilon() * disp.omega(b[m].k) * l.occ(i, m) * p;
  }
  return e;
}

// <psi (x) Psi, H (psi (x) Psi)> - <dGamma(omega)> for H = (-Lap + U) (x) 1 + 1 (x) dGamma(omega) + Phi, on the
// tensor grid x Fock space of a 1d periodic grid. The interaction is applied pointwise at the nodes; the kinetic
// part by the spectral symbol built here from an explicit DFT. U enters through the trigonometric interpolant
// of each column evaluated on the doubled grid, u(y) given there as a function.
inline double bridge_energy(const VectorXc& psi, const qclim::ParticleGrid& g, const std::function<double(double)>& u,
                            const qclim::FockState& st, const qclim::ModeBasis& b, const qclim::CouplingSpec& cs) {
  const Layout l(st.truncation().n_max);
  const auto np = static_cast<Eigen::Index>(g.points());
  const auto nf = static_cast<Eigen::Index>(l.size);
  // state tensor T(j, f) = psi_j Psi_f
  Eigen::MatrixXcd t = psi * st.coefficients().transpose();
  Eigen::MatrixXcd ht = Eigen::MatrixXcd::Zero(np, nf);
  // kinetic: explicit DFT on a 1d periodic grid
  const int n = g.n;
  for (int k = 0; k < n; ++k) {
    const int f = k < (n + 1) / 2 ? k : k - n;
    const double kk = 2.0 * qclim::kPi * f / g.length;
    VectorXc mode(np);
    for (int j = 0; j < n; ++j) mode(j) = std::exp(cplx(0.0, kk * g.point(static_cast<std::size_t>(j))[0])) / std::sqrt(double(n));
    ht += kk * kk * mode * (mode.adjoint() * t);
  }
  // field energy
  for (Eigen::Index j = 0; j < np; ++j) {
    VectorXc row = t.row(j).transpose();
    VectorXc acc = VectorXc::Zero(nf);
    for (std::size_t m = 0; m < b.size(); ++m)
      acc += cs.dispersion.omega(b[m].k) * create(annihilate(row, l, m, st.epsilon()), l, m, st.epsilon());
    ht.row(j) += acc.transpose();
  }
  double total = g.cell() * (t.conjugate().cwiseProduct(ht)).sum().real();
  // U and Phi act on the trigonometric interpolant of each column at y_m = -L/2 + m h/2, frequencies
  // -n/2 .. n/2 - 1, with the fine quadrature weight h/2
  Eigen::MatrixXcd interp(2 * n, n);
  for (int m = 0; m < 2 * n; ++m) {
    const double y = -0.5 * g.length + 0.5 * g.spacing() * m;
    for (int j = 0; j < n; ++j) {
      cplx s = 0.0;
      for (int f = -n / 2; f < n - n / 2; ++f)
        s += std::exp(cplx(0.0, 2.0 * qclim::kPi * f * (y - g.point(static_cast<std::size_t>(j))[0]) / g.length));
      interp(m, j) = s / double(n);
    }
  }
  const Eigen::MatrixXcd fine = interp * t;
  for (int m = 0; m < 2 * n; ++m) {
    const double y = -0.5 * g.length + 0.5 * g.spacing() * m;
    const VectorXc row = fine.row(m).transpose();
    // Phi(y) = sum sqrt(c) w (e^{iky} A^* + e^{-iky} A)
    VectorXc acc = u(y) * row;
    for (std::size_t k = 0; k < b.size(); ++k) {
      const double w = cs.weight(b[k].k) * std::sqrt(b[k].cell);
      const cplx e = std::exp(cplx(0.0, b[k].k[0] * y));
      acc += w * (e * create(row, l, k, st.epsilon()) + std::conj(e) * annihilate(row, l, k, st.epsilon()));
    }
    total += 0.5 * g.spacing() * row.dot(acc).real();
  }
  return total - g.cell() * psi.squaredNorm() * field_energy(st, b, cs.dispersion);
}

// e^{2i Re<eta, z0>} e^{-eps ||eta||^2 / 2}
inline cplx coherent_weyl(const qclim::ModeBasis& b, const std::vector<cplx>& eta, const std::vector<cplx>& z0, double eps) {
  cplx ip = 0.0;
  double n2 = 0.0;
  for (std::size_t m = 0; m < b.size(); ++m) {
    ip += b[m].cell * std::conj(eta[m]) * z0[m];
    n2 += b[m].cell * std::norm(eta[m]);
  }
  return std::exp(cplx(0.0, 2.0 * ip.real())) * std::exp(-0.5 * eps * n2);
}

// 2 eps sum over distinct k of cell chi^2 / omega (two transverse polarizations per k)
inline double wick_formula(const qclim::ModeBasis& b, const qclim::CouplingSpec& cs, double eps) {
  double s = 0.0;
  for (const auto& m : b.modes()) {
    if (m.polarization == 2) continue;
    const double chi = cs.chi(m.k, cs.dispersion);
    s += m.cell * chi * chi / cs.dispersion.omega(m.k);
  }
  return 2.0 * eps * s;
}

}  // namespace oracle
