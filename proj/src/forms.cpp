#include "qclim/forms.hpp"

#include <sstream>

namespace qclim {

std::string to_string(PartTag t) {
  switch (t) {
    case PartTag::Kinetic:
      return "kinetic";
    case PartTag::UPlus:
      return "U_plus";
    case PartTag::UMinus:
      return "U_minus";
    case PartTag::V:
      return "V";
    case PartTag::ACross:
      return "A_cross_terms";
    case PartTag::W:
      return "W";
    case PartTag::SigmaB:
      return "sigma_B";
  }
  return "kinetic";
}

QuadraticForm::QuadraticForm(ParticleGrid grid) : grid_(grid) { grid_.validate(); }

std::vector<PartTag> QuadraticForm::tags() const {
  std::vector<PartTag> t{PartTag::Kinetic};
  for (const auto& [tag, m] : scalars_) t.push_back(tag);
  if (has_vector_) {
    t.push_back(PartTag::ACross);
    if (route_ == PauliRoute::Split) t.push_back(PartTag::SigmaB);
  }
  return t;
}

void QuadraticForm::add_scalar(PartTag tag, Multiplier m, double sign) {
  require(m.is_real(), "potential part " + to_string(tag) + " is not real");
  scalars_.emplace_back(tag, m.scaled(sign));
}

void QuadraticForm::set_vector_potential(std::array<Multiplier, 3> a, std::array<Multiplier, 3> b, PauliRoute route) {
  require(grid_.spinor == 2, "vector potentials need a spinor grid");
  require(grid_.boundary == Boundary::Periodic, "Pauli assembly needs a periodic grid");
  a_ = std::move(a);
  b_ = std::move(b);
  route_ = route;
  has_vector_ = true;
}

namespace {

using Spinor = std::array<VectorXc, 2>;

// sigma_k as 2x2 complex matrices
const std::array<std::array<std::array<cplx, 2>, 2>, 3>& pauli() {
  static const std::array<std::array<std::array<cplx, 2>, 2>, 3> s{{
      {{{0.0, 1.0}, {1.0, 0.0}}},
      {{{0.0, cplx(0.0, -1.0)}, {cplx(0.0, 1.0), 0.0}}},
      {{{1.0, 0.0}, {0.0, -1.0}}},
  }};
  return s;
}

}  // namespace

VectorXc QuadraticForm::apply_scalar_parts(const VectorXc& psi, std::optional<PartTag> only) const {
  const std::size_t p = grid_.points();
  VectorXc out = VectorXc::Zero(psi.size());
  for (const auto& [tag, m] : scalars_) {
    if (only && *only != tag) continue;
    for (int s = 0; s < grid_.spinor; ++s) {
      const auto off = static_cast<Eigen::Index>(s * p);
      out.segment(off, static_cast<Eigen::Index>(p)) += m.apply(psi.segment(off, static_cast<Eigen::Index>(p)));
    }
  }
  return out;
}

VectorXc QuadraticForm::apply_pauli(const VectorXc& psi, bool cross, bool sigma_b) const {
  const std::size_t p = grid_.points();
  const auto pp = static_cast<Eigen::Index>(p);
  VectorXc out = VectorXc::Zero(psi.size());
  if (!has_vector_) return out;
  const ParticleGrid sg = grid_.scalar();
  const Spinor in{psi.segment(0, pp), psi.segment(pp, pp)};
  const auto& sig = pauli();

  if (route_ == PauliRoute::PauliProduct) {
    if (!cross) return out;
    // P_j psi and A_j psi per component, reused across the nine (i, j) pairs
    std::array<Spinor, 3> ppsi, apsi;
    for (int j = 0; j < 3; ++j)
      for (int s = 0; s < 2; ++s) {
        ppsi[static_cast<std::size_t>(j)][static_cast<std::size_t>(s)] =
            j < grid_.d ? momentum_apply(sg, j, in[static_cast<std::size_t>(s)]) : VectorXc::Zero(pp);
        apsi[static_cast<std::size_t>(j)][static_cast<std::size_t>(s)] = a_[static_cast<std::size_t>(j)].apply(in[static_cast<std::size_t>(s)]);
      }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        Spinor t;
        for (int s = 0; s < 2; ++s) {
          VectorXc v = a_[static_cast<std::size_t>(i)].apply(ppsi[static_cast<std::size_t>(j)][static_cast<std::size_t>(s)]);
          if (i < grid_.d) v += momentum_apply(sg, i, apsi[static_cast<std::size_t>(j)][static_cast<std::size_t>(s)]);
          t[static_cast<std::size_t>(s)] = std::move(v);
        }
        // sigma_i sigma_j
        std::array<std::array<cplx, 2>, 2> m{};
        for (int r = 0; r < 2; ++r)
          for (int c = 0; c < 2; ++c)
            for (int k = 0; k < 2; ++k) m[r][c] += sig[i][r][k] * sig[j][k][c];
        for (int r = 0; r < 2; ++r)
          out.segment(r * pp, pp) -= m[r][0] * t[0] + m[r][1] * t[1];
      }
    return out;
  }

  for (int s = 0; s < 2; ++s) {
    const auto off = s * pp;
    if (cross) {
      for (int i = 0; i < grid_.d; ++i) {
        const VectorXc& x = in[static_cast<std::size_t>(s)];
        out.segment(off, pp) -= momentum_apply(sg, i, a_[static_cast<std::size_t>(i)].apply(x)) +
                                a_[static_cast<std::size_t>(i)].apply(momentum_apply(sg, i, x));
      }
    }
  }
  if (sigma_b) {
    for (int k = 0; k < 3; ++k) {
      const Spinor bk{b_[static_cast<std::size_t>(k)].apply(in[0]), b_[static_cast<std::size_t>(k)].apply(in[1])};
      for (int r = 0; r < 2; ++r) out.segment(r * pp, pp) -= sig[k][r][0] * bk[0] + sig[k][r][1] * bk[1];
    }
  }
  return out;
}

VectorXc QuadraticForm::apply(const VectorXc& psi) const {
  require(static_cast<std::size_t>(psi.size()) == dimension(), "vector size does not match the form");
  VectorXc out = laplacian_apply(grid_, psi);
  out += apply_scalar_parts(psi, std::nullopt);
  if (has_vector_) out += apply_pauli(psi, true, true);
  return out;
}

VectorXc QuadraticForm::apply_part(PartTag tag, const VectorXc& psi) const {
  require(static_cast<std::size_t>(psi.size()) == dimension(), "vector size does not match the form");
  switch (tag) {
    case PartTag::Kinetic:
      return laplacian_apply(grid_, psi);
    case PartTag::ACross:
      return apply_pauli(psi, true, false);
    case PartTag::SigmaB:
      return apply_pauli(psi, false, true);
    default:
      return apply_scalar_parts(psi, tag);
  }
}

MatrixXc QuadraticForm::to_dense() const {
  const auto n = static_cast<Eigen::Index>(dimension());
  MatrixXc h(n, n);
  VectorXc e = VectorXc::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    e(j) = 1.0;
    h.col(j) = apply(e);
    e(j) = 0.0;
  }
  return h;
}

MatrixXc QuadraticForm::part_dense(PartTag tag) const {
  const auto n = static_cast<Eigen::Index>(dimension());
  MatrixXc h(n, n);
  VectorXc e = VectorXc::Zero(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    e(j) = 1.0;
    h.col(j) = apply_part(tag, e);
    e(j) = 0.0;
  }
  return h;
}

double QuadraticForm::hermiticity_defect() const {
  const MatrixXc h = to_dense();
  return (h - h.adjoint()).cwiseAbs().maxCoeff();
}

VectorXr QuadraticForm::diagonal() const {
  const std::size_t p = grid_.points();
  VectorXr d = VectorXr::Zero(static_cast<Eigen::Index>(dimension()));
  const double h = grid_.spacing();
  double kin = 0.0;
  if (grid_.boundary == Boundary::Dirichlet) {
    kin = 2.0 * grid_.d / (h * h);
  } else {
    const auto sym = laplacian_symbol(grid_);
    for (double s : sym) kin += s;
    kin /= static_cast<double>(sym.size());
  }
  d.setConstant(kin);
  for (const auto& [tag, m] : scalars_) {
    const auto& s = m.samples();
    if (grid_.boundary == Boundary::Dirichlet) {
      for (int c = 0; c < grid_.spinor; ++c)
        for (std::size_t i = 0; i < p; ++i) d(static_cast<Eigen::Index>(c * p + i)) += s[i].real();
    } else {
      double mean = 0.0;
      for (const auto& v : s) mean += v.real();
      d.array() += mean / static_cast<double>(s.size());
    }
  }
  return d;
}

std::string QuadraticForm::triplets(double drop) const {
  const MatrixXc h = to_dense();
  std::ostringstream os;
  os.precision(17);
  std::size_t nnz = 0;
  for (Eigen::Index j = 0; j < h.cols(); ++j)
    for (Eigen::Index i = 0; i < h.rows(); ++i)
      if (std::abs(h(i, j)) > drop) ++nnz;
  os << "# qclim-triplets v1\n# rows cols nnz\n" << h.rows() << " " << h.cols() << " " << nnz << "\n";
  for (Eigen::Index j = 0; j < h.cols(); ++j)
    for (Eigen::Index i = 0; i < h.rows(); ++i)
      if (std::abs(h(i, j)) > drop) os << i << " " << j << " " << h(i, j).real() << " " << h(i, j).imag() << "\n";
  return os.str();
}

QuadraticForm assemble_nelson(const ParticleGrid& grid, const ExternalPotential& u, const Multiplier* v) {
  require(grid.spinor == 1, "the Nelson form acts on scalar wave functions");
  QuadraticForm q(grid);
  q.add_scalar(PartTag::UPlus, u.u_plus(grid));
  q.add_scalar(PartTag::UMinus, u.u_minus(grid), -1.0);
  if (v) {
    require(v->is_real(), "V must be real on the grid");
    q.add_scalar(PartTag::V, *v);
  }
  return q;
}

QuadraticForm assemble_nelson(const ParticleGrid& grid, const ExternalPotential& u, const EffectivePotential* v) {
  if (!v) return assemble_nelson(grid, u, static_cast<const Multiplier*>(nullptr));
  require(v->kind == PotentialKind::ScalarV, "Nelson assembly needs a scalar V");
  const Multiplier m = v->multiplier(grid);
  return assemble_nelson(grid, u, &m);
}

QuadraticForm assemble_pauli(const ParticleGrid& grid, const ExternalPotential& u, const EffectivePotential* a,
                             const EffectivePotential* w, const EffectivePotential* b, PauliRoute route, double b_tolerance) {
  require(grid.spinor == 2, "the Pauli form acts on 2-spinors");
  require(grid.boundary == Boundary::Periodic, "Pauli assembly needs a periodic grid");
  QuadraticForm q(grid);
  q.add_scalar(PartTag::UPlus, u.u_plus(grid));
  q.add_scalar(PartTag::UMinus, u.u_minus(grid), -1.0);
  if (w) {
    require(w->kind == PotentialKind::ScalarW, "W must be a scalar potential");
    q.add_scalar(PartTag::W, w->multiplier(grid));
  }
  if (!a) {
    require(b == nullptr, "B supplied without A");
    return q;
  }
  require(a->kind == PotentialKind::VectorA, "A must be a vector potential");
  const ParticleGrid sg = grid.scalar();
  const ParticleGrid fg = grid.fine();
  const auto pts = evaluation_points(sg);
  std::array<std::vector<double>, 3> af;
  std::array<Multiplier, 3> am, bm;
  for (int c = 0; c < 3; ++c) {
    af[static_cast<std::size_t>(c)] = a->sample(pts, c);
    am[static_cast<std::size_t>(c)] = Multiplier(sg, std::vector<cplx>(af[static_cast<std::size_t>(c)].begin(), af[static_cast<std::size_t>(c)].end()));
  }
  // spectral curl on the oversampled grid keeps the discrete product rule exact
  const auto bc = curl_of(af, fg);
  for (int c = 0; c < 3; ++c) {
    const auto& bcv = bc[static_cast<std::size_t>(c)];
    if (b) {
      require(b->kind == PotentialKind::VectorB, "B must be a vector field");
      const auto bs = b->sample(pts, c);
      double diff = 0.0, sup = 0.0;
      for (std::size_t i = 0; i < bs.size(); ++i) {
        diff = std::max(diff, std::abs(bs[i] - bcv[i]));
        sup = std::max(sup, std::abs(bcv[i]));
      }
      require(diff <= b_tolerance * std::max(1.0, sup), "B inconsistent with curl A beyond tolerance");
    }
    bm[static_cast<std::size_t>(c)] = Multiplier(sg, std::vector<cplx>(bcv.begin(), bcv.end()));
  }
  q.set_vector_potential(am, bm, route);
  return q;
}

}  // namespace qclim
