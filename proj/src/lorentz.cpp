#include "qclim/lorentz.hpp"

#include <algorithm>
#include <map>
#include <random>

#include "qclim/fft.hpp"

namespace qclim {

void LorentzIndex::validate() const {
  require(std::isfinite(p) && p >= 1.0, "Lorentz exponent p must be finite and >= 1");
  require(q >= 1.0, "Lorentz exponent q must be >= 1");
}

SampledFunction SampledFunction::uniform(std::vector<cplx> values, double cell, int dimension) {
  SampledFunction f;
  f.cells.assign(values.size(), cell);
  f.values = std::move(values);
  f.dimension = dimension;
  return f;
}

void SampledFunction::validate() const {
  require(values.size() == cells.size(), "samples and cell measures must have equal length");
  require(dimension >= 1 && dimension <= 3, "dimension must be 1, 2 or 3");
  for (std::size_t i = 0; i < values.size(); ++i) {
    require(std::isfinite(values[i].real()) && std::isfinite(values[i].imag()), "sampled function contains NaN/inf");
    require(cells[i] > 0.0 && std::isfinite(cells[i]), "cell measures must be positive and finite");
  }
}

double SampledFunction::measure() const {
  double s = 0.0;
  for (double c : cells) s += c;
  return s;
}

double quasinorm(const SampledFunction& f, const LorentzIndex& idx, LorentzConvention conv) {
  idx.validate();
  f.validate();
  std::vector<std::pair<double, double>> lv;  // (|f|, cell)
  lv.reserve(f.values.size());
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    const double a = std::abs(f.values[i]);
    if (a > 0.0) lv.emplace_back(a, f.cells[i]);
  }
  if (lv.empty()) return 0.0;
  std::sort(lv.begin(), lv.end(), [](const auto& x, const auto& y) { return x.first > y.first; });

  // distinct levels a_1 > a_2 > ... with M_j = |{|f| >= a_j}|
  std::vector<double> a, mass;
  double cum = 0.0;
  for (std::size_t i = 0; i < lv.size();) {
    const double level = lv[i].first;
    while (i < lv.size() && lv[i].first == level) cum += lv[i++].second;
    a.push_back(level);
    mass.push_back(cum);
  }
  const double p = idx.p;
  if (std::isinf(idx.q)) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) s = std::max(s, a[j] * std::pow(mass[j], 1.0 / p));
    return conv == LorentzConvention::WeakP ? p * s : s;
  }
  const double q = idx.q;
  // on [a_{j+1}, a_j) the distribution function equals M_j
  double integral = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double next = j + 1 < a.size() ? a[j + 1] : 0.0;
    integral += std::pow(mass[j], q / p) * (std::pow(a[j], q) - std::pow(next, q)) / q;
  }
  const double pref = conv == LorentzConvention::WeakP ? p : std::pow(p, 1.0 / q);
  return pref * std::pow(integral, 1.0 / q);
}

double lp_norm(const SampledFunction& f, double p) {
  f.validate();
  double s = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i) s += f.cells[i] * std::pow(std::abs(f.values[i]), p);
  return std::pow(s, 1.0 / p);
}

PointCloud spherical_grid(double r_min, double r_max, int n_r, int n_theta, int n_phi) {
  require(r_min > 0.0 && r_max > r_min, "spherical grid needs 0 < r_min < r_max");
  require(n_r > 0 && n_theta > 0 && n_phi > 0, "spherical grid needs positive resolution");
  PointCloud pc;
  const std::size_t total = static_cast<std::size_t>(n_r) * n_theta * n_phi;
  pc.points.reserve(total);
  pc.cells.reserve(total);
  const double ratio = r_max / r_min;
  for (int i = 0; i < n_r; ++i) {
    const double r0 = r_min * std::pow(ratio, static_cast<double>(i) / n_r);
    const double r1 = r_min * std::pow(ratio, static_cast<double>(i + 1) / n_r);
    const double rs = std::sqrt(r0 * r1);
    const double shell = (r1 * r1 * r1 - r0 * r0 * r0) / 3.0;
    for (int j = 0; j < n_theta; ++j) {
      const double c0 = -1.0 + 2.0 * j / n_theta, c1 = -1.0 + 2.0 * (j + 1) / n_theta;
      const double ct = 0.5 * (c0 + c1), st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
      for (int l = 0; l < n_phi; ++l) {
        const double ph = 2.0 * kPi * (l + 0.5) / n_phi;
        pc.points.push_back({rs * st * std::cos(ph), rs * st * std::sin(ph), rs * ct});
        pc.cells.push_back(shell * (c1 - c0) * (2.0 * kPi / n_phi));
      }
    }
  }
  return pc;
}

double weak_norm_inverse_k(int n) {
  const PointCloud pc = spherical_grid(0.1, 1.0, n, n, n);
  SampledFunction f;
  f.dimension = 3;
  f.cells = pc.cells;
  f.values.reserve(pc.points.size());
  for (const auto& k : pc.points) f.values.emplace_back(1.0 / norm(k));
  return quasinorm(f, {3.0, kInf}, LorentzConvention::WeakP);
}

std::size_t BoxGrid::size() const {
  std::size_t s = 1;
  for (int i = 0; i < d; ++i) s *= static_cast<std::size_t>(n);
  return s;
}

Vec3 BoxGrid::point(std::size_t flat) const {
  Vec3 x{0.0, 0.0, 0.0};
  const double h = spacing();
  for (int a = d - 1; a >= 0; --a) {
    x[static_cast<std::size_t>(a)] = -0.5 * length + h * static_cast<double>(flat % static_cast<std::size_t>(n));
    flat /= static_cast<std::size_t>(n);
  }
  return x;
}

namespace {

bool close(double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a) + std::abs(b)); }
double inv(double x) { return std::isinf(x) ? 0.0 : 1.0 / x; }

RatioReport ratio_of(double lhs, double rhs) {
  RatioReport r;
  r.lhs = lhs;
  r.rhs = rhs;
  if (rhs <= 0.0 || !std::isfinite(rhs)) {
    r.degenerate = true;
    r.ratio = lhs == 0.0 ? 0.0 : kInf;
  } else {
    r.ratio = lhs / rhs;
  }
  return r;
}

}  // namespace

RatioReport holder_check(const SampledFunction& f1, const SampledFunction& f2, const LorentzIndex& i1,
                         const LorentzIndex& i2, const LorentzIndex& out) {
  i1.validate();
  i2.validate();
  out.validate();
  require(close(1.0 / out.p, 1.0 / i1.p + 1.0 / i2.p), "Hoelder index relation 1/p = 1/p1 + 1/p2 violated");
  require(inv(out.q) <= inv(i1.q) + inv(i2.q) + 1e-12, "Hoelder index relation 1/q <= 1/q1 + 1/q2 violated");
  require(f1.values.size() == f2.values.size(), "Hoelder check needs a common grid");
  SampledFunction prod = f1;
  for (std::size_t i = 0; i < prod.values.size(); ++i) prod.values[i] *= f2.values[i];
  return ratio_of(quasinorm(prod, out), quasinorm(f1, i1) * quasinorm(f2, i2));
}

RatioReport young_check(const std::vector<cplx>& f1, const std::vector<cplx>& f2, const BoxGrid& grid,
                        const LorentzIndex& i1, const LorentzIndex& i2, const LorentzIndex& out) {
  for (const auto* ix : {&i1, &i2, &out}) {
    ix->validate();
    require(ix->p > 1.0, "Young check needs 1 < p, p1, p2 < inf");
  }
  require(close(1.0 + 1.0 / out.p, 1.0 / i1.p + 1.0 / i2.p), "Young index relation 1 + 1/p = 1/p1 + 1/p2 violated");
  require(f1.size() == grid.size() && f2.size() == grid.size(), "Young check: sample count must match the grid");

  // linear convolution on a 2n-per-axis zero-padded grid
  const int n = grid.n, m = 2 * n, d = grid.d;
  std::vector<int> pdims(static_cast<std::size_t>(d), m);
  std::size_t psize = 1;
  for (int a = 0; a < d; ++a) psize *= static_cast<std::size_t>(m);
  VectorXc a = VectorXc::Zero(static_cast<Eigen::Index>(psize)), b = a;
  for (std::size_t flat = 0; flat < grid.size(); ++flat) {
    std::size_t rem = flat, pflat = 0, stride = 1;
    for (int ax = d - 1; ax >= 0; --ax) {
      pflat += (rem % static_cast<std::size_t>(n)) * stride;
      rem /= static_cast<std::size_t>(n);
      stride *= static_cast<std::size_t>(m);
    }
    a(static_cast<Eigen::Index>(pflat)) = f1[flat];
    b(static_cast<Eigen::Index>(pflat)) = f2[flat];
  }
  fft::forward(pdims, a);
  fft::forward(pdims, b);
  a = a.cwiseProduct(b);
  fft::inverse(pdims, a);
  a *= grid.cell() / static_cast<double>(psize);

  SampledFunction conv = SampledFunction::uniform(std::vector<cplx>(a.data(), a.data() + a.size()), grid.cell(), d);
  SampledFunction s1 = SampledFunction::uniform(f1, grid.cell(), d);
  SampledFunction s2 = SampledFunction::uniform(f2, grid.cell(), d);
  return ratio_of(quasinorm(conv, out), quasinorm(s1, i1) * quasinorm(s2, i2));
}

SampledFunction fourier_samples(const std::vector<cplx>& psi, const BoxGrid& grid) {
  require(psi.size() == grid.size(), "sample count must match the grid");
  VectorXc v = Eigen::Map<const VectorXc>(psi.data(), static_cast<Eigen::Index>(psi.size()));
  // F(psi)(k) = (2 pi)^{-d/2} h^d sum_x e^{-i k x} psi(x); the box origin shift is a pure phase
  fft::forward(grid.dims(), v);
  v *= grid.cell() / std::pow(2.0 * kPi, 0.5 * grid.d);
  const double dk = 2.0 * kPi / grid.length;
  return SampledFunction::uniform(std::vector<cplx>(v.data(), v.data() + v.size()), std::pow(dk, grid.d), grid.d);
}

namespace {

double kmod(const BoxGrid& grid, std::size_t flat) {
  const double dk = 2.0 * kPi / grid.length;
  double k2 = 0.0;
  for (int a = 0; a < grid.d; ++a) {
    const int f = fft::frequency(static_cast<int>(flat % static_cast<std::size_t>(grid.n)), grid.n);
    flat /= static_cast<std::size_t>(grid.n);
    k2 += (dk * f) * (dk * f);
  }
  return std::sqrt(k2);
}

}  // namespace

double homogeneous_sobolev_norm(const std::vector<cplx>& psi, const BoxGrid& grid, double alpha) {
  require(alpha >= 0.0, "Sobolev order must be nonnegative");
  const SampledFunction f = fourier_samples(psi, grid);
  double s = 0.0;
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    const double k = kmod(grid, i);
    if (alpha > 0.0 && k == 0.0) continue;
    s += f.cells[i] * std::pow(k, 2.0 * alpha) * std::norm(f.values[i]);
  }
  return std::sqrt(s);
}

RatioReport sobolev_fourier_product_ratio(const std::vector<cplx>& psi1, const std::vector<cplx>& psi2, double alpha1,
                                          double alpha2, const BoxGrid& grid) {
  require(alpha1 >= 0.0 && alpha2 >= 0.0, "Sobolev orders must be nonnegative");
  const double inv_p = (alpha1 + alpha2) / grid.d;
  require(inv_p > 0.0 && inv_p <= 1.0, "(alpha1 + alpha2)/d must lie in (0, 1]");
  require(psi1.size() == grid.size() && psi2.size() == grid.size(), "sample count must match the grid");
  std::vector<cplx> prod(psi1.size());
  for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = psi1[i] * psi2[i];
  const double lhs = quasinorm(fourier_samples(prod, grid), {1.0 / inv_p, 2.0});
  const double rhs = homogeneous_sobolev_norm(psi1, grid, alpha1) * homogeneous_sobolev_norm(psi2, grid, alpha2);
  return ratio_of(lhs, rhs);
}

std::vector<cplx> gaussian_mixture(const BoxGrid& grid, std::uint64_t seed, int member, bool complex_phase) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(member), 0x51edu};
  std::mt19937_64 rng(seq);
  std::uniform_real_distribution<double> centre(-2.0, 2.0), width(0.8, 1.6), amp(0.5, 1.5), wave(-1.0, 1.0);
  struct Bump {
    Vec3 c;
    double w, a;
    Vec3 k;
  };
  std::vector<Bump> bumps(3);
  for (auto& b : bumps) {
    for (int i = 0; i < 3; ++i) b.c[static_cast<std::size_t>(i)] = i < grid.d ? centre(rng) : 0.0;
    b.w = width(rng);
    b.a = amp(rng);
    for (int i = 0; i < 3; ++i) b.k[static_cast<std::size_t>(i)] = i < grid.d ? wave(rng) : 0.0;
  }
  std::vector<cplx> v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec3 x = grid.point(i);
    cplx s = 0.0;
    for (const auto& b : bumps) {
      const Vec3 r = sub(x, b.c);
      const cplx ph = complex_phase ? std::exp(cplx(0.0, dot(b.k, x))) : cplx(1.0);
      s += b.a * std::exp(-0.5 * dot(r, r) / (b.w * b.w)) * ph;
    }
    v[i] = s;
  }
  return v;
}

std::vector<CorpusRow> run_corpus(const CorpusSpec& spec) {
  require(spec.members >= 1, "corpus needs at least one member");
  require(!spec.grid_sizes.empty(), "corpus needs grid sizes");
  std::vector<CorpusRow> rows;
  for (int n : spec.grid_sizes) {
    require(n >= 4, "corpus grids need at least 4 points per axis");
    const BoxGrid grid{3, n, spec.box};
    std::map<std::string, std::vector<double>> ratios;
    for (int m = 0; m < spec.members; ++m) {
      const auto f1 = gaussian_mixture(grid, spec.seed, 2 * m);
      const auto f2 = gaussian_mixture(grid, spec.seed, 2 * m + 1);
      const auto s1 = SampledFunction::uniform(f1, grid.cell(), 3);
      const auto s2 = SampledFunction::uniform(f2, grid.cell(), 3);

      ratios["holder_3inf_62_22"].push_back(holder_check(s1, s2, {3, kInf}, {6, 2}, {2, 2}).ratio);
      ratios["young_15inf_151_31"].push_back(young_check(f1, f2, grid, {1.5, kInf}, {1.5, 1}, {3, 1}).ratio);
      ratios["embed_62_6inf"].push_back(quasinorm(s1, {6, kInf}) / quasinorm(s1, {6, 2}));
      ratios["embed_32_3inf"].push_back(quasinorm(s1, {3, kInf}) / quasinorm(s1, {3, 2}));
      ratios["embed_31_32"].push_back(quasinorm(s1, {3, 2}) / quasinorm(s1, {3, 1}));
      ratios["lpp_lp_2"].push_back(quasinorm(s1, {2, 2}) / lp_norm(s1, 2.0));

      const auto p1 = gaussian_mixture(grid, spec.seed, 2 * m, true);
      const auto p2 = gaussian_mixture(grid, spec.seed, 2 * m + 1, true);
      ratios["sobolev_0_0.5"].push_back(sobolev_fourier_product_ratio(p1, p2, 0.0, 0.5, grid).ratio);
      ratios["sobolev_0_1"].push_back(sobolev_fourier_product_ratio(p1, p2, 0.0, 1.0, grid).ratio);
      ratios["sobolev_0.5_0.5"].push_back(sobolev_fourier_product_ratio(p1, p2, 0.5, 0.5, grid).ratio);
      ratios["sobolev_0.75_0.75"].push_back(sobolev_fourier_product_ratio(p1, p2, 0.75, 0.75, grid).ratio);
    }
    for (auto& [lemma, v] : ratios) {
      std::sort(v.begin(), v.end());
      const std::size_t k95 = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(v.size()))) - 1;
      rows.push_back({spec.corpus_id, lemma, n, v.back(), v[std::min(k95, v.size() - 1)]});
    }
  }
  return rows;
}

double corpus_max_spread(const std::vector<CorpusRow>& rows, const std::string& lemma_id) {
  double lo = kInf, hi = 0.0;
  for (const auto& r : rows)
    if (r.lemma_id == lemma_id) {
      lo = std::min(lo, r.ratio_max);
      hi = std::max(hi, r.ratio_max);
    }
  require(hi > 0.0 && std::isfinite(lo), "no finite corpus rows for lemma " + lemma_id);
  return (hi - lo) / lo;
}

}  // namespace qclim
