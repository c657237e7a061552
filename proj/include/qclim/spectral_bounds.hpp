#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "qclim/forms.hpp"
#include "qclim/solvers.hpp"

namespace qclim {

struct KlmnRung {
  double b = 0.0;  // ladder shift
  double a = 0.0;  // largest eigenvalue of the pencil (|V|, -Delta + b)
};

/// |<psi, V psi>| <= a <psi, -Delta psi> + b_const ||psi||^2 with b_const = a * b for a ladder rung,
/// or the trivial witness (0, sup|V|).
struct KlmnResult {
  std::vector<KlmnRung> ladder;
  double a = 0.0;
  double b = 0.0;
  bool trivial_witness = false;
  bool admissible = false;
};

/// Ladder b = 2^0 .. 2^10; selects the admissible pair (a < 1) minimizing a + b / scale.
/// Throws a Solver error when no pair is admissible.
KlmnResult klmn_bound(const Multiplier& part, const ParticleGrid& grid, double scale = 1024.0, int rungs = 11);

enum class SandwichKind { Resolvent, AbsMomentum };

struct SandwichOptions {
  SandwichKind kind = SandwichKind::Resolvent;
  double lambda0 = 1.0;  // resolvent variant: (-Delta + lambda0)^{-s}
  int max_iter = 300;
  double tol = 1e-10;
  std::uint64_t seed = 1;
};

/// ||L^{-s_left} T L^{-s_right}|| on a periodic grid, L = -Delta + lambda0 or |P| (zero mode dropped).
/// The norm is the square root of the top eigenvalue of S* S found by Lanczos.
double fractional_sandwich_norm(const LinearOp& part, const ParticleGrid& grid, double s_left, double s_right,
                                const SandwichOptions& opt = {});
double fractional_sandwich_norm(const QuadraticForm& form, PartTag tag, double s_left, double s_right,
                                const SandwichOptions& opt = {});

struct PolarizationResult {
  double q_psi = 0.0;
  double sup = 0.0;
  double gap = 0.0;  // q_psi - sup
  std::size_t argmax = 0;
  std::vector<double> values;
};

using SesquilinearForm = std::function<cplx(const VectorXc&, const VectorXc&)>;

/// Re Q[phi, 2 psi - phi] over the probes with psi appended; throws if Q[psi] or any Q[phi] is negative.
PolarizationResult polarization_sup(const SesquilinearForm& q, const VectorXc& psi, const std::vector<VectorXc>& probes,
                                    double negative_tol = 1e-12);
/// Q_lambda[x, y] = form(x, y) + shift <x, y>.
PolarizationResult polarization_sup(const QuadraticForm& form, double shift, const VectorXc& psi,
                                    const std::vector<VectorXc>& probes);

}  // namespace qclim
