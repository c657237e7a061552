#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qclim/forms.hpp"

namespace qclim {

struct SolverOptions {
  std::size_t dense_limit = 2048;  // dense Hermitian solve at or below this dimension
  double eig_tol = 1e-8;           // ||H v - theta v|| with ||v|| = 1 in the grid norm
  double cg_tol = 1e-12;           // relative residual for PCG
  int max_iter = 20000;
  int krylov = 80;                 // basis size for the restarted Lanczos path
  std::uint64_t seed = 1;
};

struct EigenResult {
  std::vector<double> values;
  std::vector<VectorXc> vectors;  // normalized in the grid inner product
  std::vector<double> residuals;
  std::string method;
  int iterations = 0;
};

EigenResult lowest_eigenpairs(const QuadraticForm& form, int count, const SolverOptions& opt = {});

struct ResolventResult {
  VectorXc u;
  int iterations = 0;
  double residual = 0.0;  // ||(H + lambda) u - rhs|| / ||rhs||
};

/// Solves (H + lambda) u = rhs by preconditioned CG. lower_bound is a lower bound m of H; if absent
/// it is estimated from the smallest Ritz value. Requires lambda + m > margin.
ResolventResult resolvent_apply(const QuadraticForm& form, double lambda, const VectorXc& rhs,
                                std::optional<double> lower_bound = std::nullopt, const SolverOptions& opt = {},
                                double margin = 1e-8);

/// lambda = max(-m, lambda0) + 1.
double admissible_lambda(double lower_bound, double lambda0 = 0.0);

using LinearOp = std::function<VectorXc(const VectorXc&)>;

struct ExtremeEigen {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Largest eigenvalue of a Hermitian operator by Lanczos with full reorthogonalization (Euclidean
/// inner product). Stops when the top Ritz value changes by less than tol relative.
ExtremeEigen largest_eigenvalue(const LinearOp& op, std::size_t n, int max_iter, double tol, std::uint64_t seed = 1);

}  // namespace qclim
