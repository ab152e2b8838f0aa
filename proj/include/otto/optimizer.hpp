#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "otto/constraint.hpp"
#include "otto/tolerances.hpp"

namespace otto {

struct EhBracket {
  double lo = 1e-3;
  double hi = 1e3;
};

/// Maximize the ultra-hot work of a uniformly compressed engine over the
/// compression deviation chi, with the level norms tied by
/// G((1 - chi) |E_h|, |E_h|) = g0.
struct OptimizationProblem {
  ConstraintExpr constraint;
  double g0 = 1.0;
  double eta_c = 0.5;
  double beta_c = 1.0;
  double xi = 1.0;
  std::size_t n_levels = 2;
  EhBracket eh_bracket{};
  Tolerances tol{};
};

struct LocalMaximum {
  double chi = 0.0;
  double work = 0.0;
};

struct OptimizationResult {
  double chi_star = 0.0;
  double eta_star = 0.0;  // equals chi_star for uniform compression
  double eh_star = 0.0;   // |E_h| at chi_star
  double work_star = 0.0;
  double residual = 0.0;  // optimality residual at chi_star
  int iterations = 0;
  bool converged = false;
  bool near_boundary = false;  // chi_star > boundary_fraction * eta_c
  std::vector<LocalMaximum> local_maxima;
};

/// Throws InvalidArgument if the problem is malformed.
void validate(const OptimizationProblem& p);

/// The constraint with eta_c bound from the problem when it is referenced.
ConstraintExpr bound_constraint(const OptimizationProblem& p);

/// |E_h| solving G((1 - chi) r, r) = g0. Throws NoSolution when no root is
/// found after bracket expansion and AmbiguousConstraint when the scan grid
/// shows more than one.
double solve_eh(const OptimizationProblem& p, double chi);

/// d ln|E_h| / d chi by implicit differentiation of the constraint.
double log_derivative_eh(const OptimizationProblem& p, double chi);
double log_derivative_eh(const OptimizationProblem& p, double chi, double eh);

/// Half the logarithmic derivative of the work,
///   r'/r + (eta_c - 2 chi) / (2 chi (eta_c - chi)),
/// which vanishes at every stationary point of W(chi).
double optimality_residual(const OptimizationProblem& p, double chi);

/// W(chi) with |E_h| taken from the constraint.
double constrained_work(const OptimizationProblem& p, double chi);

OptimizationResult maximize_work(const OptimizationProblem& p);

/// Analytic optimum for hot_norm, cold_norm, product, alpha_linear (alpha)
/// and s_linear (s).
double closed_form_efficiency(std::string_view name, double eta_c, const ParamMap& params = {});

}  // namespace otto
