#pragma once

#include <optional>
#include <string>
#include <vector>

#include "otto/constraint.hpp"
#include "otto/optimizer.hpp"

namespace otto {

// Small-eta_c expansion of the efficiency at maximal work,
//   eta = eta_c / 2 + a eta_c^2 + b eta_c^3 + O(eta_c^4),
// where d ln|E_h| / d chi = A + B chi near chi = 0, a = A / 4 and b = B / 8.
struct ExpansionCoeffs {
  double cap_a = 0.0;
  double cap_b = 0.0;  // NaN when not computed
  double a = 0.0;
  double b = 0.0;      // NaN when not computed
  bool symmetric = false;
  bool b_computed = false;
  bool valid = true;   // false for order-changing constraints
};

/// Coefficients from the partials of G at Ec = Eh = reference_eh (the chi = 0
/// solution). b is only available for symmetric constraints. Throws
/// SingularConstraint when G10 + G01 vanishes.
ExpansionCoeffs expansion_coeffs(const ConstraintExpr& c, double reference_eh);

/// Truncated series; the cubic term is dropped when b was not computed.
double eta_series(double eta_c, const ExpansionCoeffs& coeffs);

struct FittedExpansion {
  double a = 0.0;
  double b = 0.0;
  std::vector<double> eta_c;
  std::vector<double> eta_star;
};

/// Least-squares fit of (eta*(eta_c) - eta_c / 2) / eta_c^2 against
/// [1, eta_c, eta_c^2, eta_c^3] on eta_c = 0.01, 0.02, ..., 0.1. `a` is the
/// intercept and `b` the linear coefficient. The higher columns absorb the
/// truncation bias of the series. `base` supplies everything but eta_c.
FittedExpansion fit_expansion(const ConstraintExpr& c, double g0,
                              const OptimizationProblem& base = {preset("hot_norm")});

struct ClassicalComparison {
  double eta_c = 0.0;
  double sigma_c = 0.0;
  double sigma_h = 0.0;
  double eta_ld_low = 0.0;     // eta_c / 2
  double eta_ld_high = 0.0;    // eta_c / (2 - eta_c)
  double eta_ca = 0.0;         // 1 - sqrt(1 - eta_c)
  double ld_quadratic = 0.0;   // 1 / (4 (1 + sqrt(sigma_c / sigma_h)))

  /// eta_c / 2 + ld_quadratic * eta_c^2.
  double eta_ld_series() const { return 0.5 * eta_c + ld_quadratic * eta_c * eta_c; }
};

/// Low-dissipation window and Curzon-Ahlborn value at eta_c. Throws
/// InvalidArgument when both relaxation scales are zero.
ClassicalComparison classical_comparators(double eta_c, double sigma_c = 1.0,
                                          double sigma_h = 1.0);

/// 1 - sqrt(T_c / T_h).
double curzon_ahlborn(double temperature_ratio);

struct OrderChangingReport {
  bool order_changing = false;
  // The constraint stops admitting |E_h| on (0, eta_c]: the series in eta_c
  // has run out of radius.
  bool boundary_case = false;
  std::optional<double> eta_s;            // s_linear analytic optimum
  std::optional<bool> exceeds_ld_upper;   // eta_s > eta_c / (2 - eta_c)
  std::string report;
};

/// Syntactic check for eta_c in the tree. With eta_c supplied the report also
/// covers the s_linear optimum and probes whether |E_h| stays solvable up to
/// chi = eta_c.
OrderChangingReport order_changing_check(const ConstraintExpr& c,
                                         std::optional<double> eta_c = std::nullopt,
                                         double g0 = 1.0);

enum class BoundClass { Symmetric, SameSign, OppositeSign };

std::string to_string(BoundClass c);

struct BoundsCheck {
  BoundClass classification = BoundClass::SameSign;
  double a = 0.0;
};

/// symmetric (a = 1/8), same_sign (0 <= a <= 1/4) or opposite_sign.
BoundsCheck a_bounds_check(const ConstraintExpr& c, double reference_eh = 1.0);

}  // namespace otto
