#include "otto/universality.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "otto/errors.hpp"

namespace otto {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool symmetric_or_false(const ConstraintExpr& c) {
  try {
    return is_symmetric(c);
  } catch (const Indeterminate&) {
    return false;
  }
}

}  // namespace

ExpansionCoeffs expansion_coeffs(const ConstraintExpr& c, double reference_eh) {
  ExpansionCoeffs out;
  out.cap_b = kNaN;
  out.b = kNaN;
  if (c.references(kEtaC)) {
    out.valid = false;
    out.cap_a = kNaN;
    out.a = kNaN;
    return out;
  }
  if (!(reference_eh > 0.0)) throw InvalidArgument("reference |E_h| must be positive");

  const double r = reference_eh;
  const PartialDerivs d = c.partials(r, r);
  const double denom = d.g10 + d.g01;
  if (!(std::abs(denom) > 64.0 * std::numeric_limits<double>::epsilon() *
                              (std::abs(d.g10) + std::abs(d.g01)))) {
    throw SingularConstraint("G10 + G01 vanishes at the chi = 0 point");
  }
  out.cap_a = d.g10 / denom;
  out.a = out.cap_a / 4.0;
  out.symmetric = symmetric_or_false(c);
  if (out.symmetric) {
    if (d.g10 == 0.0) throw SingularConstraint("G10 vanishes at the chi = 0 point");
    out.cap_b = 0.25 * (1.0 + r * (d.g11 - d.g20) / d.g10);
    out.b = out.cap_b / 8.0;
    out.b_computed = true;
  }
  return out;
}

double eta_series(double eta_c, const ExpansionCoeffs& coeffs) {
  if (!coeffs.valid) {
    throw InvalidArgument("expansion coefficients are invalid for an order-changing constraint");
  }
  double eta = 0.5 * eta_c + coeffs.a * eta_c * eta_c;
  if (coeffs.b_computed) eta += coeffs.b * eta_c * eta_c * eta_c;
  return eta;
}

FittedExpansion fit_expansion(const ConstraintExpr& c, double g0, const OptimizationProblem& base) {
  constexpr int kPoints = 10;
  constexpr int kColumns = 4;
  FittedExpansion out;
  Eigen::MatrixXd design(kPoints, kColumns);
  Eigen::VectorXd target(kPoints);

  OptimizationProblem problem = base;
  problem.constraint = c;
  problem.g0 = g0;
  for (int i = 0; i < kPoints; ++i) {
    const double ec = 0.01 * (i + 1);
    problem.eta_c = ec;
    const OptimizationResult res = maximize_work(problem);
    if (!res.converged) {
      throw NoSolution("fit_expansion: optimizer did not converge at eta_c = " +
                       std::to_string(ec));
    }
    out.eta_c.push_back(ec);
    out.eta_star.push_back(res.eta_star);
    target(i) = (res.eta_star - 0.5 * ec) / (ec * ec);
    double power = 1.0;
    for (int j = 0; j < kColumns; ++j) {
      design(i, j) = power;
      power *= ec;
    }
  }
  const Eigen::VectorXd coef = design.colPivHouseholderQr().solve(target);
  out.a = coef(0);
  out.b = coef(1);
  return out;
}

ClassicalComparison classical_comparators(double eta_c, double sigma_c, double sigma_h) {
  if (!(eta_c >= 0.0 && eta_c < 1.0)) throw InvalidArgument("eta_c must lie in [0, 1)");
  if (!(sigma_c >= 0.0) || !(sigma_h >= 0.0)) {
    throw InvalidArgument("relaxation scales must be non-negative");
  }
  if (sigma_c == 0.0 && sigma_h == 0.0) {
    throw InvalidArgument("relaxation scales sigma_c and sigma_h cannot both be zero");
  }
  ClassicalComparison out;
  out.eta_c = eta_c;
  out.sigma_c = sigma_c;
  out.sigma_h = sigma_h;
  out.eta_ld_low = eta_c / 2.0;
  out.eta_ld_high = eta_c / (2.0 - eta_c);
  out.eta_ca = curzon_ahlborn(1.0 - eta_c);
  // 1 / (4 (1 + sqrt(sc / sh))) written so that sigma_h = 0 gives 0.
  const double sh = std::sqrt(sigma_h);
  out.ld_quadratic = sh / (4.0 * (sh + std::sqrt(sigma_c)));
  return out;
}

double curzon_ahlborn(double temperature_ratio) {
  if (!(temperature_ratio >= 0.0 && temperature_ratio <= 1.0)) {
    throw InvalidArgument("temperature ratio T_c / T_h must lie in [0, 1]");
  }
  return 1.0 - std::sqrt(temperature_ratio);
}

OrderChangingReport order_changing_check(const ConstraintExpr& c, std::optional<double> eta_c,
                                         double g0) {
  OrderChangingReport out;
  out.order_changing = c.references(kEtaC);
  std::ostringstream report;
  if (out.order_changing) {
    report << "constraint depends on eta_c: every order of the eta_c series collapses into the "
              "linear term, so only the numeric optimum is meaningful";
  } else {
    report << "constraint is independent of eta_c";
  }

  if (eta_c) {
    const double ec = *eta_c;
    const auto s = c.params().find("s");
    if (out.order_changing && s != c.params().end() &&
        structurally_equal(c.ast(), preset("s_linear", {{"s", s->second}}).ast())) {
      out.eta_s = ec / (2.0 - s->second);
      out.exceeds_ld_upper = *out.eta_s > ec / (2.0 - ec);
      report << "; s_linear optimum eta_c/(2-s) = " << *out.eta_s
             << (*out.exceeds_ld_upper ? " exceeds" : " stays within")
             << " the low-dissipation upper bound " << ec / (2.0 - ec);
    }

    // Probe |E_h| up to and including chi = eta_c.
    OptimizationProblem probe{c};
    probe.g0 = g0;
    probe.eta_c = ec;
    constexpr int kProbes = 32;
    for (int k = 1; k <= kProbes && !out.boundary_case; ++k) {
      const double chi = ec * k / kProbes;
      try {
        solve_eh(probe, chi);
      } catch (const NoSolution&) {
        out.boundary_case = true;
        report << "; no positive |E_h| at chi = " << chi
               << ": the Taylor series in eta_c no longer converges";
      } catch (const AmbiguousConstraint&) {
        out.boundary_case = true;
        report << "; |E_h| is not unique at chi = " << chi;
      }
    }
  }
  out.report = report.str();
  return out;
}

std::string to_string(BoundClass c) {
  switch (c) {
    case BoundClass::Symmetric: return "symmetric";
    case BoundClass::SameSign: return "same_sign";
    case BoundClass::OppositeSign: return "opposite_sign";
  }
  return "unknown";
}

BoundsCheck a_bounds_check(const ConstraintExpr& c, double reference_eh) {
  if (c.references(kEtaC)) {
    throw InvalidArgument("a_bounds_check: order-changing constraint has no fixed a");
  }
  const ExpansionCoeffs coeffs = expansion_coeffs(c, reference_eh);
  const PartialDerivs d = c.partials(reference_eh, reference_eh);
  BoundsCheck out;
  out.a = coeffs.a;
  if (coeffs.symmetric) {
    out.classification = BoundClass::Symmetric;
  } else if (d.g10 * d.g01 >= 0.0) {
    out.classification = BoundClass::SameSign;
  } else {
    out.classification = BoundClass::OppositeSign;
  }
  return out;
}

}  // namespace otto
