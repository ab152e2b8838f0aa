#include "otto/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>

#include <boost/math/tools/toms748_solve.hpp>

#include "otto/errors.hpp"
#include "otto/thermal_cycle.hpp"

namespace otto {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Bracketed root of a continuous function with f(a), f(b) of opposite sign.
// Returns the bracket endpoint with the smaller |f|, or nullopt if the
// function leaves its domain inside the bracket.
template <class F>
std::optional<double> refine_root(F&& f, double a, double b, double fa, double fb, int max_iter,
                                  int& iterations) {
  auto guarded = [&](double x) {
    const double y = f(x);
    if (!std::isfinite(y)) throw DomainError("non-finite function value inside bracket");
    return y;
  };
  std::uintmax_t iters = static_cast<std::uintmax_t>(max_iter);
  try {
    const auto [lo, hi] = boost::math::tools::toms748_solve(
        guarded, a, b, fa, fb, boost::math::tools::eps_tolerance<double>(52), iters);
    iterations += static_cast<int>(iters);
    if (lo == hi) return lo;
    return std::abs(guarded(lo)) <= std::abs(guarded(hi)) ? lo : hi;
  } catch (const DomainError&) {
    return std::nullopt;
  } catch (const std::domain_error&) {
    return std::nullopt;
  }
}

double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

void validate(const OptimizationProblem& p) {
  if (!(p.eta_c > 0.0 && p.eta_c < 1.0)) throw InvalidArgument("eta_c must lie in (0, 1)");
  if (!std::isfinite(p.g0)) throw InvalidArgument("g0 must be finite");
  if (!(p.beta_c > 0.0) || !std::isfinite(p.beta_c)) {
    throw InvalidArgument("beta_c must be positive and finite");
  }
  if (!(p.xi > 0.0 && p.xi <= 1.0)) throw InvalidArgument("xi must lie in (0, 1]");
  if (p.n_levels < 2) throw InvalidArgument("n_levels must be at least 2");
  if (!(p.eh_bracket.lo > 0.0) || !(p.eh_bracket.hi > p.eh_bracket.lo) ||
      !std::isfinite(p.eh_bracket.hi)) {
    throw InvalidArgument("eh_bracket must satisfy 0 < lo < hi < inf");
  }
}

ConstraintExpr bound_constraint(const OptimizationProblem& p) {
  if (p.constraint.references(kEtaC) && !p.constraint.params().contains(kEtaC)) {
    return p.constraint.with_param(kEtaC, p.eta_c);
  }
  return p.constraint;
}

double solve_eh(const OptimizationProblem& p, double chi) {
  if (!(chi >= 0.0 && chi < 1.0)) throw InvalidArgument("chi must lie in [0, 1)");
  const ConstraintExpr g = bound_constraint(p);
  const Tolerances& tol = p.tol;
  const double g0 = p.g0;
  auto f = [&](double r) {
    try {
      return g.eval((1.0 - chi) * r, r) - g0;
    } catch (const DomainError&) {
      return kNaN;
    }
  };
  const double accept = tol.root_rel * (1.0 + std::abs(g0));

  double lo = p.eh_bracket.lo;
  double hi = p.eh_bracket.hi;
  const double max_decades = std::max(std::log10(hi / lo), tol.bracket_max_decades);
  const int points = std::max(tol.bracket_scan_points, 2);
  int iterations = 0;

  while (true) {
    std::vector<double> roots;
    const double log_lo = std::log(lo);
    const double step = (std::log(hi) - log_lo) / (points - 1);
    double prev_r = lo;
    double prev_f = f(lo);
    if (prev_f == 0.0) roots.push_back(lo);
    for (int k = 1; k < points; ++k) {
      const double r = k == points - 1 ? hi : std::exp(log_lo + step * k);
      const double fr = f(r);
      if (fr == 0.0) {
        roots.push_back(r);
      } else if (std::isfinite(fr) && std::isfinite(prev_f) && prev_f != 0.0 &&
                 sign_of(fr) != sign_of(prev_f)) {
        const auto root = refine_root(f, prev_r, r, prev_f, fr, tol.max_iterations, iterations);
        if (root && std::abs(f(*root)) <= accept) roots.push_back(*root);
      }
      prev_r = r;
      prev_f = fr;
    }

    if (roots.size() == 1) return roots.front();
    if (roots.size() > 1) {
      throw AmbiguousConstraint("constraint '" + g.source() + "' has " +
                                std::to_string(roots.size()) + " roots for |E_h| at chi = " +
                                std::to_string(chi));
    }
    if (std::log10(hi / lo) >= max_decades) {
      throw NoSolution("no positive |E_h| satisfies '" + g.source() + "' = " +
                       std::to_string(g0) + " at chi = " + std::to_string(chi));
    }
    lo /= tol.bracket_growth;
    hi *= tol.bracket_growth;
  }
}

double log_derivative_eh(const OptimizationProblem& p, double chi, double eh) {
  const PartialDerivs d = bound_constraint(p).partials((1.0 - chi) * eh, eh);
  const double a = (1.0 - chi) * d.g10;
  const double denom = a + d.g01;
  const double scale = std::abs(a) + std::abs(d.g01);
  if (!(std::abs(denom) > 64.0 * std::numeric_limits<double>::epsilon() * scale)) {
    throw SingularConstraint("implicit derivative of |E_h| is singular at chi = " +
                             std::to_string(chi));
  }
  return d.g10 / denom;
}

double log_derivative_eh(const OptimizationProblem& p, double chi) {
  return log_derivative_eh(p, chi, solve_eh(p, chi));
}

double optimality_residual(const OptimizationProblem& p, double chi) {
  if (!(chi > 0.0 && chi < p.eta_c)) throw InvalidArgument("chi must lie in (0, eta_c)");
  return log_derivative_eh(p, chi) + (p.eta_c - 2.0 * chi) / (2.0 * chi * (p.eta_c - chi));
}

double constrained_work(const OptimizationProblem& p, double chi) {
  const double r = solve_eh(p, chi);
  return parallel_work(chi, r * r, p.beta_c, p.eta_c, p.xi, p.n_levels);
}

OptimizationResult maximize_work(const OptimizationProblem& p) {
  validate(p);
  const Tolerances& tol = p.tol;
  const double edge = tol.chi_edge * p.eta_c;
  const double lo = edge;
  const double hi = p.eta_c - edge;
  const int samples = std::max(tol.work_scan_samples, 3);

  OptimizationResult result;
  // NoSolution and DomainError mark a point as infeasible; ambiguity is fatal.
  auto work_at = [&](double chi) {
    try {
      return constrained_work(p, chi);
    } catch (const NoSolution&) {
      return kNaN;
    } catch (const DomainError&) {
      return kNaN;
    }
  };
  auto residual_at = [&](double chi) {
    try {
      return optimality_residual(p, chi);
    } catch (const NoSolution&) {
      return kNaN;
    } catch (const DomainError&) {
      return kNaN;
    } catch (const SingularConstraint&) {
      return kNaN;
    }
  };
  auto better = [](double a, double b) { return std::isfinite(a) && (!std::isfinite(b) || a > b); };

  std::vector<double> xs(samples);
  std::vector<double> ws(samples);
  bool any_feasible = false;
  for (int k = 0; k < samples; ++k) {
    xs[k] = lo + (hi - lo) * k / (samples - 1);
    ws[k] = work_at(xs[k]);
    any_feasible = any_feasible || std::isfinite(ws[k]);
  }
  if (!any_feasible) {
    throw NoSolution("constraint '" + p.constraint.source() +
                     "' has no positive |E_h| solution on (0, eta_c)");
  }

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  std::optional<LocalMaximum> best;
  for (int k = 0; k < samples; ++k) {
    if (!std::isfinite(ws[k])) continue;
    const bool left_ok = k == 0 || better(ws[k], ws[k - 1]);
    const bool right_ok = k == samples - 1 || !better(ws[k + 1], ws[k]);
    if (!left_ok || !right_ok) continue;

    const double a0 = xs[std::max(k - 1, 0)];
    const double b0 = xs[std::min(k + 1, samples - 1)];

    // Golden-section search for the maximum of W on [a0, b0].
    double a = a0;
    double b = b0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double wc = work_at(c);
    double wd = work_at(d);
    for (int it = 0; it < tol.max_iterations && (b - a) > 1e-13 * p.eta_c; ++it) {
      ++result.iterations;
      if (better(wc, wd) || (!std::isfinite(wd) && !std::isfinite(wc))) {
        b = d;
        d = c;
        wd = wc;
        c = b - inv_phi * (b - a);
        wc = work_at(c);
      } else {
        a = c;
        c = d;
        wc = wd;
        d = a + inv_phi * (b - a);
        wd = work_at(d);
      }
    }
    LocalMaximum candidate{0.5 * (a + b), work_at(0.5 * (a + b))};
    if (better(ws[k], candidate.work)) candidate = {xs[k], ws[k]};

    // The residual is positive left of an interior maximum and negative right
    // of it; its root pins chi far below the golden-section resolution.
    const double ra = residual_at(a0);
    const double rb = residual_at(b0);
    if (std::isfinite(ra) && std::isfinite(rb) && ra > 0.0 && rb < 0.0) {
      const auto root = refine_root(residual_at, a0, b0, ra, rb, tol.max_iterations,
                                    result.iterations);
      if (root) {
        const double w = work_at(*root);
        if (std::isfinite(w) && w >= candidate.work * (1.0 - 1e-12)) candidate = {*root, w};
      }
    }
    result.local_maxima.push_back(candidate);
    if (!best || candidate.work > best->work) best = candidate;
  }

  if (!best || !(best->work > 0.0)) {
    throw NotAnEngine("no positive work under constraint '" + p.constraint.source() + "'");
  }
  result.chi_star = best->chi;
  result.eta_star = best->chi;
  result.work_star = best->work;
  result.eh_star = solve_eh(p, best->chi);
  result.residual = residual_at(best->chi);
  result.converged = std::isfinite(result.residual) && std::abs(result.residual) <= tol.residual;
  result.near_boundary = result.chi_star > tol.boundary_fraction * p.eta_c;
  return result;
}

double closed_form_efficiency(std::string_view name, double eta_c, const ParamMap& params) {
  auto param = [&](std::string_view key) {
    const auto it = params.find(key);
    if (it == params.end()) {
      throw InvalidArgument("closed form '" + std::string(name) + "' needs parameter '" +
                            std::string(key) + "'");
    }
    return it->second;
  };
  if (name == "hot_norm") return eta_c / 2.0;
  if (name == "cold_norm") return eta_c / (2.0 - eta_c);
  if (name == "product") return 1.0 - std::sqrt(1.0 - eta_c);
  if (name == "alpha_linear") return eta_c / (2.0 - param("alpha") * eta_c);
  if (name == "s_linear") return eta_c / (2.0 - param("s"));
  throw InvalidArgument("no closed-form efficiency for '" + std::string(name) + "'");
}

}  // namespace otto
