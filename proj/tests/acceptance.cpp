// Acceptance suite: one PASS/FAIL line per criterion; nonzero exit if any fail.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "otto/constraint.hpp"
#include "otto/optimizer.hpp"
#include "otto/spectra.hpp"
#include "otto/thermal_cycle.hpp"
#include "otto/universality.hpp"
#include "support.hpp"

using namespace otto;
using otto::testing::loglog_slope;
using otto::testing::uniform;

namespace {

struct Check {
  bool ok = true;
  double worst = 0.0;
  std::string note;

  // Record |error| against its allowance.
  void within(double error, double allowed, const std::string& what) {
    error = std::abs(error);
    if (!(error <= allowed)) {
      if (ok) note = what;
      ok = false;
    }
    if (std::isnan(error)) {
      worst = error;
    } else if (!std::isnan(worst)) {
      worst = std::max(worst, error / allowed);
    }
  }

  void require(bool condition, const std::string& what) {
    if (!condition) {
      if (ok) note = what;
      ok = false;
    }
  }
};

int failures = 0;

void report(int id, const char* title, const std::function<void(Check&)>& body) {
  Check c;
  try {
    body(c);
  } catch (const std::exception& e) {
    c.ok = false;
    c.note = std::string("threw: ") + e.what();
  }
  if (!c.ok) ++failures;
  std::printf("%s [%d] %s (worst error / tolerance = %.3g)%s%s\n", c.ok ? "PASS" : "FAIL", id,
              title, c.worst, c.ok ? "" : ": ", c.ok ? "" : c.note.c_str());
}

double optimum(const ConstraintExpr& c, double eta_c, double g0 = 1.0) {
  OptimizationProblem p{c};
  p.g0 = g0;
  p.eta_c = eta_c;
  return maximize_work(p).eta_star;
}

std::vector<double> eta_grid() {
  std::vector<double> out;
  for (int k = 1; k <= 19; ++k) out.push_back(0.05 * k);
  return out;
}

std::string at(const std::string& what, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, " at %.6g", v);
  return what + buf;
}

void closed_forms(Check& c) {
  for (double eta_c : eta_grid()) {
    for (const char* name : {"hot_norm", "cold_norm", "product"}) {
      c.within(optimum(preset(name), eta_c) - closed_form_efficiency(name, eta_c), 1e-8,
               at(name, eta_c));
    }
    for (double alpha : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      const ParamMap params{{"alpha", alpha}};
      c.within(optimum(preset("alpha_linear", params), eta_c) -
                   closed_form_efficiency("alpha_linear", eta_c, params),
               1e-8, at("alpha_linear", eta_c));
    }
  }
}

void coefficients(Check& c) {
  const auto a_of = [](const ConstraintExpr& g) { return expansion_coeffs(g, 1.0); };
  c.within(a_of(preset("hot_norm")).a - 0.0, 1e-12, "hot_norm a");
  c.within(a_of(preset("cold_norm")).a - 0.25, 1e-12, "cold_norm a");
  c.within(a_of(preset("product")).a - 0.125, 1e-12, "product a");
  c.within(a_of(preset("inverse_sum")).a - 0.125, 1e-12, "inverse_sum a");
  c.within(a_of(ConstraintExpr::parse("Ec + Eh")).a - 0.125, 1e-12, "sum a");
  for (double d : {0.25, 0.5, 0.75, 2.0}) {
    c.within(a_of(preset("d_linear", {{"d", d}})).a - 1 / (4 * d), 1e-12, at("d_linear a", d));
  }
  c.within(a_of(preset("product")).b - 1.0 / 16, 1e-12, "product b");
  c.within(a_of(ConstraintExpr::parse("Ec + Eh")).b - 1.0 / 32, 1e-12, "sum b");

  std::vector<ConstraintExpr> fitted = {preset("hot_norm"), preset("cold_norm"),
                                        preset("product"), preset("inverse_sum"),
                                        ConstraintExpr::parse("Ec + Eh")};
  for (double alpha : {0.0, 0.5, 1.0}) fitted.push_back(preset("alpha_linear", {{"alpha", alpha}}));
  for (double d : {0.25, 0.5, 0.75}) fitted.push_back(preset("d_linear", {{"d", d}}));
  for (const ConstraintExpr& g : fitted) {
    const ExpansionCoeffs analytic = expansion_coeffs(g, 1.0);
    const FittedExpansion fit = fit_expansion(g, 1.0);
    c.within(fit.a - analytic.a, 1e-3, "fitted a for " + g.source());
    if (analytic.b_computed) c.within(fit.b - analytic.b, 1e-2, "fitted b for " + g.source());
  }
}

void order_changing(Check& c) {
  for (double s : {0.5, 0.9, 0.99}) {
    const ConstraintExpr g = preset("s_linear", {{"s", s}});
    c.require(order_changing_check(g).order_changing, at("not flagged as order-changing, s", s));
    for (double eta_c : eta_grid()) {
      const double eta = optimum(g, eta_c);
      c.within(eta - eta_c / (2 - s), 1e-8, at("s_linear eta_c", eta_c));
      if (s > eta_c) {
        c.require(eta > eta_c / (2 - eta_c), at("does not exceed the LD upper bound, eta_c", eta_c));
      }
    }
  }
}

void swap_prefactor(Check& c) {
  const Spectrum hot = make_spectrum({-1.3, 0.2, 0.4, 2.1});
  const Spectrum cold = make_spectrum({-0.7, 0.3, -0.1, 0.9});
  for (const auto& [beta_h, beta_c] : std::vector<std::pair<double, double>>{
           {0.005, 0.01}, {0.2, 0.5}, {1.0, 3.0}, {2.0, 10.0}}) {
    const double full = exact_cycle(EngineSpec(hot, cold, beta_h, beta_c, 1.0)).work;
    for (double xi : {0.1, 0.5, 0.9}) {
      const double partial = exact_cycle(EngineSpec(hot, cold, beta_h, beta_c, xi)).work;
      const double expected = xi / (2 - xi) * full;
      c.within((partial - expected) / expected, 1e-12, at("xi", xi));
    }
  }
}

void ultra_hot_convergence(Check& c) {
  struct Case {
    const char* name;
    Spectrum hot;
    double corrected_slope;
    double uncorrected_slope;
    double uncorrected_tol;
  };
  const std::vector<Case> cases = {
      {"asymmetric 3-level", make_spectrum({-1.0, -1.0, 2.0}), 3.0, 2.0, 0.15},
      {"two-level", make_spectrum({-1.0, 1.0}), 3.0, 3.0, 0.2},
      {"symmetric 3-level", make_spectrum({-1.0, 0.0, 1.0}), 3.0, 3.0, 0.2},
  };
  for (const Case& k : cases) {
    std::vector<double> betas;
    std::vector<double> raw;
    std::vector<double> corrected;
    double beta_c = 0.04;
    for (int i = 0; i <= 4; ++i, beta_c /= 2) {
      const EngineSpec e = EngineSpec::uniform(k.hot, 0.2, beta_c / 2, beta_c);
      const double exact = exact_cycle(e).work;
      const double ultra = ultra_hot_work(e);
      betas.push_back(beta_c);
      raw.push_back(exact - ultra);
      corrected.push_back(exact - ultra - beta2_correction(e));
    }
    c.within(loglog_slope(betas, raw) - k.uncorrected_slope, k.uncorrected_tol,
             std::string("uncorrected slope, ") + k.name);
    c.within(loglog_slope(betas, corrected) - k.corrected_slope, 0.2,
             std::string("corrected slope, ") + k.name);
  }
}

void efficiency_universality(Check& c) {
  const double chi = 0.3;
  int engines = 0;
  for (std::size_t n : {2u, 3u, 5u}) {
    const Spectrum hot = make_spectrum(otto::testing::random_levels(n));
    for (double xi : {0.3, 1.0}) {
      for (double beta_c : {0.02, 0.2, 2.0}) {
        for (double ratio : {0.1, 0.4, 0.65}) {
          const EngineSpec e = EngineSpec::uniform(hot, chi, ratio * beta_c, beta_c, xi);
          if (!(exact_cycle(e).work > 0.0)) continue;
          ++engines;
          c.within(exact_efficiency(e) - chi, 1e-12, at("N", static_cast<double>(n)));
        }
      }
    }
  }
  c.require(engines > 0, "no engine in the grid");
}

void parallel_optimality(Check& c) {
  const Spectrum hot = make_spectrum({-1.2, 0.3, 0.9});
  const double norm_c = 0.8 * hot.norm();
  const double beta_c = 0.1;
  const double beta_h = 0.04;
  const double best =
      ultra_hot_work(EngineSpec(hot, scaled(hot, norm_c / hot.norm()), beta_h, beta_c));
  for (int trial = 0; trial < 10000; ++trial) {
    const Spectrum raw = make_spectrum(otto::testing::random_levels(3));
    if (raw.norm() == 0.0) continue;
    const Spectrum cold = scaled(raw, norm_c / raw.norm());
    const double w = ultra_hot_work(EngineSpec(hot, cold, beta_h, beta_c));
    const double excess = std::max(0.0, w - best);
    c.within(excess, 1e-12, "random cold spectrum beats the parallel one");
  }
}

// Central differences with one Richardson step.
PartialDerivs finite_differences(const ConstraintExpr& g, double x, double y) {
  const auto f = [&g](double a, double b) { return g.eval(a, b); };
  const auto d1 = [&](double hx, double hy) {
    return (f(x + hx, y + hy) - f(x - hx, y - hy)) / 2;
  };
  const auto d2 = [&](double hx, double hy) {
    return f(x + hx, y + hy) - 2 * f(x, y) + f(x - hx, y - hy);
  };
  const auto mixed = [&](double h) {
    return (f(x + h, y + h) - f(x + h, y - h) - f(x - h, y + h) + f(x - h, y - h)) / 4;
  };
  const auto rich = [](double coarse, double fine) { return (4 * fine - coarse) / 3; };
  const double h1 = 1e-4;
  const double h2 = 1e-3;
  PartialDerivs d;
  d.g00 = f(x, y);
  d.g10 = rich(d1(2 * h1, 0) / (2 * h1), d1(h1, 0) / h1);
  d.g01 = rich(d1(0, 2 * h1) / (2 * h1), d1(0, h1) / h1);
  d.g20 = rich(d2(2 * h2, 0) / (4 * h2 * h2), d2(h2, 0) / (h2 * h2));
  d.g02 = rich(d2(0, 2 * h2) / (4 * h2 * h2), d2(0, h2) / (h2 * h2));
  d.g11 = rich(mixed(2 * h2) / (4 * h2 * h2), mixed(h2) / (h2 * h2));
  return d;
}

void derivative_engine(Check& c) {
  for (const std::string& name : preset_names()) {
    for (int i = 0; i < 20; ++i) {
      ParamMap params;
      if (name == "alpha_linear") params["alpha"] = uniform(0.0, 1.0);
      if (name == "d_linear") params["d"] = uniform(0.1, 2.0);
      if (name == "s_linear") params["s"] = uniform(0.0, 0.99);
      ConstraintExpr g = preset(name, params);
      if (g.references(kEtaC)) g = g.with_param(kEtaC, uniform(0.05, 0.95));
      const double x = uniform(0.5, 5.0);
      const double y = uniform(0.5, 5.0);
      const PartialDerivs ad = g.partials(x, y);
      const PartialDerivs fd = finite_differences(g, x, y);
      const double floor = 1e-9 * (1 + std::abs(ad.g00));
      const auto cmp = [&](double a, double b, const char* which) {
        c.within((a - b) / (std::max(std::abs(a), std::abs(b)) + floor / 1e-6), 1e-6,
                 name + " " + which);
      };
      cmp(ad.g10, fd.g10, "g10");
      cmp(ad.g01, fd.g01, "g01");
      cmp(ad.g20, fd.g20, "g20");
      cmp(ad.g11, fd.g11, "g11");
      cmp(ad.g02, fd.g02, "g02");
    }
  }
}

void classical(Check& c) {
  const ClassicalComparison cl = classical_comparators(0.5);
  c.within(cl.eta_ld_low - 0.25, 1e-15, "eta_LD lower bound");
  c.within(cl.eta_ld_high - 1.0 / 3.0, 1e-15, "eta_LD upper bound");
  c.within(curzon_ahlborn(0.25) - 0.5, 1e-15, "Curzon-Ahlborn");
}

}  // namespace

int main() {
  report(1, "closed-form efficiencies at maximal work", closed_forms);
  report(2, "expansion coefficients, analytic and fitted", coefficients);
  report(3, "order-changing s constraint", order_changing);
  report(4, "swap prefactor xi/(2-xi)", swap_prefactor);
  report(5, "ultra-hot convergence rates", ultra_hot_convergence);
  report(6, "exact efficiency equals chi", efficiency_universality);
  report(7, "parallel spectra maximize ultra-hot work", parallel_optimality);
  report(8, "forward-mode partials match finite differences", derivative_engine);
  report(9, "classical comparators", classical);
  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
