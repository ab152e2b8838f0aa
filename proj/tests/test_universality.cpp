#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include "otto/errors.hpp"
#include "otto/optimizer.hpp"
#include "otto/universality.hpp"
#include "support.hpp"

using namespace otto;
using otto::testing::loglog_slope;
using otto::testing::uniform;

namespace {

ExpansionCoeffs coeffs(std::string_view text) {
  return expansion_coeffs(ConstraintExpr::parse(text), 1.0);
}

double optimum(const ConstraintExpr& c, double eta_c, double g0 = 1.0) {
  OptimizationProblem p{c};
  p.g0 = g0;
  p.eta_c = eta_c;
  return maximize_work(p).eta_star;
}

}  // namespace

TEST_CASE("expansion coefficients of the presets") {
  const auto hot = expansion_coeffs(preset("hot_norm"), 1.0);
  CHECK(hot.a == 0.0);
  CHECK_FALSE(hot.symmetric);
  CHECK_FALSE(hot.b_computed);
  CHECK(std::isnan(hot.b));

  CHECK(expansion_coeffs(preset("cold_norm"), 1.0).a == doctest::Approx(0.25).epsilon(1e-15));

  const auto product = expansion_coeffs(preset("product"), 1.0);
  CHECK(product.symmetric);
  CHECK(product.a == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(product.b == doctest::Approx(0.0625).epsilon(1e-15));
  CHECK(product.cap_a == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(product.cap_b == doctest::Approx(0.5).epsilon(1e-15));

  const auto sum = coeffs("Ec + Eh");
  CHECK(sum.a == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(sum.b == doctest::Approx(1.0 / 32).epsilon(1e-15));

  const auto inv = expansion_coeffs(preset("inverse_sum"), 2.0);
  CHECK(inv.a == doctest::Approx(0.125).epsilon(1e-15));
  CHECK(inv.b == doctest::Approx(3.0 / 32).epsilon(1e-15));

  CHECK(expansion_coeffs(preset("d_linear", {{"d", 0.5}}), 1.0).a ==
        doctest::Approx(0.5).epsilon(1e-15));
  CHECK(expansion_coeffs(preset("d_linear", {{"d", 0.25}}), 1.0).a ==
        doctest::Approx(1.0).epsilon(1e-15));

  const auto s = expansion_coeffs(preset("s_linear", {{"s", 0.9}}), 1.0);
  CHECK_FALSE(s.valid);
  CHECK(std::isnan(s.a));
  CHECK_THROWS_AS(eta_series(0.1, s), InvalidArgument);

  CHECK_THROWS_AS(coeffs("Ec - Eh"), SingularConstraint);
  CHECK_THROWS_AS(expansion_coeffs(preset("product"), 0.0), InvalidArgument);
}

TEST_CASE("a agrees with the ratio form of the partials") {
  for (const char* text : {"Ec*Eh", "Ec^2 + 3*Eh", "1/Ec + 2/Eh", "Ec - 0.3*Eh", "sqrt(Ec) + Eh^3"}) {
    const auto c = ConstraintExpr::parse(text);
    for (double r : {0.5, 1.0, 3.0}) {
      const auto d = c.partials(r, r);
      const double eta_c = 0.2;
      const double lhs = eta_c * eta_c / (4 * (1 + d.g01 / d.g10));
      CHECK(lhs == doctest::Approx(expansion_coeffs(c, r).a * eta_c * eta_c).epsilon(1e-14));
    }
  }
}

TEST_CASE("eta_series") {
  ExpansionCoeffs c;
  c.a = 0.125;
  c.b = 0.0625;
  c.b_computed = true;
  CHECK(eta_series(0.1, c) == doctest::Approx(0.0513125).epsilon(1e-15));
  c.b_computed = false;
  CHECK(eta_series(0.1, c) == doctest::Approx(0.05125).epsilon(1e-15));
}

TEST_CASE("fitted coefficients agree with the analytic ones") {
  const auto product = fit_expansion(preset("product"), 1.0);
  CHECK(std::abs(product.a - 0.125) <= 1e-4);
  CHECK(std::abs(product.b - 0.0625) <= 5e-3);
  CHECK(product.eta_c.size() == 10);
  CHECK(product.eta_star.size() == 10);

  CHECK(std::abs(fit_expansion(preset("hot_norm"), 1.0).a) <= 1e-5);
  CHECK(std::abs(fit_expansion(preset("d_linear", {{"d", 0.25}}), 1.0).a - 1.0) <= 1e-3);

  for (const char* name : {"cold_norm", "inverse_sum", "product"}) {
    const auto c = preset(name);
    const auto analytic = expansion_coeffs(c, 1.0);
    const auto fit = fit_expansion(c, 1.0);
    INFO(name);
    CHECK(std::abs(fit.a - analytic.a) <= 1e-3);
    if (analytic.b_computed) CHECK(std::abs(fit.b - analytic.b) <= 1e-2);
  }
}

TEST_CASE("classical comparators") {
  const auto c = classical_comparators(0.5);
  CHECK(c.eta_ld_low == 0.25);
  CHECK(c.eta_ld_high == doctest::Approx(1.0 / 3).epsilon(1e-16));
  CHECK(c.eta_ca == doctest::Approx(1 - std::sqrt(0.5)).epsilon(1e-16));
  CHECK(c.ld_quadratic == 0.125);
  CHECK(c.eta_ld_series() == doctest::Approx(0.28125));

  CHECK(curzon_ahlborn(0.25) == 0.5);
  CHECK(classical_comparators(0.3, 0.0, 1.0).ld_quadratic == 0.25);
  CHECK(classical_comparators(0.3, 1.0, 0.0).ld_quadratic == 0.0);
  CHECK(classical_comparators(0.3, 4.0, 1.0).ld_quadratic == doctest::Approx(1.0 / 12));

  CHECK_THROWS_AS(classical_comparators(0.3, 0.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(classical_comparators(1.0), InvalidArgument);
  CHECK_THROWS_AS(classical_comparators(0.3, -1.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(curzon_ahlborn(1.5), InvalidArgument);
}

TEST_CASE("order-changing detection") {
  const auto s = order_changing_check(preset("s_linear", {{"s", 0.9}}), 0.5);
  CHECK(s.order_changing);
  REQUIRE(s.eta_s);
  CHECK(*s.eta_s == doctest::Approx(0.5 / 1.1).epsilon(1e-15));
  REQUIRE(s.exceeds_ld_upper);
  CHECK(*s.exceeds_ld_upper);
  CHECK_FALSE(s.report.empty());

  const auto low = order_changing_check(preset("s_linear", {{"s", 0.2}}), 0.5);
  REQUIRE(low.exceeds_ld_upper);
  CHECK_FALSE(*low.exceeds_ld_upper);

  const auto product = order_changing_check(preset("product"), 0.5);
  CHECK_FALSE(product.order_changing);
  CHECK_FALSE(product.boundary_case);
  CHECK_FALSE(product.eta_s);

  CHECK(order_changing_check(ConstraintExpr::parse("Ec + eta_c*Eh")).order_changing);

  // d = eta_c: G = |E_h| (eta_c - chi) has no solution at chi = eta_c.
  const double eta_c = 0.3;
  const auto boundary = order_changing_check(
      ConstraintExpr::parse("Ec - (1-d)*Eh", {{"d", eta_c}}), eta_c);
  CHECK_FALSE(boundary.order_changing);
  CHECK(boundary.boundary_case);

  const auto inside = order_changing_check(
      ConstraintExpr::parse("Ec - (1-d)*Eh", {{"d", 0.6}}), eta_c);
  CHECK_FALSE(inside.boundary_case);
}

TEST_CASE("a bounds classification") {
  const auto product = a_bounds_check(preset("product"));
  CHECK(product.classification == BoundClass::Symmetric);
  CHECK(product.a == doctest::Approx(0.125));

  const auto cold = a_bounds_check(preset("cold_norm"));
  CHECK(cold.classification == BoundClass::SameSign);
  CHECK(cold.a == doctest::Approx(0.25));

  const auto opposite = a_bounds_check(ConstraintExpr::parse("Ec - 0.5*Eh"));
  CHECK(opposite.classification == BoundClass::OppositeSign);
  CHECK(opposite.a == doctest::Approx(0.5));

  CHECK(to_string(BoundClass::SameSign) == "same_sign");
  CHECK(to_string(BoundClass::OppositeSign) == "opposite_sign");
  CHECK(to_string(BoundClass::Symmetric) == "symmetric");
  CHECK_THROWS_AS(a_bounds_check(preset("s_linear", {{"s", 0.5}})), InvalidArgument);
}

TEST_CASE("property: same-sign partials bound a to [0, 1/4]") {
  for (const auto& name : preset_names()) {
    if (name == "s_linear" || name == "d_linear" || name == "alpha_linear") continue;
    const auto b = a_bounds_check(preset(name));
    CHECK(b.a >= 0.0);
    CHECK(b.a <= 0.25);
  }
  for (double alpha : {0.0, 0.3, 1.0}) {
    const auto b = a_bounds_check(preset("alpha_linear", {{"alpha", alpha}}));
    CHECK(b.classification != BoundClass::OppositeSign);
    CHECK(b.a >= 0.0);
    CHECK(b.a <= 0.25);
  }
  for (int k = 0; k < 50; ++k) {
    // c1 Ec^p + c2 Eh^q + c3 Ec^m Eh^n with a common sign for every term.
    const double sign = k % 2 == 0 ? 1.0 : -1.0;
    const ParamMap params{{"c1", sign * uniform(0.0, 3.0)}, {"c2", sign * uniform(0.0, 3.0)},
                          {"c3", sign * uniform(0.1, 3.0)}, {"p", uniform(0.5, 4.0)},
                          {"q", uniform(0.5, 4.0)},         {"m", uniform(0.0, 3.0)},
                          {"n", uniform(0.0, 3.0)}};
    const auto c = ConstraintExpr::parse("c1*Ec^p + c2*Eh^q + c3*Ec^m*Eh^n", params);
    const auto d = c.partials(1.0, 1.0);
    REQUIRE(d.g10 * d.g01 >= 0.0);
    const auto b = a_bounds_check(c);
    CHECK(b.classification != BoundClass::OppositeSign);
    CHECK(b.a >= -1e-15);
    CHECK(b.a <= 0.25 + 1e-15);
  }
}

TEST_CASE("property: symmetric optima sit in the low-dissipation window") {
  for (const char* name : {"product", "inverse_sum"}) {
    for (double eta_c : {0.05, 0.2, 0.5, 0.8}) {
      const double eta = optimum(preset(name), eta_c);
      const auto cl = classical_comparators(eta_c);
      CHECK(eta >= cl.eta_ld_low);
      CHECK(eta <= cl.eta_ld_high);
    }
  }
}

TEST_CASE("property: the truncated series is fourth-order accurate") {
  for (const char* name : {"product", "inverse_sum"}) {
    const auto c = preset(name);
    const auto coeffs = expansion_coeffs(c, 1.0);
    std::vector<double> xs;
    std::vector<double> errs;
    for (double eta_c = 0.01; eta_c <= 0.2 + 1e-12; eta_c *= 1.35) {
      xs.push_back(eta_c);
      errs.push_back(optimum(c, eta_c) - eta_series(eta_c, coeffs));
    }
    INFO(name);
    CHECK(loglog_slope(xs, errs) >= 3.7);
  }
}
