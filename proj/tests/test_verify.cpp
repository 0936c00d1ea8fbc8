#include <doctest.h>

#include <cmath>

#include "capdp/experiments.hpp"
#include "capdp/report.hpp"
#include "capdp/verify.hpp"

using namespace capdp;

namespace {

SetConfig whole_plane_config(double p, double q) {
  SetConfig cfg;
  cfg.p = p;
  cfg.q = q;
  cfg.alpha = 1;
  cfg.in_E = [](const Vec3&) { return true; };
  cfg.coeff = [](const Vec3&) { return 1.0; };
  return cfg;
}

}  // namespace

TEST_CASE("fatness ratio is exactly one when the set fills the half ball") {
  SetConfig cfg = whole_plane_config(2, 2.5);
  SolveSpec spec;
  spec.t_min = 0.25;
  spec.t_max = 4;
  FatnessReport rep = fatness_scan(cfg, CapKind::P, {{0, 0, 0}}, {0.25}, 24, spec);
  REQUIRE(rep.entries.size() == 1);
  CHECK(rep.entries[0].ratio == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("point obstacles lose capacity density as the scale shrinks") {
  SetConfig cfg = whole_plane_config(2, 2);
  cfg.in_E = [](const Vec3& x) { return std::hypot(x[0], x[1]) <= 1e-9; };
  SolveSpec spec;
  FatnessReport rep = fatness_scan(cfg, CapKind::P, {{0, 0, 0}}, {0.5, 0.25, 0.125}, 24, spec);
  REQUIRE(rep.entries.size() == 3);
  CHECK(rep.entries[0].ratio < 0.5);
  // the probe grids scale with r, so the ratio of a one-node obstacle stays flat
  CHECK(rep.entries[2].ratio <= rep.entries[0].ratio * (1 + 1e-6));
}

TEST_CASE("degenerate coefficient collapses both fatness kinds to the same scan") {
  SetConfig cfg = whole_plane_config(2, 2.5);
  cfg.coeff = [](const Vec3&) { return 0.0; };
  cfg.in_E = [](const Vec3& x) { return x[0] <= 0.0; };
  SolveSpec spec;
  spec.t_min = 0.25;
  spec.t_max = 4;
  FatnessReport p_rep = fatness_scan(cfg, CapKind::P, {{0, 0, 0}}, {0.25, 0.125}, 20, spec);
  FatnessReport i_rep = fatness_scan(cfg, CapKind::Infimal, {{0, 0, 0}}, {0.25, 0.125}, 20, spec);
  REQUIRE(p_rep.entries.size() == i_rep.entries.size());
  for (std::size_t i = 0; i < p_rep.entries.size(); ++i)
    CHECK(p_rep.entries[i].ratio == doctest::Approx(i_rep.entries[i].ratio).epsilon(1e-6));
}

TEST_CASE("capacity sandwich between the infimal and classical values") {
  auto base = make_ball({0, 0, 0}, 1.0, 24);
  auto dom = std::make_shared<DiscreteDomain>(with_obstacle_ball(base, {0, 0, 0}, 0.4));
  DoublePhaseIntegrand itg = make_constant_integrand(dom, 2, 2.5, 1.0);
  SolveSpec spec;
  spec.t_min = std::pow(2.0, -12);
  spec.t_max = 16;
  auto [upper, lower] = capacity_bounds_check(dom, itg, spec);
  CHECK(upper.pass);
  CHECK(lower.pass);
  CHECK(upper.implied_constant > 0);
  CHECK(lower.implied_constant >= 1.0 - 0.02);
}

TEST_CASE("counterexample rows reproduce the closed-form gradient energy") {
  CounterexampleReport rep = counterexample_report(2, 2, 3, 1.0, {0.5}, 128);
  REQUIRE(rep.rows.size() == 1);
  // (1 + a_o) * pi * r^2 * (1 - 1/4) at r = 1/2 is 3 pi / 8
  double exact = 3 * 3.14159265358979323846 / 8;
  CHECK(rep.rows[0].grad_energy_exact == doctest::Approx(exact).epsilon(1e-12));
  CHECK(rep.rows[0].grad_energy == doctest::Approx(exact).epsilon(0.025));
  CHECK(rep.rows[0].sandwich_ok);
}

TEST_CASE("radial 1d integral lies in the analytic sandwich for many exponents") {
  for (double p : {1.5, 2.0, 2.7})
    for (int n : {2, 3}) {
      CounterexampleReport rep = counterexample_report(n, p, p + 0.5, 0.5, {0.25}, 32);
      CHECK(rep.all_sandwich_ok);
    }
}

TEST_CASE("mazya check degenerates without a zero set") {
  auto dom = std::make_shared<DiscreteDomain>(make_ball({0, 0, 0}, 1.0, 32));
  DoublePhaseIntegrand itg = make_constant_integrand(dom, 2, 2.5, 1.0);
  ScalarField u(dom, 1.0);  // nowhere zero
  SolveSpec spec;
  InequalityReport rep = mazya_check(u, {0, 0, 0}, 0.5, itg, 2.0, {0, 0, 0}, 1.0, 16, spec);
  CHECK(rep.degenerate);
}

TEST_CASE("mazya both-exponent paths agree when m equals p") {
  auto dom = std::make_shared<DiscreteDomain>(make_ball({0, 0, 0}, 1.0, 48));
  DoublePhaseIntegrand itg = make_constant_integrand(dom, 2, 2.5, 1.0);
  ScalarField u(dom);
  for (long k = 0; k < dom->node_count(); ++k) {
    Vec3 x = dom->position(k);
    u[k] = std::max(0.0, std::hypot(x[0], x[1]) - 0.25);
  }
  SolveSpec spec;
  InequalityReport a = mazya_check(u, {0, 0, 0}, 0.5, itg, itg.p, {0, 0, 0}, 1.0, 24, spec);
  InequalityReport b = mazya_check(u, {0, 0, 0}, 0.5, itg, itg.p, {0, 0, 0}, 1.0, 24, spec);
  REQUIRE(!a.degenerate);
  CHECK(a.implied_constant == doctest::Approx(b.implied_constant).epsilon(1e-12));
  CHECK(a.implied_constant > 0);
}

TEST_CASE("hardy reports stay finite for fields supported deep inside") {
  auto dom = std::make_shared<DiscreteDomain>(make_ball({0, 0, 0}, 1.0, 48));
  DoublePhaseIntegrand itg = make_integrand(dom, 2, 2.5, 1.0, "const:1");
  ScalarField dist = distance_to_boundary(dom);
  ScalarField u(dom);
  for (long k = 0; k < dom->node_count(); ++k)
    if (dom->role(k) == Role::Interior && dist[k] >= 0.5) u[k] = 1.0;
  auto reports = hardy_integral_check(dom, itg, {u});
  REQUIRE(reports.size() == 1);
  CHECK(reports[0].pass);
  CHECK(reports[0].implied_constant > 0);
  CHECK(std::isfinite(reports[0].implied_constant));
}

TEST_CASE("poincare checks skip empty ball intersections and scale sanely") {
  auto base = make_ball({0, 0, 0}, 1.0, 48);
  auto dom = std::make_shared<DiscreteDomain>(with_obstacle_ball(base, {0, 0, 0}, 0.3));
  DoublePhaseIntegrand itg = make_constant_integrand(dom, 2, 2.5, 0.5);
  auto fam = lipschitz_bump_family(dom, 3, 9);
  auto reports = boundary_poincare_check(dom, itg, fam, {{0.3, 0, 0}, {50, 50, 0}},
                                         {0.25, 0.125}, {0, 0, 0}, 1.0);
  bool any_skip = false, any_value = false;
  for (const auto& r : reports) {
    if (r.degenerate) any_skip = true;
    if (!r.degenerate && r.rhs_raw > 0) {
      any_value = true;
      CHECK(std::isfinite(r.implied_constant));
    }
  }
  CHECK(any_skip);
  CHECK(any_value);
}

TEST_CASE("pointwise hardy vanishes where the test function does") {
  auto dom = std::make_shared<DiscreteDomain>(make_ball({0, 0, 0}, 1.0, 32));
  DoublePhaseIntegrand itg = make_constant_integrand(dom, 2, 2.5, 1.0);
  ScalarField u(dom, 0.0);
  long z = dom->index(dom->nearest_node({0.2, 0.2, 0}));
  auto reports = pointwise_hardy_check(dom, itg, {u}, {z}, {0, 0, 0}, 1.0);
  REQUIRE(reports.size() == 1);
  CHECK(reports[0].lhs == 0.0);
}

TEST_CASE("auxiliary integrand sandwich holds with the exact factors") {
  for (double t : {0.01, 0.5, 1.0, 7.3})
    for (double a : {0.0, 0.3, 5.0})
      for (double delta : {0.05, 0.1, 0.25}) CHECK(auxiliary_sandwich_ok(2, 2.5, delta, t, a));
}

TEST_CASE("self improvement rejects epsilons crossing the exponent floor") {
  SetConfig cfg = whole_plane_config(1.4, 1.4);
  cfg.in_E = [](const Vec3& x) { return x[0] <= 0.0; };
  SolveSpec spec;
  SelfImprovementReport rep =
      self_improvement_scan(cfg, CapKind::P, {0.0, 0.5}, {{0, 0, 0}}, {0.25}, 16, spec);
  REQUIRE(rep.epsilons.size() == 2);
  CHECK(std::isfinite(rep.min_ratios[0]));
  CHECK(!std::isfinite(rep.min_ratios[1]));  // 1.4 - 0.5 <= 1
}

TEST_CASE("boundary sampling respects the cap and sits on the obstacle rim") {
  auto base = make_ball({0, 0, 0}, 1.0, 64);
  auto dom = std::make_shared<DiscreteDomain>(with_obstacle_ball(base, {0, 0, 0}, 0.5));
  auto pts = sample_obstacle_boundary(*dom, 16);
  CHECK(pts.size() == 16);
  for (const auto& z : pts)
    CHECK(std::hypot(z[0], z[1]) == doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("reverse holder constants are near one for affine minimizers") {
  auto dom = std::make_shared<DiscreteDomain>(make_box(48));
  DoublePhaseIntegrand itg = make_constant_integrand(dom, 2, 2.5, 0.5);
  ScalarField u(dom);
  for (long k = 0; k < dom->node_count(); ++k) u[k] = dom->position(k)[0];
  auto reports =
      interior_reverse_holder_check(u, itg, {Ball{{0.5, 0.5, 0}, 0.3}}, {0.6, 0.8, 1.0});
  REQUIRE(!reports.empty());
  for (const auto& r : reports)
    CHECK(r.implied_constant == doctest::Approx(1.0).epsilon(0.15));
}

TEST_CASE("caccioppoli bound is volume-controlled when u equals the data") {
  auto dom = std::make_shared<DiscreteDomain>(make_box(48));
  DoublePhaseIntegrand itg = make_constant_integrand(dom, 2, 2.5, 0.5);
  ScalarField f(dom);
  for (long k = 0; k < dom->node_count(); ++k) f[k] = 0.5 * dom->position(k)[0];
  auto reports = boundary_caccioppoli_check(f, f, itg, {Ball{{0.1, 0.5, 0}, 0.3}});
  REQUIRE(!reports.empty());
  CHECK(reports[0].implied_constant > 0);
  CHECK(reports[0].implied_constant < 2 * std::pow(2.0, 2));  // volume ratio margin
}

TEST_CASE("report serialization carries the verdicts") {
  InequalityReport r;
  r.name = "demo";
  r.lhs = 1;
  r.rhs_raw = 2;
  r.implied_constant = 0.5;
  auto j = to_json(r);
  CHECK(j["check"] == "demo");
  CHECK(j["verdict"] == "PASS");
  CHECK(fmt_g(0.5) == "0.5");
}
