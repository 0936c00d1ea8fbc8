#include <doctest.h>

#include <cmath>

#include "capdp/field_ops.hpp"
#include "capdp/rng.hpp"

using namespace capdp;

namespace {

ScalarField coordinate_field(const DomainPtr& d, int axis) {
  ScalarField u(d);
  for (long k = 0; k < d->node_count(); ++k) u[k] = d->position(k)[axis];
  return u;
}

ScalarField random_field(const DomainPtr& d, Rng& rng) {
  ScalarField u(d);
  for (long k = 0; k < d->node_count(); ++k)
    if (d->role(k) == Role::Interior) u[k] = rng.uniform(-1.0, 2.0);
  return u;
}

}  // namespace

TEST_CASE("gradient of constants and coordinates") {
  auto d = std::make_shared<DiscreteDomain>(make_box(16));
  ScalarField c(d, 3.0);
  for (const Vec3& g : discrete_gradient(c)) {
    CHECK(g[0] == 0.0);
    CHECK(g[1] == 0.0);
  }
  ScalarField x1 = coordinate_field(d, 0);
  for (const Vec3& g : discrete_gradient(x1)) {
    CHECK(g[0] == doctest::Approx(1.0));
    CHECK(g[1] == doctest::Approx(0.0));
  }
}

TEST_CASE("energy of affine fields with constant coefficient is exact") {
  auto d = std::make_shared<DiscreteDomain>(make_box(64));
  DoublePhaseIntegrand itg = make_constant_integrand(d, 2, 2, 0.0);
  ScalarField u = coordinate_field(d, 0);
  EnergyBreakdown e = energy(u, itg);
  CHECK(e.total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(e.total == doctest::Approx(e.p_part + e.q_part).epsilon(1e-14));
  ScalarField z(d, 0.0);
  CHECK(energy(z, itg).total == 0.0);
}

TEST_CASE("parallel and serial energy kernels agree bitwise") {
  auto d = std::make_shared<DiscreteDomain>(make_annulus({0, 0, 0}, 0.4, 1.0, 48));
  DoublePhaseIntegrand itg = make_integrand(d, 2, 2.5, 1.0, "dist_pow:1");
  Rng rng(3);
  ScalarField u = random_field(d, rng);
  EnergyBreakdown a = energy(u, itg, std::nullopt, 1e-4);
  EnergyBreakdown b = energy_serial(u, itg, std::nullopt, 1e-4);
  CHECK(a.total == b.total);
  CHECK(a.cellwise == b.cellwise);
  CHECK(energy_gradient(u, itg, 1e-4) == energy_gradient_serial(u, itg, 1e-4));
}

TEST_CASE("assembled energy gradient matches finite differences") {
  auto d = std::make_shared<DiscreteDomain>(make_ball({0, 0, 0}, 1.0, 12));
  DoublePhaseIntegrand itg = make_integrand(d, 1.7, 2.1, 1.0, "const:0.5");
  Rng rng(11);
  ScalarField u = random_field(d, rng);
  double delta = 1e-3;
  std::vector<double> g = energy_gradient(u, itg, delta);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> dir(g.size(), 0.0);
    for (long k = 0; k < d->node_count(); ++k)
      if (d->role(k) == Role::Interior) dir[static_cast<std::size_t>(k)] = rng.uniform(-1, 1);
    double gd = 0;
    for (std::size_t i = 0; i < g.size(); ++i) gd += g[i] * dir[i];
    double eps = 1e-6;
    ScalarField up = u, um = u;
    for (long k = 0; k < d->node_count(); ++k) {
      up[k] += eps * dir[static_cast<std::size_t>(k)];
      um[k] -= eps * dir[static_cast<std::size_t>(k)];
    }
    double fd = (energy(up, itg, std::nullopt, delta).total -
                 energy(um, itg, std::nullopt, delta).total) /
                (2 * eps);
    CHECK(gd == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("lp mean of a coordinate on the unit box") {
  auto d = std::make_shared<DiscreteDomain>(make_box(64));
  ScalarField u = coordinate_field(d, 0);
  // exact quadratic mean over [0,1]^2 of x^2 is 1/3
  CHECK(lp_mean(u, std::nullopt, 2.0) == doctest::Approx(std::sqrt(1.0 / 3)).epsilon(1e-3));
  ScalarField c(d, -2.5);
  CHECK(lp_mean(c, std::nullopt, 1.0) == doctest::Approx(2.5));
  CHECK(lp_mean(c, std::nullopt, 1.0, true) == doctest::Approx(-2.5));
  CHECK_THROWS_AS(lp_mean(u, Ball{{50, 50, 0}, 0.1}, 1.0), EmptyRegion);
}

TEST_CASE("means are monotone in the exponent") {
  auto d = std::make_shared<DiscreteDomain>(make_box(24));
  Rng rng(5);
  for (int i = 0; i < 10; ++i) {
    ScalarField u = random_field(d, rng);
    CHECK(lp_mean(u, std::nullopt, 1.0) <= lp_mean(u, std::nullopt, 2.0) * (1 + 1e-12));
  }
}

TEST_CASE("restricted maximal operator base cases") {
  auto d = std::make_shared<DiscreteDomain>(make_box(24));
  ScalarField f(d, -1.5);
  ScalarField zero_radius(d, 0.0);
  ScalarField m0 = restricted_maximal(f, zero_radius);
  for (long k = 0; k < d->node_count(); ++k) CHECK(m0[k] == 1.5);
  ScalarField radius(d, 0.2);
  ScalarField m1 = restricted_maximal(f, radius);
  for (long k = 0; k < d->node_count(); ++k) CHECK(m1[k] == doctest::Approx(1.5));
}

TEST_CASE("maximal average of an indicator seen from inside its support") {
  auto d = std::make_shared<DiscreteDomain>(make_box(64));
  ScalarField f(d);
  for (long k = 0; k < d->node_count(); ++k) {
    Vec3 x = d->position(k);
    double rho = std::hypot(x[0] - 0.5, x[1] - 0.5);
    f[k] = rho <= 0.25 ? 1.0 : 0.0;
  }
  ScalarField radius(d, 0.0);
  long center = d->index(d->nearest_node({0.5, 0.5, 0}));
  radius[center] = 0.125;
  ScalarField m = restricted_maximal(f, radius);
  CHECK(m[center] == doctest::Approx(1.0));
}

TEST_CASE("truncation clamps and never increases energy") {
  auto d = std::make_shared<DiscreteDomain>(make_ball({0, 0, 0}, 1.0, 16));
  DoublePhaseIntegrand itg = make_integrand(d, 2, 2.5, 1.0, "const:1");
  Rng rng(17);
  for (int i = 0; i < 25; ++i) {
    ScalarField u = random_field(d, rng);
    ScalarField v = truncate(u, 0.8);
    for (double x : v.values) {
      CHECK(x >= 0.0);
      CHECK(x <= 0.8);
    }
    CHECK(energy(v, itg).total <= energy(u, itg).total * (1 + 1e-14));
  }
  CHECK_THROWS_AS(truncate(ScalarField(d), -1.0), std::domain_error);
}

TEST_CASE("bump family is deterministic and compactly supported") {
  auto d = std::make_shared<DiscreteDomain>(make_annulus({0, 0, 0}, 0.4, 1.0, 32));
  auto fam1 = lipschitz_bump_family(d, 9, 42);
  auto fam2 = lipschitz_bump_family(d, 9, 42);
  REQUIRE(fam1.size() == 9);
  for (std::size_t i = 0; i < fam1.size(); ++i) CHECK(fam1[i].values == fam2[i].values);
  for (const auto& u : fam1)
    for (long k = 0; k < d->node_count(); ++k)
      if (d->role(k) != Role::Interior) CHECK(u[k] == 0.0);
  // the widest wedge reaches value 1
  double vmax = 0;
  for (double v : fam1[0].values) vmax = std::max(vmax, v);
  CHECK(vmax == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("oscillation is dominated by the restricted maximal function of the gradient") {
  // |u(z) - mean over B(z,r)|^s <= C M_{2r}(|r grad u|^s)(z), C stable under refinement
  double worst[2] = {0, 0};
  int li = 0;
  for (int res : {24, 48}) {
    auto d = std::make_shared<DiscreteDomain>(make_ball({0, 0, 0}, 1.0, res));
    auto fam = lipschitz_bump_family(d, 6, 3);
    double s = 2.0, r = 0.3;
    for (const auto& u : fam) {
      std::vector<Vec3> g = discrete_gradient(u);
      // nodal |grad|^s
      ScalarField gs(d);
      Idx3 cs = cell_shape(*d);
      for (long k = 0; k < d->node_count(); ++k) {
        Idx3 i = d->unindex(k);
        if (i[0] >= cs[0] || i[1] >= cs[1]) continue;
        Vec3 gc = g[static_cast<std::size_t>(cell_index(*d, i))];
        gs[k] = std::pow(r * std::hypot(gc[0], gc[1]), s);
      }
      long z = d->index(d->nearest_node({0.2, 0.1, 0}));
      ScalarField radius(d, 0.0);
      radius[z] = 2 * r;
      double M = restricted_maximal(gs, radius)[z];
      double mean = lp_mean(u, Ball{d->position(z), r}, 1.0, true);
      double osc = std::pow(std::abs(u[z] - mean), s);
      if (M > 0) worst[li] = std::max(worst[li], osc / M);
    }
    ++li;
  }
  CHECK(worst[0] > 0);
  CHECK(worst[1] <= worst[0] * 2.5);
  CHECK(worst[1] >= worst[0] * 0.4);
}
