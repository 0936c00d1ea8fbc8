// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on failure.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "capdp/experiments.hpp"
#include "capdp/report.hpp"
#include "capdp/rng.hpp"
#include "capdp/verify.hpp"

using namespace capdp;

namespace {

int failures = 0;

void verdict(int id, bool pass, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

double now_s() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

DomainPtr condenser(const Vec3& z, double r_in, double r_out, int res) {
  auto base = make_ball(z, r_out, res);
  return std::make_shared<DiscreteDomain>(with_obstacle_ball(base, z, r_in));
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

// ---------------------------------------------------------------- criterion 1
void criterion_radial_condenser() {
  SolveSpec spec;
  double t0 = now_s();
  double v2 = p_capacity(condenser({0, 0, 0}, 0.5, 1.0, 256), 2.0, spec).value;
  double t2 = now_s() - t0;
  double oracle2 = radial_condenser_oracle(2, 2, 0.5, 1.0);
  double err2 = std::abs(v2 - oracle2) / oracle2;

  t0 = now_s();
  double v3 = p_capacity(condenser({0, 0, 0}, 0.5, 1.0, 256), 3.0, spec).value;
  double t3 = now_s() - t0;
  double oracle3 = radial_condenser_oracle(2, 3, 0.5, 1.0);
  double err3 = std::abs(v3 - oracle3) / oracle3;

  bool pass = err2 <= 0.02 && err3 <= 0.03 && t2 <= 60 && t3 <= 60;
  verdict(1, pass,
          "radial condenser: p=2 err " + fmt(err2) + " (" + fmt(t2) + " s), p=3 err " +
              fmt(err3) + " (" + fmt(t3) + " s)");
}

// ---------------------------------------------------------------- criterion 2
void criterion_degenerate_collapse() {
  SolveSpec spec;
  spec.t_min = 1.0 / 16;
  spec.t_max = 16;
  Rng rng(2024);
  double worst = 0;
  for (int i = 0; i < 10; ++i) {
    Vec3 z{rng.uniform(-0.25, 0.25), rng.uniform(-0.25, 0.25), 0};
    double r_in = rng.uniform(0.2, 0.45);
    DomainPtr dom = condenser(z, r_in, 1.0, 32);
    DoublePhaseIntegrand itg = make_constant_integrand(dom, 2, 2.5, 0.0);
    double ref = p_capacity(dom, 2.0, spec).value;
    double inf = infimal_capacity(dom, itg, spec).value;
    worst = std::max(worst, std::abs(inf - ref) / ref);
  }
  verdict(2, worst <= 1e-6, "degenerate coefficient collapse: worst rel diff " + fmt(worst));
}

// ---------------------------------------------------------------- criterion 3
void criterion_capacity_sandwich() {
  SolveSpec spec;
  // the infimal value approaches the p-capacity like a t^(q-p); with gaps down to
  // 0.08 p and coefficients up to 1e3 the level grid must reach 2^-40 before that
  // term is negligible
  spec.t_min = std::pow(2.0, -40);
  spec.t_max = 16;
  Rng rng(777);
  int bad = 0;
  std::string note;
  for (int i = 0; i < 20; ++i) {
    Vec3 z{rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2), 0};
    double r_in = rng.uniform(0.2, 0.45);
    double p = rng.uniform(1.6, 2.4);
    double q = p * rng.uniform(1.08, 1.2);
    double a0 = rng.uniform(0.0, 2.0);
    if (i == 0) {
      // extreme-coefficient instance; pair it with the widest gap so the level
      // grid can actually reach the p-phase
      a0 = 1e3;
      q = p * 1.2;
    }
    DomainPtr dom = condenser(z, r_in, 1.0, 32);
    DoublePhaseIntegrand itg = make_constant_integrand(dom, p, q, a0);
    auto [upper, lower] = capacity_bounds_check(dom, itg, spec, 0.02);
    if (!upper.pass || !lower.pass) {
      ++bad;
      note = " first failure at instance " + std::to_string(i);
    }
  }
  verdict(3, bad == 0,
          "capacity upper/lower bound suite: " + std::to_string(20 - bad) + "/20 instances" +
              note);
}

// ---------------------------------------------------------------- criterion 4
void criterion_counterexample() {
  CounterexampleReport rep = counterexample_report(2, 2, 3, 1.0, {0.25, 0.125, 0.0625}, 256);
  bool energy_ok = true;
  for (int i = 0; i < 2; ++i) {
    double err = std::abs(rep.rows[i].grad_energy - rep.rows[i].grad_energy_exact) /
                 rep.rows[i].grad_energy_exact;
    energy_ok = energy_ok && err <= 0.01;
  }
  bool growth_ok = true;
  for (std::size_t i = 1; i < rep.rows.size(); ++i)
    growth_ok = growth_ok && rep.rows[i].Q_scaled_q >= 1.5 * rep.rows[i - 1].Q_scaled_q;
  double lo = 1e300, hi = 0;
  for (const auto& row : rep.rows) {
    lo = std::min(lo, row.Q_scaled_p);
    hi = std::max(hi, row.Q_scaled_p);
  }
  double mid = (lo + hi) / 2;
  bool band_ok = hi <= 1.3 * mid && lo >= 0.7 * mid;
  bool pass = energy_ok && growth_ok && band_ok && rep.all_sandwich_ok;
  verdict(4, pass,
          std::string("integrability counterexample: energy ") + (energy_ok ? "ok" : "off") +
              ", sandwich " + (rep.all_sandwich_ok ? "ok" : "violated") + ", growth " +
              (growth_ok ? "ok" : "too slow") + ", bounded branch " +
              (band_ok ? "ok" : "drifts"));
}

// ---------------------------------------------------------------- criterion 5
void criterion_scaling_identity() {
  SolveSpec spec;
  Vec3 z{0.1, 0.05, 0};
  double worst = 0;
  for (double p : {1.5, 2.0, 3.0}) {
    for (double r : {0.5, 0.25, 0.125}) {
      int per_unit = static_cast<int>(std::lround(96 / r));
      DomainPtr native = condenser(z, r / 2, r, per_unit);
      double cap_native = p_capacity(native, p, spec).value;
      auto [unit, map] = rescale_to_unit(*native, z, r, 64);
      auto unit_ptr = std::make_shared<DiscreteDomain>(std::move(unit));
      double cap_unit = p_capacity(unit_ptr, p, spec).value;
      double predicted = std::pow(r, 2.0 - p) * cap_unit;
      worst = std::max(worst, std::abs(cap_native - predicted) / predicted);
    }
  }
  verdict(5, worst <= 0.05, "capacity scaling identity: worst rel diff " + fmt(worst));
}

// ---------------------------------------------------------------- criterion 6
void criterion_whitney() {
  std::vector<DiscreteDomain> domains;
  domains.push_back(make_ball({0, 0, 0}, 1.0, 33));
  domains.push_back(make_annulus({0, 0, 0}, 0.4, 1.0, 40));
  domains.push_back(make_box(48));
  domains.push_back(make_ball_minus_point_cluster({0, 0, 0}, 1.0, {{0, 0, 0}}, 32));
  domains.push_back(make_complement_halfspace(0, 0.0, 24));

  bool pass = true;
  std::string note;
  for (std::size_t di = 0; di < domains.size(); ++di) {
    const DiscreteDomain& d = domains[di];
    WhitneyDecomposition w = whitney_decompose(d);
    long interior = d.count(Role::Interior);
    std::set<long> seen;
    bool sandwich = true;
    int max_gen = 0;
    for (const auto& q : w.cubes) {
      double diam = q.size * d.h;
      sandwich = sandwich && diam <= q.dist && q.dist <= 4 * diam;
      max_gen = std::max(max_gen, q.generation);
      for (int dj = 0; dj < q.size; ++dj)
        for (int di2 = 0; di2 < q.size; ++di2)
          seen.insert(d.index({q.corner[0] + di2, q.corner[1] + dj, q.corner[2]}));
    }
    bool cover = w.covered && static_cast<long>(seen.size()) == interior;

    // per-generation overlap of the 5x dilations
    long overlap_max = 0;
    for (int g = 0; g <= max_gen; ++g) {
      std::vector<int> counts(static_cast<std::size_t>(d.node_count()), 0);
      for (const auto& q : w.cubes) {
        if (q.generation != g) continue;
        int s = q.size;
        for (int dj = -2 * s; dj < 3 * s; ++dj)
          for (int di2 = -2 * s; di2 < 3 * s; ++di2) {
            Idx3 n{q.corner[0] + di2, q.corner[1] + dj, q.corner[2]};
            if (!d.in_range(n)) continue;
            long c = ++counts[static_cast<std::size_t>(d.index(n))];
            overlap_max = std::max(overlap_max, c);
          }
      }
    }
    bool overlap_ok = overlap_max <= 100;  // 5^n 2^n at n = 2
    if (!(sandwich && cover && overlap_ok)) {
      pass = false;
      note += " domain " + std::to_string(di) + (sandwich ? "" : " sandwich") +
              (cover ? "" : " cover") + (overlap_ok ? "" : " overlap");
    }
  }
  verdict(6, pass, "whitney sandwich/cover/overlap on 5 domains" + note);
}

// ---------------------------------------------------------------- criterion 7
void criterion_mazya_scalefree() {
  SolveSpec spec;
  auto dom = std::make_shared<DiscreteDomain>(make_ball({0, 0, 0}, 1.0, 96));
  DoublePhaseIntegrand itg = make_constant_integrand(dom, 2, 2.5, 1.0);
  auto mrange = admissible_m_range(2, itg.p, itg.q, 1.0);
  double mid = (mrange->first + mrange->second) / 2;
  bool pass = true;
  std::string note = "mazya constants coefficient of variation:";
  for (double m : {itg.p, mid}) {
    std::vector<double> constants;
    for (double r : {0.5, 0.25, 0.125, 0.0625}) {
      ScalarField u(dom);
      for (long k = 0; k < dom->node_count(); ++k) {
        Vec3 x = dom->position(k);
        u[k] = std::max(0.0, std::hypot(x[0], x[1]) - r / 2);
      }
      InequalityReport rep = mazya_check(u, {0, 0, 0}, r, itg, m, {0, 0, 0}, 1.0, 32, spec);
      if (!rep.degenerate) constants.push_back(rep.implied_constant);
    }
    double mean = 0, var = 0;
    for (double c : constants) mean += c;
    mean /= constants.size();
    for (double c : constants) var += (c - mean) * (c - mean);
    double cov = std::sqrt(var / constants.size()) / mean;
    note += " m=" + fmt(m) + ":" + fmt(cov);
    pass = pass && constants.size() == 4 && cov <= 0.5;
  }
  verdict(7, pass, note);
}

// ---------------------------------------------------------------- criterion 8
void criterion_hardy_suite() {
  double t0 = now_s();
  // fat configuration: annulus, complement fat on both rims
  auto fat = std::make_shared<DiscreteDomain>(make_annulus({0, 0, 0}, 0.5, 1.0, 64));
  DoublePhaseIntegrand itg = make_integrand(fat, 2, 2.5, 1.0, "const:1");
  auto family = lipschitz_bump_family(fat, 10, 7);

  // one-sided inequality: the certificate is a uniform upper bound on the constants
  double cmax = 0;
  bool finite = true;
  {
    auto reports = hardy_integral_check(fat, itg, family);
    for (const auto& r : reports) {
      if (r.implied_constant <= 0) continue;
      finite = finite && std::isfinite(r.implied_constant);
      cmax = std::max(cmax, r.implied_constant);
    }
  }

  // the mean-value and pointwise relatives on the same configuration
  std::vector<Vec3> centers;
  for (int i = 0; i < 4; ++i) {
    double th = 2 * 3.14159265358979323846 * i / 4;
    centers.push_back({0.5 * std::cos(th), 0.5 * std::sin(th), 0});
  }
  auto poincare = boundary_poincare_check(fat, itg, family, centers, {0.25, 0.125},
                                          {0.75, 0, 0}, 0.5);
  double pmax = 0;
  for (const auto& r : poincare) {
    if (r.degenerate || r.implied_constant <= 0) continue;
    pmax = std::max(pmax, r.implied_constant);
  }

  // punctured disk: constants along the concentration sequence must blow up.
  // pure p-growth here -- a q-term would add sigma^(p-q)-type growth to the
  // right-hand side and mask the logarithmic divergence being demonstrated
  auto punct = std::make_shared<DiscreteDomain>(
      make_ball_minus_point_cluster({0, 0, 0}, 1.0, {{0, 0, 0}}, 128));
  DoublePhaseIntegrand itg2 = make_integrand(punct, 2, 2, 1.0, "const:0");
  auto seq = concentration_family(punct, {0, 0, 0}, {0.2, 0.1, 0.05, 0.025});
  auto conc = hardy_integral_check(punct, itg2, seq);
  double growth = conc.back().implied_constant / conc.front().implied_constant;

  double dt = now_s() - t0;
  bool pass = finite && cmax <= 100 && pmax <= 100 && growth >= 1.5 && dt <= 1800;
  verdict(8, pass,
          "hardy suite: family max constant " + fmt(cmax) + ", poincare max " + fmt(pmax) +
              ", concentration growth " + fmt(growth) + "x in " + fmt(dt) + " s");
}

// ---------------------------------------------------------------- criterion 9
void criterion_self_improvement() {
  SetConfig cfg;
  cfg.p = 2;
  cfg.q = 2;
  cfg.alpha = 1;
  cfg.in_E = [](const Vec3& x) { return std::hypot(x[0], x[1]) >= 1.0; };
  cfg.coeff = [](const Vec3&) { return 0.0; };
  std::vector<Vec3> centers;
  for (int i = 0; i < 4; ++i) {
    double th = 2 * 3.14159265358979323846 * i / 4;
    centers.push_back({std::cos(th), std::sin(th), 0});
  }
  SolveSpec spec;
  SelfImprovementReport rep =
      self_improvement_scan(cfg, CapKind::P, {0.2}, centers, {0.25, 0.125}, 24, spec);
  bool ratio_ok = rep.base_ratio > 0 && rep.min_ratios[0] >= 0.5 * rep.base_ratio;

  bool sandwich_ok = true;
  for (int it = 0; it < 100 && sandwich_ok; ++it)
    for (int ia = 0; ia < 100 && sandwich_ok; ++ia) {
      double t = std::pow(10.0, -3 + 6.0 * it / 99);
      double a = ia == 0 ? 0.0 : std::pow(10.0, -3 + 6.0 * (ia - 1) / 98);
      sandwich_ok = auxiliary_sandwich_ok(2, 2.5, 0.1, t, a);
    }
  verdict(9, ratio_ok && sandwich_ok,
          "self-improvement: ratio retention " +
              fmt(rep.base_ratio > 0 ? rep.min_ratios[0] / rep.base_ratio : 0) +
              ", auxiliary sandwich " + (sandwich_ok ? "holds" : "fails") +
              " on the 100x100 grid");
}

// --------------------------------------------------------------- criterion 10
void criterion_numerics_hygiene() {
  // gradient vs finite differences
  auto d = std::make_shared<DiscreteDomain>(make_ball({0, 0, 0}, 1.0, 12));
  DoublePhaseIntegrand itg = make_integrand(d, 1.7, 2.1, 1.0, "const:0.5");
  Rng rng(99);
  ScalarField u(d);
  for (long k = 0; k < d->node_count(); ++k)
    if (d->role(k) == Role::Interior) u[k] = rng.uniform(-1, 2);
  double delta = 1e-3;
  std::vector<double> g = energy_gradient(u, itg, delta);
  double worst_fd = 0;
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
    worst_fd = std::max(worst_fd, std::abs(gd - fd) / std::max(std::abs(fd), 1e-300));
  }

  bool trunc_ok = true;
  for (int i = 0; i < 100; ++i) {
    ScalarField v(d);
    for (long k = 0; k < d->node_count(); ++k)
      if (d->role(k) == Role::Interior) v[k] = rng.uniform(-1, 2);
    trunc_ok = trunc_ok &&
               energy(truncate(v, 0.7), itg).total <= energy(v, itg).total * (1 + 1e-14);
  }

  // byte-identical CSV under a fixed seed, recomputed from scratch
  auto csv_bytes = [] {
    auto dom = std::make_shared<DiscreteDomain>(make_annulus({0, 0, 0}, 0.5, 1.0, 32));
    DoublePhaseIntegrand it2 = make_integrand(dom, 2, 2.5, 1.0, "const:1");
    auto fam = lipschitz_bump_family(dom, 5, 123);
    auto reports = hardy_integral_check(dom, it2, fam);
    auto path = std::filesystem::temp_directory_path() / "capdp_det.csv";
    write_reports_csv(path.string(), reports);
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    std::filesystem::remove(path);
    return ss.str();
  };
  std::string run1 = csv_bytes();
  std::string run2 = csv_bytes();
  bool csv_ok = !run1.empty() && run1 == run2;

  bool pass = worst_fd <= 1e-5 && trunc_ok && csv_ok;
  verdict(10, pass,
          "numerics hygiene: fd mismatch " + fmt(worst_fd) + ", truncation " +
              (trunc_ok ? "monotone" : "violated") + ", csv " +
              (csv_ok ? "byte-identical" : "differs"));
}

// --------------------------------------------------------------- criterion 11
void criterion_optimality() {
  SolveSpec spec;
  auto punctured = [](int lvl) {
    int res = 32 << lvl;
    return std::make_shared<DiscreteDomain>(
        make_ball_minus_point_cluster({0, 0, 0}, 1.0, {{0, 0, 0}}, res));
  };
  auto control = [](int lvl) {
    int res = 32 << lvl;
    return std::make_shared<DiscreteDomain>(
        with_obstacle_ball(make_ball({0, 0, 0}, 1.0, res), {0, 0, 0}, 0.25));
  };
  OptimalityReport rp = optimality_demo(2, 2.0, punctured, 3, {0.1, 0.2}, spec);
  OptimalityReport rc = optimality_demo(2, 2.0, control, 3, {0.1, 0.2}, spec);

  // delta = 0.2 energies, ratios across refinements
  double g1 = rp.rows[1].higher_energies[1] / rp.rows[0].higher_energies[1];
  double g2 = rp.rows[2].higher_energies[1] / rp.rows[1].higher_energies[1];
  bool grows = g1 >= 1.3 && g2 >= 1.3;

  double c_ratio = rc.rows[2].higher_energies[1] / rc.rows[1].higher_energies[1];
  bool control_stable = std::abs(c_ratio - 1.0) <= 0.05;

  double lo = 1e300, hi = 0;
  for (const auto& row : rp.rows) {
    if (row.pointwise_bound <= 0) continue;
    lo = std::min(lo, row.pointwise_bound);
    hi = std::max(hi, row.pointwise_bound);
  }
  bool pointwise_ok = hi > 0 && hi / lo <= 10;

  verdict(11, grows && control_stable && pointwise_ok,
          "optimality demo: growth factors " + fmt(g1) + ", " + fmt(g2) +
              " (need >= 1.3), control ratio " + fmt(c_ratio) + ", pointwise span " +
              fmt(hi / lo));
}

}  // namespace

int main() {
  criterion_radial_condenser();
  criterion_degenerate_collapse();
  criterion_capacity_sandwich();
  criterion_counterexample();
  criterion_scaling_identity();
  criterion_whitney();
  criterion_mazya_scalefree();
  criterion_hardy_suite();
  criterion_self_improvement();
  criterion_numerics_hygiene();
  criterion_optimality();
  std::printf("%d of 11 criteria passed\n", 11 - failures);
  return failures == 0 ? 0 : 1;
}
