#include "capdp/verify.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace capdp {

namespace {

double dist2(const Vec3& a, const Vec3& b, int dim) {
  double s = 0;
  for (int d = 0; d < dim; ++d) s += (a[d] - b[d]) * (a[d] - b[d]);
  return s;
}

// gradient of a cell with the field extended by its stored values everywhere,
// no role filtering; used for averages over balls that cross the boundary
Vec3 full_cell_gradient(const DiscreteDomain& dom, const std::vector<double>& u, const Idx3& c) {
  Vec3 g{0, 0, 0};
  long low = dom.index(c);
  for (int d = 0; d < dom.dim; ++d) {
    Idx3 hi = c;
    hi[d] += 1;
    g[d] = (u[static_cast<std::size_t>(dom.index(hi))] - u[static_cast<std::size_t>(low)]) / dom.h;
  }
  return g;
}

double corner_mean(const DiscreteDomain& dom, const std::vector<double>& u, const Idx3& c) {
  int nc = 1 << dom.dim;
  double s = 0;
  for (int b = 0; b < nc; ++b) {
    Idx3 n = c;
    for (int d = 0; d < dom.dim; ++d) n[d] += (b >> d) & 1;
    s += u[static_cast<std::size_t>(dom.index(n))];
  }
  return s / nc;
}

struct BallCells {
  std::vector<Idx3> cells;
};

BallCells cells_in_ball(const DiscreteDomain& dom, const Vec3& z, double r) {
  BallCells out;
  Idx3 cs = cell_shape(dom);
  for (int ck = 0; ck < cs[2]; ++ck)
    for (int cj = 0; cj < cs[1]; ++cj)
      for (int ci = 0; ci < cs[0]; ++ci) {
        Idx3 c{ci, cj, ck};
        if (dist2(cell_center(dom, c), z, dom.dim) <= r * r) out.cells.push_back(c);
      }
  return out;
}

// local condenser grid for one fatness probe
DomainPtr probe_domain(const SetConfig& cfg, const Vec3& z, double r, int resolution,
                       bool restrict_to_E) {
  // resolution counts nodes per probe radius so the grids stay scale-consistent
  int per_unit = std::max(8, static_cast<int>(std::lround(resolution / r)));
  DiscreteDomain ball = make_ball(z, r, per_unit, cfg.dim);
  long marked = 0;
  for (long k = 0; k < ball.node_count(); ++k) {
    if (ball.role(k) != Role::Interior) continue;
    Vec3 x = ball.position(k);
    if (std::sqrt(dist2(x, z, cfg.dim)) > r / 2) continue;
    if (restrict_to_E && !cfg.in_E(x)) continue;
    ball.roles[static_cast<std::size_t>(k)] = Role::Obstacle;
    ++marked;
  }
  if (marked == 0) return nullptr;
  return std::make_shared<DiscreteDomain>(std::move(ball));
}

CapacityResult probe_capacity(const SetConfig& cfg, CapKind kind, const DomainPtr& dom,
                              const SolveSpec& spec) {
  if (kind == CapKind::P) return p_capacity(dom, cfg.p, spec);
  if (kind == CapKind::Q) return p_capacity(dom, cfg.q, spec);
  DoublePhaseIntegrand itg;
  itg.p = cfg.p;
  itg.q = cfg.q;
  itg.alpha = cfg.alpha;
  itg.dom = dom;
  itg.a.resize(static_cast<std::size_t>(dom->node_count()));
  for (long k = 0; k < dom->node_count(); ++k)
    itg.a[static_cast<std::size_t>(k)] = std::max(0.0, cfg.coeff(dom->position(k)));
  itg.holder_seminorm = holder_seminorm_estimate(dom, itg.a, cfg.alpha, SeminormMode::Subsampled);
  return infimal_capacity(dom, itg, spec);
}

}  // namespace

std::vector<Vec3> sample_obstacle_boundary(const DiscreteDomain& dom, int cap) {
  std::vector<Vec3> pts;
  for (long k = 0; k < dom.node_count(); ++k) {
    if (dom.role(k) != Role::Obstacle) continue;
    Idx3 i = dom.unindex(k);
    bool boundary = false;
    for (int d = 0; d < dom.dim && !boundary; ++d)
      for (int s = -1; s <= 1; s += 2) {
        Idx3 j = i;
        j[d] += s;
        if (!dom.in_range(j) || dom.role(dom.index(j)) != Role::Obstacle) {
          boundary = true;
          break;
        }
      }
    if (boundary) pts.push_back(dom.position(k));
  }
  if (static_cast<int>(pts.size()) <= cap) return pts;
  // farthest-point subsampling, deterministic start at the lexicographically first point
  std::vector<Vec3> picked{pts.front()};
  std::vector<double> mind(pts.size(), std::numeric_limits<double>::infinity());
  while (static_cast<int>(picked.size()) < cap) {
    std::size_t best = 0;
    double bestd = -1;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      mind[i] = std::min(mind[i], dist2(pts[i], picked.back(), dom.dim));
      if (mind[i] > bestd) {
        bestd = mind[i];
        best = i;
      }
    }
    picked.push_back(pts[best]);
  }
  return picked;
}

FatnessReport fatness_scan(const SetConfig& cfg, CapKind kind, const std::vector<Vec3>& centers,
                           const std::vector<double>& radii, int resolution,
                           const SolveSpec& spec) {
  FatnessReport rep;
  rep.kind = kind;
  rep.note = "sampled centers and radii; ratios from discrete solves";
  double min_ratio = std::numeric_limits<double>::infinity();
  for (const Vec3& z : centers)
    for (double r : radii) {
      FatnessEntry e;
      e.z = z;
      e.r = r;
      DomainPtr den_dom = probe_domain(cfg, z, r, resolution, false);
      DomainPtr num_dom = probe_domain(cfg, z, r, resolution, true);
      if (!den_dom) {
        e.converged = false;
        rep.entries.push_back(e);
        continue;
      }
      CapacityResult den = probe_capacity(cfg, kind, den_dom, spec);
      e.cap_den = den.value;
      if (!num_dom) {
        e.cap_num = 0;
        e.ratio = 0;
        e.converged = !den.not_converged;
      } else {
        CapacityResult num = probe_capacity(cfg, kind, num_dom, spec);
        e.cap_num = num.value;
        e.ratio = den.value > 0 ? num.value / den.value : 0;
        e.converged = !den.not_converged && !num.not_converged;
      }
      if (e.converged) min_ratio = std::min(min_ratio, e.ratio);
      rep.entries.push_back(e);
    }
  rep.min_ratio = std::isfinite(min_ratio) ? min_ratio : 0;
  return rep;
}

EquivalenceReport equivalence_probe(const SetConfig& cfg, const std::vector<Vec3>& centers,
                                    const std::vector<double>& radii, int resolution,
                                    double threshold, const SolveSpec& spec) {
  EquivalenceReport rep;
  rep.threshold = threshold;
  rep.p_scan = fatness_scan(cfg, CapKind::P, centers, radii, resolution, spec);
  rep.inf_scan = fatness_scan(cfg, CapKind::Infimal, centers, radii, resolution, spec);
  bool p_fat = rep.p_scan.min_ratio >= threshold;
  bool inf_fat = rep.inf_scan.min_ratio >= threshold;
  rep.agree = p_fat == inf_fat;
  return rep;
}

std::pair<InequalityReport, InequalityReport> capacity_bounds_check(
    const DomainPtr& dom, const DoublePhaseIntegrand& itg, const SolveSpec& spec, double tol) {
  CapacityResult inf_res = infimal_capacity(dom, itg, spec);
  CapacityResult p_res = p_capacity(dom, itg.p, spec);
  double cp_inf = inf_res.value;
  double cp_p = p_res.value;
  double volume = dom->count(Role::Interior) * std::pow(dom->h, dom->dim) +
                  dom->count(Role::Obstacle) * std::pow(dom->h, dom->dim) +
                  dom->count(Role::Dirichlet) * std::pow(dom->h, dom->dim);

  InequalityReport upper;
  upper.name = "infimal_upper_bound";
  upper.lhs = cp_inf;
  upper.rhs_raw = cp_p;
  upper.implied_constant = cp_p > 0 ? cp_inf / cp_p : 0;
  upper.pass = cp_inf <= cp_p * (1 + tol);

  double c = std::pow(2.0, 1.0 - itg.q / itg.p);
  double branch_a = cp_p;
  double branch_b = volume * std::pow(cp_p / volume, itg.q / itg.p);
  InequalityReport lower;
  lower.name = "infimal_lower_bound";
  lower.lhs = cp_inf;
  lower.rhs_raw = c * std::min(branch_a, branch_b);
  lower.implied_constant = lower.rhs_raw > 0 ? cp_inf / lower.rhs_raw : 0;
  lower.pass = cp_inf >= lower.rhs_raw * (1 - tol);
  lower.note = branch_a <= branch_b ? "branch:cp_p" : "branch:volume";
  return {upper, lower};
}

InequalityReport mazya_check(const ScalarField& u, const Vec3& z, double r,
                             const DoublePhaseIntegrand& itg, double m, const Vec3& y,
                             double R_ball, int resolution, const SolveSpec& spec) {
  const DiscreteDomain& dom = *u.dom;
  InequalityReport rep;
  rep.name = "mazya";
  rep.z = z;
  rep.r = r;

  auto [alo, ahi] = a_bounds_ball(itg, y, R_ball);
  (void)alo;
  double apm = ahi;

  BallCells bc = cells_in_ball(dom, z, r);
  if (bc.cells.empty()) {
    rep.degenerate = true;
    rep.note = "empty ball";
    return rep;
  }

  double lhs = 0, gm = 0;
  for (const Idx3& c : bc.cells) {
    double uc = std::abs(corner_mean(dom, u.values, c));
    lhs += phi_const(itg.p, itg.q, apm, uc);
    Vec3 g = full_cell_gradient(dom, u.values, c);
    double gn = std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]);
    gm += std::pow(r * gn, m);
  }
  double count = static_cast<double>(bc.cells.size());
  lhs /= count;
  gm /= count;  // mean of |r grad u|^m

  // rescaled zero set of u inside B(z,r)
  double umax = 0;
  for (double v : u.values) umax = std::max(umax, std::abs(v));
  double floor_z = 1e-12 * umax;
  DiscreteDomain unit = make_ball({0, 0, 0}, 1.0, resolution, dom.dim);
  long marked = 0;
  for (long k = 0; k < unit.node_count(); ++k) {
    if (unit.role(k) != Role::Interior) continue;
    Vec3 w = unit.position(k);
    Vec3 x{z[0] + r * w[0], z[1] + r * w[1], z[2] + r * w[2]};
    Idx3 near = dom.nearest_node(x);
    long kk = dom.index(near);
    if (dom.role(kk) == Role::Exterior) continue;
    if (std::sqrt(dist2(dom.position(kk), z, dom.dim)) > r) continue;
    if (std::abs(u[kk]) <= floor_z) {
      unit.roles[static_cast<std::size_t>(k)] = Role::Obstacle;
      ++marked;
    }
  }
  if (marked == 0) {
    rep.degenerate = true;
    rep.note = "zero set empty in ball";
    return rep;
  }
  DomainPtr unit_ptr = std::make_shared<DiscreteDomain>(std::move(unit));
  double capm = p_capacity(unit_ptr, m, spec).value;
  if (capm < 1e-10) {
    rep.degenerate = true;
    rep.note = "zero set capacity below solver floor";
    return rep;
  }

  double grad_mean = std::pow(gm, 1.0 / m);  // (r grad u)_{B,m}
  double bracket = 1 + apm * std::pow(capm, (itg.p - itg.q) / m) *
                           std::pow(grad_mean, itg.q - itg.p);
  rep.lhs = lhs;
  rep.rhs_raw = bracket * std::pow(capm, -itg.p / m) * std::pow(gm, itg.p / m);
  rep.implied_constant = rep.rhs_raw > 0 ? rep.lhs / rep.rhs_raw : 0;
  rep.pass = std::isfinite(rep.implied_constant);
  return rep;
}

namespace {

// composite Simpson on [a,b]
double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
  double h = (b - a) / (2 * panels);
  double s = f(a) + f(b);
  for (int i = 1; i < 2 * panels; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace

CounterexampleReport counterexample_report(int n, double p, double q, double a_o,
                                           const std::vector<double>& radii, int resolution) {
  CounterexampleReport rep;
  rep.n = n;
  rep.p = p;
  rep.q = q;
  rep.a_o = a_o;
  rep.all_sandwich_ok = true;

  for (double r : radii) {
    CounterexampleRow row;
    row.r = r;

    int per_unit = std::max(8, static_cast<int>(std::lround(resolution / r)));
    auto ball = std::make_shared<DiscreteDomain>(make_ball({0, 0, 0}, r, per_unit, n));
    ScalarField u(ball);
    for (long k = 0; k < ball->node_count(); ++k) {
      Vec3 x = ball->position(k);
      double rho = 0;
      for (int d = 0; d < n; ++d) rho += x[d] * x[d];
      u[k] = std::max(0.0, std::sqrt(rho) - r / 2);
    }
    DoublePhaseIntegrand itg = make_constant_integrand(ball, p, q, a_o);
    row.grad_energy = energy(u, itg, std::nullopt, 0).total;
    row.grad_energy_exact =
        (1 + a_o) * ball_volume(n) * (std::pow(r, n) - std::pow(r / 2, n));

    // ball average of phi_o(u_r), midpoint quadrature over in-ball cells
    BallCells bc = cells_in_ball(*ball, {0, 0, 0}, r);
    double acc = 0;
    for (const Idx3& c : bc.cells)
      acc += phi_const(p, q, a_o, std::abs(corner_mean(*ball, u.values, c)));
    row.mean_phi_u = acc / static_cast<double>(bc.cells.size());

    row.Q = row.mean_phi_u / row.grad_energy;
    row.Q_scaled_p = row.Q * std::pow(r, n - p);
    row.Q_scaled_q = row.Q * std::pow(r, n - q);

    row.I1d = simpson(
        [&](double t) { return std::pow(t - r / 2, p) * std::pow(t, n - 1); }, r / 2, r, 2048);
    double lo = std::pow(r, n + p) / (std::pow(2.0, n + p) * (p + 1));
    double hi = std::pow(r, n + p) / (std::pow(2.0, p + 1) * (p + 1));
    row.sandwich_ok = row.I1d >= lo * (1 - 1e-9) && row.I1d <= hi * (1 + 1e-9);
    rep.all_sandwich_ok = rep.all_sandwich_ok && row.sandwich_ok;
    rep.rows.push_back(row);
  }
  return rep;
}

std::vector<InequalityReport> hardy_integral_check(const DomainPtr& dom,
                                                   const DoublePhaseIntegrand& itg,
                                                   const std::vector<ScalarField>& family) {
  const DiscreteDomain& d = *dom;
  ScalarField dist = distance_to_boundary(dom);
  double hn = std::pow(d.h, d.dim);

  // diameter from the bounding box of the open-set nodes
  Vec3 lo{1e300, 1e300, 1e300}, hi{-1e300, -1e300, -1e300};
  for (long k = 0; k < d.node_count(); ++k) {
    if (d.role(k) == Role::Exterior) continue;
    Vec3 x = d.position(k);
    for (int a = 0; a < d.dim; ++a) {
      lo[a] = std::min(lo[a], x[a]);
      hi[a] = std::max(hi[a], x[a]);
    }
  }
  double diam = 0;
  for (int a = 0; a < d.dim; ++a) diam += (hi[a] - lo[a]) * (hi[a] - lo[a]);
  diam = std::sqrt(diam);

  std::vector<InequalityReport> out;
  Idx3 cs = cell_shape(d);
  int fam_id = 0;
  for (const ScalarField& u : family) {
    InequalityReport rep;
    rep.name = "hardy";
    rep.test_id = "u" + std::to_string(fam_id++);

    double lhs = 0;
    double grad_p = 0;
    for (int ck = 0; ck < cs[2]; ++ck)
      for (int cj = 0; cj < cs[1]; ++cj)
        for (int ci = 0; ci < cs[0]; ++ci) {
          Idx3 c{ci, cj, ck};
          if (!cell_active(d, c)) continue;
          double uc = std::abs(corner_mean(d, u.values, c));
          double dc = corner_mean(d, dist.values, c);
          if (dc <= 0) {
            if (uc > 0) throw std::domain_error("test function supported at the boundary");
            continue;
          }
          double ac = cell_coeff(itg, c);
          lhs += hn * phi_const(itg.p, itg.q, ac, uc / dc);
          Vec3 g = full_cell_gradient(d, u.values, c);
          grad_p += hn * std::pow(std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]), itg.p);
        }
    double grad_norm = std::pow(grad_p, 1.0 / itg.p);
    double exponent = itg.alpha + d.dim * (itg.p - itg.q) / itg.p;
    double factor = 1 + std::pow(diam, exponent) * itg.holder_seminorm *
                            std::pow(grad_norm, itg.q - itg.p);
    factor = std::pow(factor, itg.p / (itg.p - 1));
    rep.lhs = lhs;
    rep.rhs_raw = factor * energy(u, itg, std::nullopt, 0).total;
    rep.implied_constant = rep.rhs_raw > 0 ? rep.lhs / rep.rhs_raw : 0;
    rep.pass = std::isfinite(rep.implied_constant);
    out.push_back(rep);
  }
  return out;
}

std::vector<InequalityReport> boundary_poincare_check(const DomainPtr& dom,
                                                      const DoublePhaseIntegrand& itg,
                                                      const std::vector<ScalarField>& family,
                                                      const std::vector<Vec3>& centers,
                                                      const std::vector<double>& radii,
                                                      const Vec3& y, double R_ball) {
  const DiscreteDomain& d = *dom;
  auto [alo, ahi] = a_bounds_ball(itg, y, R_ball);
  (void)alo;
  double apm = ahi;
  ScalarField dist = distance_to_boundary(dom);

  std::vector<InequalityReport> out;
  int fam_id = 0;
  for (const ScalarField& u : family) {
    std::string uid = "u" + std::to_string(fam_id++);
    for (const Vec3& z : centers)
      for (double r : radii) {
        BallCells bc = cells_in_ball(d, z, r);
        if (bc.cells.empty()) {
          InequalityReport skip;
          skip.name = "poincare";
          skip.test_id = uid;
          skip.z = z;
          skip.r = r;
          skip.degenerate = true;
          skip.note = "empty ball intersection";
          out.push_back(skip);
          continue;
        }
        double lhs = 0, gp = 0;
        for (const Idx3& c : bc.cells) {
          double uc = std::abs(corner_mean(d, u.values, c));
          lhs += phi_const(itg.p, itg.q, apm, uc);
          Vec3 g = full_cell_gradient(d, u.values, c);
          gp += std::pow(r * std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]), itg.p);
        }
        double count = static_cast<double>(bc.cells.size());
        lhs /= count;
        gp /= count;
        double grad_mean = std::pow(gp, 1.0 / itg.p);
        InequalityReport rep;
        rep.name = "poincare";
        rep.test_id = uid;
        rep.z = z;
        rep.r = r;
        rep.lhs = lhs;
        rep.rhs_raw = (1 + apm * std::pow(grad_mean, itg.q - itg.p)) * gp;
        rep.implied_constant = rep.rhs_raw > 0 ? rep.lhs / rep.rhs_raw : 0;
        rep.pass = std::isfinite(rep.implied_constant);
        out.push_back(rep);
      }

    // mean value variant at interior centers with the distance as radius
    for (const Vec3& z : centers) {
      Idx3 near = d.nearest_node(z);
      long k = d.index(near);
      if (d.role(k) != Role::Interior) continue;
      double rz = dist[k];
      if (rz <= d.h) continue;
      BallCells bc = cells_in_ball(d, z, rz);
      if (bc.cells.empty()) continue;
      double mean_u = 0, gp = 0;
      for (const Idx3& c : bc.cells) {
        mean_u += corner_mean(d, u.values, c);
        Vec3 g = full_cell_gradient(d, u.values, c);
        gp += std::pow(rz * std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]), itg.p);
      }
      double count = static_cast<double>(bc.cells.size());
      mean_u = std::abs(mean_u / count);
      gp /= count;
      double grad_mean = std::pow(gp, 1.0 / itg.p);
      InequalityReport rep;
      rep.name = "poincare_mean";
      rep.test_id = uid;
      rep.z = z;
      rep.r = rz;
      rep.lhs = phi_const(itg.p, itg.q, apm, mean_u);
      rep.rhs_raw = (1 + apm * std::pow(grad_mean, itg.q - itg.p)) * gp;
      rep.implied_constant = rep.rhs_raw > 0 ? rep.lhs / rep.rhs_raw : 0;
      rep.pass = std::isfinite(rep.implied_constant);
      out.push_back(rep);
    }
  }
  return out;
}

std::vector<InequalityReport> pointwise_hardy_check(const DomainPtr& dom,
                                                    const DoublePhaseIntegrand& itg,
                                                    const std::vector<ScalarField>& family,
                                                    const std::vector<long>& sample_nodes,
                                                    const Vec3& y, double R_ball) {
  const DiscreteDomain& d = *dom;
  auto [alo, ahi] = a_bounds_ball(itg, y, R_ball);
  (void)alo;
  double apm = ahi;
  ScalarField dist = distance_to_boundary(dom);

  std::vector<InequalityReport> out;
  int fam_id = 0;
  for (const ScalarField& u : family) {
    std::string uid = "u" + std::to_string(fam_id++);
    // nodal |grad u|^p from incident cell gradients
    std::vector<Vec3> g = discrete_gradient(u);
    ScalarField f(u.dom);
    Idx3 cs = cell_shape(d);
    for (long k = 0; k < d.node_count(); ++k) {
      Idx3 i = d.unindex(k);
      double acc = 0;
      int used = 0;
      // cells having this node as a corner
      int span = 1 << d.dim;
      for (int b = 0; b < span; ++b) {
        Idx3 c = i;
        bool ok = true;
        for (int a = 0; a < d.dim; ++a) {
          c[a] -= (b >> a) & 1;
          if (c[a] < 0 || c[a] >= cs[a]) ok = false;
        }
        if (!ok) continue;
        Vec3 gc = g[static_cast<std::size_t>(cell_index(d, c))];
        acc += std::sqrt(gc[0] * gc[0] + gc[1] * gc[1] + gc[2] * gc[2]);
        ++used;
      }
      f[k] = used ? std::pow(acc / used, itg.p) : 0;
    }

    ScalarField radii(u.dom, 0.0);
    for (long z : sample_nodes) radii[z] = 2 * dist[z];
    ScalarField M = restricted_maximal(f, radii);

    for (long z : sample_nodes) {
      double rz = dist[z];
      InequalityReport rep;
      rep.name = "pointwise_hardy";
      rep.test_id = uid;
      rep.z = d.position(z);
      rep.r = rz;
      double Mv = std::pow(rz, itg.p) * M[z];
      rep.lhs = phi_const(itg.p, itg.q, apm, std::abs(u[z]));
      rep.rhs_raw = Mv > 0 ? (1 + apm * std::pow(Mv, (itg.q - itg.p) / itg.p)) * Mv : 0;
      rep.implied_constant = rep.rhs_raw > 0 ? rep.lhs / rep.rhs_raw : 0;
      rep.pass = std::isfinite(rep.implied_constant);
      out.push_back(rep);
    }
  }
  return out;
}

SelfImprovementReport self_improvement_scan(const SetConfig& cfg, CapKind kind,
                                            const std::vector<double>& epsilons,
                                            const std::vector<Vec3>& centers,
                                            const std::vector<double>& radii, int resolution,
                                            const SolveSpec& spec) {
  SelfImprovementReport rep;
  rep.base_ratio = fatness_scan(cfg, kind, centers, radii, resolution, spec).min_ratio;
  for (double eps : epsilons) {
    rep.epsilons.push_back(eps);
    if (cfg.p - eps <= 1) {
      rep.min_ratios.push_back(std::numeric_limits<double>::quiet_NaN());
      rep.notes.push_back("rejected: p - eps <= 1");
      continue;
    }
    SetConfig mod = cfg;
    if (kind == CapKind::Infimal) {
      double delta = eps / cfg.p;
      mod.p = cfg.p * (1 - delta);
      mod.q = cfg.q * (1 - delta);
      auto base = cfg.coeff;
      mod.coeff = [base, delta](const Vec3& x) {
        return std::pow(std::max(0.0, base(x)), 1 - delta);
      };
    } else {
      mod.p = cfg.p - eps;
    }
    rep.min_ratios.push_back(
        fatness_scan(mod, kind, centers, radii, resolution, spec).min_ratio);
    rep.notes.push_back(eps == 0 ? "base" : "");
  }
  return rep;
}

bool auxiliary_sandwich_ok(double p, double q, double delta, double t, double a) {
  double val = std::pow(phi_const(p, q, a, t), 1 - delta);
  double aux = std::pow(t, p * (1 - delta)) + std::pow(a, 1 - delta) * std::pow(t, q * (1 - delta));
  return 0.5 * aux <= val * (1 + 1e-12) && val <= 2 * aux * (1 + 1e-12);
}

std::vector<ScalarField> concentration_family(const DomainPtr& dom, const Vec3& point,
                                              const std::vector<double>& sigmas) {
  // fade against the exterior boundary only; fading against the full boundary
  // (which includes the concentration point) would cap u/d and hide the blowup
  const DiscreteDomain& d0 = *dom;
  std::vector<double> dist(static_cast<std::size_t>(d0.node_count()),
                           std::numeric_limits<double>::infinity());
  std::deque<long> queue;
  for (long k = 0; k < d0.node_count(); ++k)
    if (d0.role(k) == Role::Exterior) {
      dist[static_cast<std::size_t>(k)] = 0;
      queue.push_back(k);
    }
  while (!queue.empty()) {
    long k = queue.front();
    queue.pop_front();
    Idx3 i = d0.unindex(k);
    for (int ax = 0; ax < d0.dim; ++ax)
      for (int s = -1; s <= 1; s += 2) {
        Idx3 j = i;
        j[ax] += s;
        if (!d0.in_range(j)) continue;
        long kj = d0.index(j);
        if (dist[static_cast<std::size_t>(kj)] < std::numeric_limits<double>::infinity())
          continue;
        dist[static_cast<std::size_t>(kj)] = dist[static_cast<std::size_t>(k)] + d0.h;
        queue.push_back(kj);
      }
  }
  double dmax = 0;
  for (long k = 0; k < dom->node_count(); ++k)
    if (dom->role(k) == Role::Interior && std::isfinite(dist[static_cast<std::size_t>(k)]))
      dmax = std::max(dmax, dist[static_cast<std::size_t>(k)]);
  double outer = dmax / 2;

  std::vector<ScalarField> out;
  for (double s : sigmas) {
    ScalarField u(dom);
    for (long k = 0; k < dom->node_count(); ++k) {
      if (dom->role(k) != Role::Interior) continue;
      Vec3 x = dom->position(k);
      double rho = 0;
      for (int d = 0; d < dom->dim; ++d) rho += (x[d] - point[d]) * (x[d] - point[d]);
      rho = std::sqrt(rho);
      double rise = std::clamp((rho - s) / s, 0.0, 1.0);
      u[k] = rise * std::min(1.0, dist[static_cast<std::size_t>(k)] / outer);
    }
    out.push_back(std::move(u));
  }
  return out;
}

}  // namespace capdp
