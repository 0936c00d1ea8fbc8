#include "capdp/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace capdp {

namespace {

double norm3(const Vec3& g) { return std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]); }

double dist2(const Vec3& a, const Vec3& b, int dim) {
  double s = 0;
  for (int d = 0; d < dim; ++d) s += (a[d] - b[d]) * (a[d] - b[d]);
  return s;
}

struct CellScan {
  std::vector<Idx3> cells;
  std::vector<double> phi;   // phi(x_c, |grad u|_c) per cell
  std::vector<double> gmag;  // |grad u|_c
  std::vector<Vec3> centers;
};

CellScan scan_cells(const ScalarField& u, const DoublePhaseIntegrand& itg) {
  const DiscreteDomain& d = *u.dom;
  std::vector<Vec3> g = discrete_gradient(u);
  Idx3 cs = cell_shape(d);
  CellScan out;
  for (int ck = 0; ck < cs[2]; ++ck)
    for (int cj = 0; cj < cs[1]; ++cj)
      for (int ci = 0; ci < cs[0]; ++ci) {
        Idx3 c{ci, cj, ck};
        if (!cell_active(d, c)) continue;
        double gm = norm3(g[static_cast<std::size_t>(cell_index(d, c))]);
        out.cells.push_back(c);
        out.gmag.push_back(gm);
        out.phi.push_back(phi_const(itg.p, itg.q, cell_coeff(itg, c), gm));
        out.centers.push_back(cell_center(d, c));
      }
  return out;
}

}  // namespace

std::vector<InequalityReport> interior_reverse_holder_check(const ScalarField& u,
                                                            const DoublePhaseIntegrand& itg,
                                                            const std::vector<Ball>& balls,
                                                            const std::vector<double>& theta_grid) {
  const DiscreteDomain& d = *u.dom;
  CellScan sc = scan_cells(u, itg);
  double hn = std::pow(d.h, d.dim);

  double grad_p = 0;
  for (double gm : sc.gmag) grad_p += hn * std::pow(gm, itg.p);
  double grad_norm = std::pow(grad_p, 1.0 / itg.p);
  double factor = 1 + itg.holder_seminorm * std::pow(grad_norm, itg.q - itg.p);

  std::vector<InequalityReport> out;
  for (const Ball& b : balls) {
    double inner = 0, inner_n = 0;
    std::vector<double> outer_phi;
    for (std::size_t i = 0; i < sc.cells.size(); ++i) {
      double dd = dist2(sc.centers[i], b.center, d.dim);
      if (dd <= b.r * b.r) outer_phi.push_back(sc.phi[i]);
      if (dd <= b.r * b.r / 4) {
        inner += sc.phi[i];
        ++inner_n;
      }
    }
    if (outer_phi.empty() || inner_n == 0) continue;  // ball exits the domain or too small
    double lhs = inner / inner_n;
    for (double theta : theta_grid) {
      double acc = 0;
      for (double v : outer_phi) acc += std::pow(v, theta);
      double rhs = factor * std::pow(acc / static_cast<double>(outer_phi.size()), 1.0 / theta);
      InequalityReport rep;
      rep.name = "reverse_holder";
      rep.z = b.center;
      rep.r = b.r;
      rep.t = theta;
      rep.lhs = lhs;
      rep.rhs_raw = rhs;
      rep.implied_constant = rhs > 0 ? lhs / rhs : 0;
      rep.pass = std::isfinite(rep.implied_constant);
      out.push_back(rep);
    }
  }
  return out;
}

std::vector<InequalityReport> boundary_caccioppoli_check(const ScalarField& u,
                                                         const ScalarField& f,
                                                         const DoublePhaseIntegrand& itg,
                                                         const std::vector<Ball>& balls) {
  const DiscreteDomain& d = *u.dom;
  CellScan su = scan_cells(u, itg);
  std::vector<Vec3> gf = discrete_gradient(f);
  double hn = std::pow(d.h, d.dim);

  std::vector<InequalityReport> out;
  for (const Ball& b : balls) {
    double lhs_int = 0, rhs_int = 0;
    bool any_inner = false, any_outer = false;
    for (std::size_t i = 0; i < su.cells.size(); ++i) {
      double dd = std::sqrt(dist2(su.centers[i], b.center, d.dim));
      if (dd <= b.r / 2) {
        lhs_int += hn * su.phi[i];
        any_inner = true;
      }
      if (dd <= b.r) {
        const Idx3& c = su.cells[i];
        double ac = cell_coeff(itg, c);
        // corner means of u - f over the cell
        int nc = 1 << d.dim;
        double uc = 0;
        for (int bit = 0; bit < nc; ++bit) {
          Idx3 nidx = c;
          for (int ax = 0; ax < d.dim; ++ax) nidx[ax] += (bit >> ax) & 1;
          long k = d.index(nidx);
          uc += u[k] - f[k];
        }
        uc = std::abs(uc / nc);
        double gfm = norm3(gf[static_cast<std::size_t>(cell_index(d, c))]);
        rhs_int += hn * (phi_const(itg.p, itg.q, ac, uc / b.r) +
                         phi_const(itg.p, itg.q, ac, gfm));
        any_outer = true;
      }
    }
    if (!any_inner || !any_outer) continue;
    double vol_half = ball_volume(d.dim) * std::pow(b.r / 2, d.dim);
    double vol_full = ball_volume(d.dim) * std::pow(b.r, d.dim);
    InequalityReport rep;
    rep.name = "boundary_caccioppoli";
    rep.z = b.center;
    rep.r = b.r;
    rep.lhs = lhs_int / vol_half;
    rep.rhs_raw = rhs_int / vol_full;
    rep.implied_constant = rep.rhs_raw > 0 ? rep.lhs / rep.rhs_raw : 0;
    rep.pass = std::isfinite(rep.implied_constant);
    out.push_back(rep);
  }
  return out;
}

HigherIntReport higher_integrability_report(
    const std::function<DomainPtr(int level)>& make_domain,
    const std::function<DoublePhaseIntegrand(const DomainPtr&)>& make_integrand,
    const std::function<double(const Vec3&)>& boundary_data, int levels,
    const std::vector<double>& sigma_grid, double r_a, double r_hat0, const SolveSpec& spec) {
  HigherIntReport rep;
  rep.sigma_grid = sigma_grid;

  DomainPtr finest;
  DoublePhaseIntegrand finest_itg;
  ScalarField finest_u;
  double plain_prev = 0, plain_last = 0;

  for (int lvl = 0; lvl < levels; ++lvl) {
    DomainPtr dom = make_domain(lvl);
    DoublePhaseIntegrand itg = make_integrand(dom);
    ScalarField f(dom);
    for (long k = 0; k < dom->node_count(); ++k) f[k] = boundary_data(dom->position(k));
    CapacityResult res = dirichlet_solve(dom, itg, f, spec);

    CellScan sc = scan_cells(res.minimizer, itg);
    double hn = std::pow(dom->h, dom->dim);
    std::vector<double> row;
    for (double sigma : sigma_grid) {
      double acc = 0;
      for (double v : sc.phi) acc += hn * std::pow(v, sigma);
      row.push_back(acc);
    }
    rep.h_levels.push_back(dom->h);
    rep.energies.push_back(row);
    plain_prev = plain_last;
    double plain = 0;
    for (double v : sc.phi) plain += hn * v;
    plain_last = plain;
    if (lvl == levels - 1) {
      finest = dom;
      finest_itg = itg;
      finest_u = res.minimizer;
    }
  }

  if (levels >= 2 && plain_prev > 0)
    rep.sigma1_stable = std::abs(plain_last - plain_prev) <= 0.05 * plain_prev;

  // largest sigma whose integral is refinement stable across the finest pair
  rep.sigma_star = 1;
  if (levels >= 2) {
    const auto& coarse = rep.energies[static_cast<std::size_t>(levels - 2)];
    const auto& fine = rep.energies[static_cast<std::size_t>(levels - 1)];
    for (std::size_t i = 0; i < sigma_grid.size(); ++i) {
      if (coarse[i] <= 0) continue;
      double ratio = fine[i] / coarse[i];
      if (ratio <= 1.5 && ratio >= 1.0 / 1.5) rep.sigma_star = std::max(rep.sigma_star, sigma_grid[i]);
    }
  }

  // Dirichlet-side quantities on the finest level
  const DiscreteDomain& d = *finest;
  std::vector<long> boundary_nodes, zero_boundary;
  for (long k = 0; k < d.node_count(); ++k) {
    if (d.role(k) != Role::Dirichlet && d.role(k) != Role::Obstacle) continue;
    boundary_nodes.push_back(k);
    if (finest_itg.coeff(k) <= 0) zero_boundary.push_back(k);
  }
  // P(r_a/2): boundary nodes within r_a/2 of a zero of the coefficient
  double a_P = std::numeric_limits<double>::infinity();
  bool outside_nonempty = false;
  long p_count = 0;
  for (long k : boundary_nodes) {
    Vec3 x = d.position(k);
    bool in_P = false;
    for (long j : zero_boundary)
      if (std::sqrt(dist2(x, d.position(j), d.dim)) < r_a / 2) {
        in_P = true;
        break;
      }
    if (in_P) {
      ++p_count;
    } else {
      outside_nonempty = true;
      a_P = std::min(a_P, finest_itg.coeff(k));
    }
  }
  rep.P_node_count = p_count;
  rep.a_P_infinite = !outside_nonempty;
  rep.a_P = outside_nonempty ? a_P : std::numeric_limits<double>::infinity();
  rep.rho = rep.a_P_infinite
                ? r_hat0
                : std::min(r_hat0, std::pow(rep.a_P / (1 + finest_itg.holder_seminorm),
                                            1.0 / finest_itg.alpha));

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
  rep.diam = std::sqrt(diam);

  // bracketed right-hand side at the largest stable sigma, constant set to 1
  double sigma = rep.sigma_star;
  CellScan sc = scan_cells(finest_u, finest_itg);
  double hn = std::pow(d.h, d.dim);
  double plain = 0, fsig = 0;
  ScalarField f(finest);
  for (long k = 0; k < d.node_count(); ++k) f[k] = boundary_data(d.position(k));
  CellScan sf = scan_cells(f, finest_itg);
  for (double v : sc.phi) plain += hn * v;
  for (double v : sf.phi) fsig += hn * std::pow(v, sigma);
  double inv_ap = rep.a_P_infinite
                      ? 0.0
                      : std::pow(rep.a_P, -static_cast<double>(d.dim) /
                                              (finest_itg.p * finest_itg.alpha));
  rep.theorem_rhs = std::pow(1 + rep.diam / rep.rho, d.dim) *
                    (std::pow(rep.rho, (1 - sigma) * d.dim / sigma) * plain +
                     std::pow(fsig, 1.0 / sigma) + inv_ap);
  return rep;
}

OptimalityReport optimality_demo(int n, double p,
                                 const std::function<DomainPtr(int level)>& make_domain,
                                 int levels, const std::vector<double>& deltas,
                                 const SolveSpec& spec) {
  OptimalityReport rep;
  rep.p = p;
  rep.deltas = deltas;
  for (int lvl = 0; lvl < levels; ++lvl) {
    DomainPtr dom = make_domain(lvl);
    DoublePhaseIntegrand itg = make_constant_integrand(dom, p, p, 0.0);
    ScalarField f(dom);
    for (long k = 0; k < dom->node_count(); ++k)
      if (dom->role(k) == Role::Obstacle) f[k] = 1.0;  // 1 on the puncture, 0 outside
    CapacityResult res = dirichlet_solve(dom, itg, f, spec);

    const DiscreteDomain& d = *dom;
    ScalarField dist(dom);
    {
      // distance to the puncture set, not to the outer boundary
      std::vector<Vec3> punct;
      for (long k = 0; k < d.node_count(); ++k)
        if (d.role(k) == Role::Obstacle) punct.push_back(d.position(k));
      for (long k = 0; k < d.node_count(); ++k) {
        double best = punct.empty() ? 0.0 : std::numeric_limits<double>::infinity();
        Vec3 x = d.position(k);
        for (const Vec3& q : punct) best = std::min(best, std::sqrt(dist2(x, q, d.dim)));
        dist[k] = best;
      }
    }

    std::vector<Vec3> g = discrete_gradient(res.minimizer);
    Idx3 cs = cell_shape(d);
    double hn = std::pow(d.h, d.dim);
    OptimalityRow row;
    row.h = d.h;
    row.higher_energies.assign(deltas.size(), 0.0);
    double grad_p = 0;
    std::vector<std::pair<double, double>> cell_data;  // (gmag, dist at center)
    for (int ck = 0; ck < cs[2]; ++ck)
      for (int cj = 0; cj < cs[1]; ++cj)
        for (int ci = 0; ci < cs[0]; ++ci) {
          Idx3 c{ci, cj, ck};
          if (!cell_active(d, c)) continue;
          double gm = norm3(g[static_cast<std::size_t>(cell_index(d, c))]);
          row.max_grad = std::max(row.max_grad, gm);
          grad_p += hn * std::pow(gm, p);
          for (std::size_t i = 0; i < deltas.size(); ++i)
            row.higher_energies[i] += hn * std::pow(gm, p + deltas[i]);
          int corners = 1 << d.dim;
          double dc = 0;
          for (int b = 0; b < corners; ++b) {
            Idx3 nidx = c;
            for (int ax = 0; ax < d.dim; ++ax) nidx[ax] += (b >> ax) & 1;
            dc += dist[d.index(nidx)];
          }
          cell_data.emplace_back(gm, dc / corners);
        }
    for (auto& [gm, dc] : cell_data)
      if (grad_p > 0)
        row.pointwise_bound =
            std::max(row.pointwise_bound, std::pow(gm, p) * std::pow(dc, n) / grad_p);
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

}  // namespace capdp
