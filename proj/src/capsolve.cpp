#include "capdp/capsolve.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>

namespace capdp {

namespace {

// multi-source BFS distance in grid steps over non-exterior nodes, chessboard moves
std::vector<double> bfs_distance(const DiscreteDomain& dom, const std::vector<long>& sources) {
  std::vector<double> dist(static_cast<std::size_t>(dom.node_count()),
                           std::numeric_limits<double>::infinity());
  std::deque<long> queue;
  for (long s : sources) {
    dist[static_cast<std::size_t>(s)] = 0;
    queue.push_back(s);
  }
  while (!queue.empty()) {
    long k = queue.front();
    queue.pop_front();
    Idx3 i = dom.unindex(k);
    double base = dist[static_cast<std::size_t>(k)];
    for (int dz = dom.dim > 2 ? -1 : 0; dz <= (dom.dim > 2 ? 1 : 0); ++dz)
      for (int dy = dom.dim > 1 ? -1 : 0; dy <= (dom.dim > 1 ? 1 : 0); ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0 && dz == 0) continue;
          Idx3 j{i[0] + dx, i[1] + dy, i[2] + dz};
          if (!dom.in_range(j)) continue;
          long kj = dom.index(j);
          if (dom.role(kj) == Role::Exterior) continue;
          if (dist[static_cast<std::size_t>(kj)] > base + 1) {
            dist[static_cast<std::size_t>(kj)] = base + 1;
            queue.push_back(kj);
          }
        }
  }
  return dist;
}

struct Problem {
  const DiscreteDomain* dom;
  const DoublePhaseIntegrand* itg;
  std::vector<long> free_nodes;
  std::vector<char> is_free;    // node mask
  std::vector<double> precond;  // per free node
};

double dot_free(const Problem& pr, const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0;
  for (long k : pr.free_nodes)
    s += a[static_cast<std::size_t>(k)] * b[static_cast<std::size_t>(k)];
  return s;
}

// Minimize the delta-smoothed energy over the free nodes by preconditioned
// PR+ nonlinear CG with Armijo backtracking. Returns iterations spent.
int ncg_stage(const Problem& pr, ScalarField& u, double delta, double clamp_hi, double tol,
              int iter_budget, double& last_rel) {
  const DoublePhaseIntegrand& itg = *pr.itg;
  long nn = pr.dom->node_count();
  std::vector<double> dir(static_cast<std::size_t>(nn), 0.0);
  std::vector<double> pg(static_cast<std::size_t>(nn), 0.0);
  std::vector<double> g_prev, pg_prev;
  ScalarField trial = u;

  double E = energy(u, itg, std::nullopt, delta).total;
  double alpha_prev = 1.0;
  int calm = 0;
  bool restart = true;

  for (int it = 0; it < iter_budget; ++it) {
    std::vector<double> g = energy_gradient(u, itg, delta);
    for (long k = 0; k < nn; ++k) {
      if (!pr.is_free[static_cast<std::size_t>(k)]) g[static_cast<std::size_t>(k)] = 0;
      pg[static_cast<std::size_t>(k)] = 0;
    }
    for (std::size_t f = 0; f < pr.free_nodes.size(); ++f) {
      long k = pr.free_nodes[f];
      pg[static_cast<std::size_t>(k)] = g[static_cast<std::size_t>(k)] / pr.precond[f];
    }

    double beta = 0;
    if (!restart && !g_prev.empty()) {
      double denom = dot_free(pr, g_prev, pg_prev);
      if (denom > 0) {
        double num = 0;
        for (long k : pr.free_nodes)
          num += g[static_cast<std::size_t>(k)] *
                 (pg[static_cast<std::size_t>(k)] - pg_prev[static_cast<std::size_t>(k)]);
        beta = std::max(0.0, num / denom);
      }
    }
    for (long k : pr.free_nodes)
      dir[static_cast<std::size_t>(k)] =
          -pg[static_cast<std::size_t>(k)] + beta * dir[static_cast<std::size_t>(k)];
    double gd = dot_free(pr, g, dir);
    if (gd >= 0) {  // not a descent direction, steepest descent restart
      for (long k : pr.free_nodes) dir[static_cast<std::size_t>(k)] = -pg[static_cast<std::size_t>(k)];
      gd = dot_free(pr, g, dir);
    }
    if (gd >= -1e-300) {
      last_rel = 0;
      return it;
    }

    // quadratic fit through E(0), E'(0), E(alpha_prev) for the initial step
    for (long k : pr.free_nodes)
      trial[k] = u[k] + alpha_prev * dir[static_cast<std::size_t>(k)];
    if (clamp_hi > 0)
      for (long k : pr.free_nodes) trial[k] = std::min(std::max(trial[k], 0.0), clamp_hi);
    double Et = energy(trial, itg, std::nullopt, delta).total;
    double curv = Et - E - gd * alpha_prev;
    double alpha = alpha_prev;
    if (curv > 0) {
      double fit = -gd * alpha_prev * alpha_prev / (2 * curv);
      if (fit > 0 && std::isfinite(fit)) alpha = std::min(fit, 1e6);
    }

    const double c1 = 1e-4;
    bool accepted = false;
    bool clamped = false;
    for (int bt = 0; bt < 60; ++bt) {
      clamped = false;
      for (long k : pr.free_nodes) {
        double v = u[k] + alpha * dir[static_cast<std::size_t>(k)];
        if (clamp_hi > 0) {
          double c = std::min(std::max(v, 0.0), clamp_hi);
          if (c != v) clamped = true;
          v = c;
        }
        trial[k] = v;
      }
      Et = energy(trial, itg, std::nullopt, delta).total;
      if (Et <= E + c1 * alpha * gd) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      last_rel = 0;
      return it;
    }

    double rel = (E - Et) / std::max(std::abs(E), 1e-300);
    for (long k : pr.free_nodes) u[k] = trial[k];
    E = Et;
    alpha_prev = alpha;
    last_rel = rel;
    restart = clamped;  // projection invalidates conjugacy
    g_prev = g;
    pg_prev = pg;

    if (rel < tol)
      ++calm;
    else
      calm = 0;
    if (calm >= 10 || E == 0) return it + 1;
  }
  return iter_budget;
}

}  // namespace

double phi_lower(const DoublePhaseIntegrand& itg, double t) {
  double amin = std::numeric_limits<double>::infinity();
  for (long k = 0; k < itg.dom->node_count(); ++k)
    if (itg.dom->role(k) != Role::Exterior) amin = std::min(amin, itg.coeff(k));
  if (!std::isfinite(amin)) throw EmptyRegion("no open-set nodes");
  return phi_const(itg.p, itg.q, amin, t);
}

CapacityResult solve_constrained_min(const DomainPtr& dom, const DoublePhaseIntegrand& itg,
                                     const std::vector<std::pair<long, double>>& fixed,
                                     const SolveSpec& spec, double clamp_hi) {
  long nn = dom->node_count();
  std::vector<char> is_fixed(static_cast<std::size_t>(nn), 0);
  ScalarField u(dom);
  for (auto& [k, v] : fixed) {
    is_fixed[static_cast<std::size_t>(k)] = 1;
    u[k] = v;
  }

  Problem pr;
  pr.dom = dom.get();
  pr.itg = &itg;
  pr.is_free.assign(static_cast<std::size_t>(nn), 0);
  for (long k = 0; k < nn; ++k)
    if (!is_fixed[static_cast<std::size_t>(k)] && dom->role(k) == Role::Interior) {
      pr.free_nodes.push_back(k);
      pr.is_free[static_cast<std::size_t>(k)] = 1;
    }
  if (pr.free_nodes.empty()) throw Infeasible("no free nodes to optimize");

  // diagonal of the quadratic-energy stencil, one valid-face count per node
  double hscale = std::pow(dom->h, dom->dim - 2);
  pr.precond.resize(pr.free_nodes.size());
  for (std::size_t f = 0; f < pr.free_nodes.size(); ++f) {
    Idx3 i = dom->unindex(pr.free_nodes[f]);
    int faces = 0;
    for (int d = 0; d < dom->dim; ++d)
      for (int s = -1; s <= 1; s += 2) {
        Idx3 j = i;
        j[d] += s;
        if (dom->in_range(j) && dom->role(dom->index(j)) != Role::Exterior) ++faces;
      }
    pr.precond[f] = std::max(1, faces) * 2.0 * hscale;
  }

  // deterministic init: interpolate between the constraint sets by BFS distance
  std::vector<long> high_set, zero_set;
  double high_val = 0;
  for (auto& [k, v] : fixed)
    (v != 0 ? high_set : zero_set).push_back(k);
  for (auto& [k, v] : fixed) high_val = std::max(high_val, v);
  if (!high_set.empty() && !zero_set.empty() && clamp_hi > 0) {
    auto dE = bfs_distance(*dom, high_set);
    auto dB = bfs_distance(*dom, zero_set);
    for (long k : pr.free_nodes) {
      double a = dE[static_cast<std::size_t>(k)], b = dB[static_cast<std::size_t>(k)];
      if (std::isfinite(a) && std::isfinite(b) && a + b > 0)
        u[k] = clamp_hi * b / (a + b);
    }
  } else if (!fixed.empty()) {
    // propagate the nearest fixed value, for general boundary data
    std::vector<long> srcs;
    for (auto& [k, v] : fixed) srcs.push_back(k);
    auto dist = bfs_distance(*dom, srcs);
    std::vector<double> val(static_cast<std::size_t>(nn), 0.0);
    for (auto& [k, v] : fixed) val[static_cast<std::size_t>(k)] = v;
    // level-by-level sweep copying from the best neighbor
    std::vector<long> order;
    for (long k : pr.free_nodes)
      if (std::isfinite(dist[static_cast<std::size_t>(k)])) order.push_back(k);
    std::sort(order.begin(), order.end(), [&](long a, long b) {
      double da = dist[static_cast<std::size_t>(a)], db = dist[static_cast<std::size_t>(b)];
      return da != db ? da < db : a < b;
    });
    for (long k : order) {
      Idx3 i = dom->unindex(k);
      double best = 0;
      double bd = std::numeric_limits<double>::infinity();
      for (int dz = dom->dim > 2 ? -1 : 0; dz <= (dom->dim > 2 ? 1 : 0); ++dz)
        for (int dy = dom->dim > 1 ? -1 : 0; dy <= (dom->dim > 1 ? 1 : 0); ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            Idx3 j{i[0] + dx, i[1] + dy, i[2] + dz};
            if (!dom->in_range(j)) continue;
            long kj = dom->index(j);
            if (dom->role(kj) == Role::Exterior) continue;
            if (dist[static_cast<std::size_t>(kj)] < bd) {
              bd = dist[static_cast<std::size_t>(kj)];
              best = val[static_cast<std::size_t>(kj)];
            }
          }
      val[static_cast<std::size_t>(k)] = best;
      u[k] = best;
    }
  }

  std::vector<double> deltas;
  if (std::min(itg.p, itg.q) < 2) {
    for (double d = spec.delta_start; d >= spec.delta_end * 0.999; d /= 10) deltas.push_back(d);
  } else {
    deltas.push_back(0);
  }

  CapacityResult res;
  int spent = 0;
  double last_rel = 0;
  for (double delta : deltas) {
    res.delta_used = delta;
    int budget = spec.max_iter - spent;
    if (budget <= 0) break;
    spent += ncg_stage(pr, u, delta, clamp_hi, spec.tol, budget, last_rel);
  }
  res.iterations = spent;
  res.final_relative_decrease = last_rel;
  res.not_converged = spent >= spec.max_iter && last_rel >= spec.tol;
  res.minimizer = u;
  res.value = energy(u, itg, std::nullopt, 0).total;
  return res;
}

namespace {

std::vector<std::pair<long, double>> condenser_constraints(const DiscreteDomain& dom, double t) {
  std::vector<std::pair<long, double>> fixed;
  bool any_obstacle = false;
  for (long k = 0; k < dom.node_count(); ++k) {
    Role r = dom.role(k);
    if (r == Role::Obstacle) {
      fixed.emplace_back(k, t);
      any_obstacle = true;
    } else if (r == Role::Dirichlet) {
      fixed.emplace_back(k, 0.0);
    }
  }
  if (!any_obstacle) throw EmptyRegion("domain has no obstacle set");
  return fixed;
}

}  // namespace

CapacityResult p_capacity(const DomainPtr& dom, double p, const SolveSpec& spec) {
  DoublePhaseIntegrand itg = make_constant_integrand(dom, p, p, 0.0);
  return level_t_capacity(dom, itg, 1.0, spec);
}

CapacityResult level_t_capacity(const DomainPtr& dom, const DoublePhaseIntegrand& itg, double t,
                                const SolveSpec& spec) {
  if (t <= 0) throw std::domain_error("level-t capacity requires t > 0");
  auto fixed = condenser_constraints(*dom, t);
  // the level-t problem is the t=1 problem scaled by t, so the smoothing widths
  // must scale with t as well or tiny levels see a flattened landscape
  SolveSpec scaled = spec;
  scaled.delta_start = spec.delta_start * t;
  scaled.delta_end = spec.delta_end * t;
  CapacityResult res = solve_constrained_min(dom, itg, fixed, scaled, t);
  res.value = res.value / phi_lower(itg, t);
  res.level_t = t;
  return res;
}

CapacityResult infimal_capacity(const DomainPtr& dom, const DoublePhaseIntegrand& itg,
                                const SolveSpec& spec) {
  int k_lo = static_cast<int>(std::lround(std::log2(spec.t_min)));
  int k_hi = static_cast<int>(std::lround(std::log2(spec.t_max)));

  std::vector<std::pair<double, double>> curve;
  double best_v = std::numeric_limits<double>::infinity();
  int best_i = 0;
  CapacityResult best;
  for (int k = k_lo; k <= k_hi; ++k) {
    double t = std::pow(2.0, k);
    CapacityResult r = level_t_capacity(dom, itg, t, spec);
    curve.emplace_back(t, r.value);
    if (r.value < best_v) {
      best_v = r.value;
      best_i = k - k_lo;
      best = std::move(r);
    }
  }

  bool boundary = best_i == 0 || best_i == k_hi - k_lo;
  if (!boundary) {
    // golden-section in log2 t over the bracket around the grid minimum
    const double gr = 0.6180339887498949;
    double lo = best_i - 1 + k_lo, hi = best_i + 1 + k_lo;
    double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
    auto eval = [&](double lx) {
      double t = std::pow(2.0, lx);
      CapacityResult r = level_t_capacity(dom, itg, t, spec);
      curve.emplace_back(t, r.value);
      if (r.value < best.value) best = r;
      return r.value;
    };
    double f1 = eval(x1), f2 = eval(x2);
    for (int it = 0; it < 24; ++it) {
      double prev = std::min(f1, f2);
      if (f1 < f2) {
        hi = x2;
        x2 = x1;
        f2 = f1;
        x1 = hi - gr * (hi - lo);
        f1 = eval(x1);
      } else {
        lo = x1;
        x1 = x2;
        f1 = f2;
        x2 = lo + gr * (hi - lo);
        f2 = eval(x2);
      }
      double now = std::min(f1, f2);
      if (std::abs(prev - now) <= spec.refine_tol * std::max(std::abs(now), 1e-300)) break;
    }
  }

  std::sort(curve.begin(), curve.end());
  best.t_curve = std::move(curve);
  best.boundary_minimum = boundary;
  return best;
}

double radial_condenser_oracle(int n, double p, double r, double R) {
  if (!(r > 0) || r >= R) throw InvalidCondenser("need 0 < r < R");
  if (!(p > 1)) throw InvalidCondenser("need p > 1");
  if (std::abs(p - n) < 1e-14)
    return sphere_area(n) * std::pow(std::log(R / r), 1.0 - n);
  double e = (n - p) / (p - 1);
  double span = std::abs(std::pow(r, -e) - std::pow(R, -e));
  return sphere_area(n) * std::pow(std::abs(e), p - 1) * std::pow(span, 1.0 - p);
}

CapacityResult dirichlet_solve(const DomainPtr& dom, const DoublePhaseIntegrand& itg,
                               const ScalarField& boundary_data, const SolveSpec& spec) {
  std::vector<std::pair<long, double>> fixed;
  for (long k = 0; k < dom->node_count(); ++k) {
    Role r = dom->role(k);
    if (r == Role::Dirichlet || r == Role::Obstacle)
      fixed.emplace_back(k, boundary_data[k]);
  }
  if (fixed.empty()) throw NoBoundary("domain has no boundary nodes");
  return solve_constrained_min(dom, itg, fixed, spec, 0);
}

DiscreteDomain with_obstacle_ball(const DiscreteDomain& dom, const Vec3& center, double r) {
  DiscreteDomain out = dom;
  long marked = 0;
  for (long k = 0; k < out.node_count(); ++k) {
    if (out.role(k) != Role::Interior) continue;
    Vec3 x = out.position(k);
    double s = 0;
    for (int d = 0; d < out.dim; ++d) s += (x[d] - center[d]) * (x[d] - center[d]);
    if (std::sqrt(s) <= r) {
      out.roles[static_cast<std::size_t>(k)] = Role::Obstacle;
      ++marked;
    }
  }
  if (marked == 0) throw EmptyRegion("obstacle ball contains no interior node");
  return out;
}

}  // namespace capdp
