#include "capdp/field_ops.hpp"

#include <algorithm>
#include <cmath>

#include "capdp/rng.hpp"

namespace capdp {

Idx3 cell_shape(const DiscreteDomain& dom) {
  Idx3 cs{1, 1, 1};
  for (int d = 0; d < dom.dim; ++d) cs[d] = std::max(1, dom.shape[d] - 1);
  return cs;
}

long cell_count(const DiscreteDomain& dom) {
  Idx3 cs = cell_shape(dom);
  return static_cast<long>(cs[0]) * cs[1] * cs[2];
}

long cell_index(const DiscreteDomain& dom, const Idx3& c) {
  Idx3 cs = cell_shape(dom);
  return (static_cast<long>(c[2]) * cs[1] + c[1]) * cs[0] + c[0];
}

namespace {

Idx3 cell_unindex(const DiscreteDomain& dom, long k) {
  Idx3 cs = cell_shape(dom);
  Idx3 c;
  c[0] = static_cast<int>(k % cs[0]);
  c[1] = static_cast<int>((k / cs[0]) % cs[1]);
  c[2] = static_cast<int>(k / (static_cast<long>(cs[0]) * cs[1]));
  return c;
}

int corner_count(const DiscreteDomain& dom) { return 1 << dom.dim; }

Idx3 corner_of(const DiscreteDomain& dom, const Idx3& c, int bits) {
  Idx3 n = c;
  for (int d = 0; d < dom.dim; ++d) n[d] += (bits >> d) & 1;
  return n;
}

double g_delta(double v, double delta) {
  if (delta == 0) return v;
  return std::sqrt(v * v + delta * delta) - delta;
}

}  // namespace

Vec3 cell_center(const DiscreteDomain& dom, const Idx3& c) {
  Vec3 x = dom.origin;
  for (int d = 0; d < dom.dim; ++d) x[d] += (c[d] + 0.5) * dom.h;
  return x;
}

bool cell_active(const DiscreteDomain& dom, const Idx3& c) {
  int nc = corner_count(dom);
  for (int b = 0; b < nc; ++b)
    if (dom.role(dom.index(corner_of(dom, c, b))) == Role::Exterior) return false;
  return true;
}

double cell_coeff(const DoublePhaseIntegrand& itg, const Idx3& c) {
  const DiscreteDomain& dom = *itg.dom;
  int nc = corner_count(dom);
  double s = 0;
  for (int b = 0; b < nc; ++b) s += itg.coeff(dom.index(corner_of(dom, c, b)));
  return s / nc;
}

namespace {

// Forward-difference gradient of one cell; faces with an exterior endpoint drop out.
Vec3 one_cell_gradient(const DiscreteDomain& dom, const std::vector<double>& u, const Idx3& c) {
  Vec3 g{0, 0, 0};
  long low = dom.index(c);
  if (dom.role(low) == Role::Exterior) return g;
  for (int d = 0; d < dom.dim; ++d) {
    Idx3 hi = c;
    hi[d] += 1;
    long k = dom.index(hi);
    if (dom.role(k) == Role::Exterior) continue;
    g[d] = (u[static_cast<std::size_t>(k)] - u[static_cast<std::size_t>(low)]) / dom.h;
  }
  return g;
}

double norm3(const Vec3& g) { return std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]); }

bool center_in_ball(const DiscreteDomain& dom, const Idx3& c, const Ball& ball) {
  Vec3 x = cell_center(dom, c);
  double s = 0;
  for (int d = 0; d < dom.dim; ++d) s += (x[d] - ball.center[d]) * (x[d] - ball.center[d]);
  return std::sqrt(s) <= ball.r;
}

template <bool Parallel>
EnergyBreakdown energy_impl(const ScalarField& u, const DoublePhaseIntegrand& itg,
                            const std::optional<Ball>& region, double delta) {
  const DiscreteDomain& dom = *u.dom;
  long nc = cell_count(dom);
  double hn = std::pow(dom.h, dom.dim);
  std::vector<double> pw(static_cast<std::size_t>(nc), 0.0);
  std::vector<double> qw(static_cast<std::size_t>(nc), 0.0);

#pragma omp parallel for if (Parallel) schedule(static)
  for (long k = 0; k < nc; ++k) {
    Idx3 c = cell_unindex(dom, k);
    if (region && !center_in_ball(dom, c, *region)) continue;
    Vec3 g = one_cell_gradient(dom, u.values, c);
    double s = g_delta(norm3(g), delta);
    if (s == 0) continue;
    double a = cell_coeff(itg, c);
    pw[static_cast<std::size_t>(k)] = hn * std::pow(s, itg.p);
    qw[static_cast<std::size_t>(k)] = hn * a * std::pow(s, itg.q);
  }

  EnergyBreakdown out;
  out.cellwise.resize(static_cast<std::size_t>(nc));
  for (long k = 0; k < nc; ++k) {
    std::size_t i = static_cast<std::size_t>(k);
    out.p_part += pw[i];
    out.q_part += qw[i];
    out.cellwise[i] = pw[i] + qw[i];
  }
  out.total = out.p_part + out.q_part;
  return out;
}

template <bool Parallel>
std::vector<double> energy_gradient_impl(const ScalarField& u, const DoublePhaseIntegrand& itg,
                                         double delta) {
  const DiscreteDomain& dom = *u.dom;
  long nc = cell_count(dom);
  long nn = dom.node_count();
  double hn = std::pow(dom.h, dom.dim);
  Idx3 cs = cell_shape(dom);

  // dDensity/dg per cell; invalid faces carry zero weight.
  std::vector<Vec3> w(static_cast<std::size_t>(nc), Vec3{0, 0, 0});

#pragma omp parallel for if (Parallel) schedule(static)
  for (long k = 0; k < nc; ++k) {
    Idx3 c = cell_unindex(dom, k);
    Vec3 g = one_cell_gradient(dom, u.values, c);
    double v = norm3(g);
    if (v == 0) continue;
    double root = std::sqrt(v * v + delta * delta);
    double s = delta == 0 ? v : root - delta;
    if (s <= 0) continue;
    double a = cell_coeff(itg, c);
    double dphi = itg.p * std::pow(s, itg.p - 1) + a * itg.q * std::pow(s, itg.q - 1);
    double scale = hn * dphi / root;
    for (int d = 0; d < dom.dim; ++d) w[static_cast<std::size_t>(k)][d] = scale * g[d];
  }

  std::vector<double> grad(static_cast<std::size_t>(nn), 0.0);

#pragma omp parallel for if (Parallel) schedule(static)
  for (long node = 0; node < nn; ++node) {
    if (dom.role(node) == Role::Exterior) continue;
    Idx3 i = dom.unindex(node);
    double acc = 0;
    for (int d = 0; d < dom.dim; ++d) {
      // node as the high endpoint of the face of the cell one step back
      Idx3 c = i;
      c[d] -= 1;
      bool ok = true;
      for (int e = 0; e < dom.dim; ++e)
        if (c[e] < 0 || c[e] >= cs[e]) ok = false;
      if (ok && dom.role(dom.index(c)) != Role::Exterior)
        acc += w[static_cast<std::size_t>(cell_index(dom, c))][d] / dom.h;
      // node as the low corner of its own cell
      bool own = true;
      for (int e = 0; e < dom.dim; ++e)
        if (i[e] >= cs[e]) own = false;
      if (own) {
        Idx3 hi = i;
        hi[d] += 1;
        if (dom.in_range(hi) && dom.role(dom.index(hi)) != Role::Exterior)
          acc -= w[static_cast<std::size_t>(cell_index(dom, i))][d] / dom.h;
      }
    }
    grad[static_cast<std::size_t>(node)] = acc;
  }
  return grad;
}

}  // namespace

std::vector<Vec3> discrete_gradient(const ScalarField& u) {
  const DiscreteDomain& dom = *u.dom;
  long nc = cell_count(dom);
  std::vector<Vec3> g(static_cast<std::size_t>(nc));
#pragma omp parallel for schedule(static)
  for (long k = 0; k < nc; ++k)
    g[static_cast<std::size_t>(k)] = one_cell_gradient(dom, u.values, cell_unindex(dom, k));
  return g;
}

EnergyBreakdown energy(const ScalarField& u, const DoublePhaseIntegrand& itg,
                       const std::optional<Ball>& region, double delta) {
  return energy_impl<true>(u, itg, region, delta);
}

EnergyBreakdown energy_serial(const ScalarField& u, const DoublePhaseIntegrand& itg,
                              const std::optional<Ball>& region, double delta) {
  return energy_impl<false>(u, itg, region, delta);
}

std::vector<double> energy_gradient(const ScalarField& u, const DoublePhaseIntegrand& itg,
                                    double delta) {
  return energy_gradient_impl<true>(u, itg, delta);
}

std::vector<double> energy_gradient_serial(const ScalarField& u, const DoublePhaseIntegrand& itg,
                                           double delta) {
  return energy_gradient_impl<false>(u, itg, delta);
}

double lp_mean(const ScalarField& u, const std::optional<Ball>& region, double m,
               bool signed_mean) {
  const DiscreteDomain& dom = *u.dom;
  long nc = cell_count(dom);
  int corners = corner_count(dom);
  double acc = 0;
  long used = 0;
  for (long k = 0; k < nc; ++k) {
    Idx3 c = cell_unindex(dom, k);
    if (!cell_active(dom, c)) continue;
    if (region && !center_in_ball(dom, c, *region)) continue;
    double v = 0;
    for (int b = 0; b < corners; ++b)
      v += u[dom.index(corner_of(dom, c, b))];
    v /= corners;
    if (signed_mean && m == 1)
      acc += v;
    else
      acc += std::pow(std::abs(v), m);
    ++used;
  }
  if (used == 0) throw EmptyRegion("lp_mean over empty region");
  double mean = acc / static_cast<double>(used);
  if (signed_mean && m == 1) return mean;
  return std::pow(mean, 1.0 / m);
}

ScalarField restricted_maximal(const ScalarField& f, const ScalarField& radii) {
  const DiscreteDomain& dom = *f.dom;
  long nn = dom.node_count();
  long nc = cell_count(dom);
  int corners = corner_count(dom);

  // cell-center positions and |f| samples of the active cells, once
  std::vector<Vec3> centers;
  std::vector<double> samples;
  centers.reserve(static_cast<std::size_t>(nc));
  for (long k = 0; k < nc; ++k) {
    Idx3 c = cell_unindex(dom, k);
    if (!cell_active(dom, c)) continue;
    double v = 0;
    for (int b = 0; b < corners; ++b)
      v += f[dom.index(corner_of(dom, c, b))];
    centers.push_back(cell_center(dom, c));
    samples.push_back(std::abs(v / corners));
  }

  ScalarField out(f.dom);
#pragma omp parallel for schedule(static)
  for (long node = 0; node < nn; ++node) {
    double R = radii[node];
    double base = std::abs(f[node]);
    if (R <= 0) {
      out[node] = base;
      continue;
    }
    Vec3 x = dom.position(node);
    std::vector<std::pair<double, double>> by_dist;
    by_dist.reserve(centers.size());
    for (std::size_t i = 0; i < centers.size(); ++i) {
      double s = 0;
      for (int d = 0; d < dom.dim; ++d) s += (centers[i][d] - x[d]) * (centers[i][d] - x[d]);
      double dist = std::sqrt(s);
      if (dist < R) by_dist.emplace_back(dist, samples[i]);
    }
    std::sort(by_dist.begin(), by_dist.end());
    double best = base;
    double sum = 0;
    std::size_t i = 0;
    for (int j = 1; j * dom.h < R; ++j) {
      double rj = j * dom.h;
      while (i < by_dist.size() && by_dist[i].first <= rj) sum += by_dist[i++].second;
      if (i > 0) best = std::max(best, sum / static_cast<double>(i));
    }
    out[node] = best;
  }
  return out;
}

ScalarField truncate(const ScalarField& u, double t) {
  if (t <= 0) throw std::domain_error("truncate requires t > 0");
  ScalarField out = u;
  for (double& v : out.values) v = std::min(std::max(v, 0.0), t);
  return out;
}

std::vector<ScalarField> lipschitz_bump_family(const DomainPtr& dom, int count,
                                               std::uint64_t seed) {
  if (dom->interior_count() == 0) throw EmptyRegion("domain has no interior");
  ScalarField d = distance_to_boundary(dom);
  double dmax = 0;
  std::vector<long> interior;
  for (long k = 0; k < dom->node_count(); ++k) {
    if (dom->role(k) == Role::Interior) {
      interior.push_back(k);
      dmax = std::max(dmax, d[k]);
    }
  }
  if (dmax <= 0) dmax = dom->h;

  auto mask = [&](ScalarField& f) {
    for (long k = 0; k < dom->node_count(); ++k)
      if (dom->role(k) != Role::Interior) f[k] = 0;
  };

  Rng rng(seed);
  std::vector<ScalarField> family;
  family.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    ScalarField f(dom);
    int kind = i % 3;
    if (kind == 0) {
      double s = dmax / std::pow(2.0, static_cast<double>(i / 3 % 4));
      for (long k = 0; k < dom->node_count(); ++k) f[k] = std::min(1.0, d[k] / s);
    } else if (kind == 1) {
      long c = interior[static_cast<std::size_t>(rng.below(interior.size()))];
      double rho = rng.uniform(0.15, 0.6) * dmax;
      Vec3 z = dom->position(c);
      for (long k = 0; k < dom->node_count(); ++k) {
        Vec3 x = dom->position(k);
        double s = 0;
        for (int a = 0; a < dom->dim; ++a) s += (x[a] - z[a]) * (x[a] - z[a]);
        f[k] = std::max(0.0, 1.0 - std::sqrt(s) / rho) * std::min(1.0, d[k] / rho);
      }
    } else {
      // nonnegative combination of a fresh wedge and bump
      double w1 = rng.uniform(0.2, 1.0), w2 = rng.uniform(0.2, 1.0);
      double s = rng.uniform(0.25, 1.0) * dmax;
      long c = interior[static_cast<std::size_t>(rng.below(interior.size()))];
      double rho = rng.uniform(0.15, 0.6) * dmax;
      Vec3 z = dom->position(c);
      double vmax = 0;
      for (long k = 0; k < dom->node_count(); ++k) {
        Vec3 x = dom->position(k);
        double t = 0;
        for (int a = 0; a < dom->dim; ++a) t += (x[a] - z[a]) * (x[a] - z[a]);
        double bump = std::max(0.0, 1.0 - std::sqrt(t) / rho) * std::min(1.0, d[k] / rho);
        f[k] = w1 * std::min(1.0, d[k] / s) + w2 * bump;
        vmax = std::max(vmax, f[k]);
      }
      if (vmax > 0)
        for (double& v : f.values) v /= vmax;
    }
    mask(f);
    family.push_back(std::move(f));
  }
  return family;
}

}  // namespace capdp
