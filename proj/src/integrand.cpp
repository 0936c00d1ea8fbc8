#include "capdp/integrand.hpp"

#include <cmath>
#include <sstream>

#include "capdp/rng.hpp"

namespace capdp {

double phi_const(double p, double q, double a0, double t) {
  if (t < 0) throw std::domain_error("phi requires t >= 0");
  if (t == 0) return 0;
  return std::pow(t, p) + a0 * std::pow(t, q);
}

double eval_phi(const DoublePhaseIntegrand& itg, long node, double t) {
  return phi_const(itg.p, itg.q, itg.coeff(node), t);
}

namespace {

double vec_norm(const Vec3& x, int dim) {
  double s = 0;
  for (int d = 0; d < dim; ++d) s += x[d] * x[d];
  return std::sqrt(s);
}

}  // namespace

DoublePhaseIntegrand make_constant_integrand(DomainPtr dom, double p, double q, double a0) {
  DoublePhaseIntegrand itg;
  itg.p = p;
  itg.q = q;
  itg.alpha = 1;
  itg.dom = std::move(dom);
  itg.a.assign(static_cast<std::size_t>(itg.dom->node_count()), a0);
  itg.holder_seminorm = 0;
  return itg;
}

DoublePhaseIntegrand make_integrand(DomainPtr dom, double p, double q, double alpha,
                                    const std::string& coeff_spec) {
  DoublePhaseIntegrand itg;
  itg.p = p;
  itg.q = q;
  itg.alpha = alpha;
  itg.dom = dom;

  auto colon = coeff_spec.find(':');
  std::string kind = coeff_spec.substr(0, colon);
  std::string args = colon == std::string::npos ? "" : coeff_spec.substr(colon + 1);

  if (kind == "const") {
    double c = args.empty() ? 0.0 : std::stod(args);
    if (c < 0) throw InvalidShape("coefficient must be nonnegative");
    return make_constant_integrand(dom, p, q, c);
  }
  if (kind == "linear") {
    Vec3 v{0, 0, 0};
    std::istringstream ss(args);
    std::string tok;
    for (int d = 0; d < 3 && std::getline(ss, tok, ','); ++d) v[d] = std::stod(tok);
    itg.a.resize(static_cast<std::size_t>(dom->node_count()));
    for (long k = 0; k < dom->node_count(); ++k) {
      Vec3 x = dom->position(k);
      double s = 0;
      for (int d = 0; d < dom->dim; ++d) s += v[d] * x[d];
      itg.a[static_cast<std::size_t>(k)] = std::max(0.0, s);
    }
    if (alpha == 1.0) {
      itg.holder_seminorm = vec_norm(v, dom->dim);
    } else {
      itg.holder_seminorm =
          holder_seminorm_estimate(dom, itg.a, alpha, SeminormMode::Subsampled);
    }
    return itg;
  }
  if (kind == "dist_pow") {
    double beta = std::stod(args);
    ScalarField d = distance_to_boundary(dom);
    itg.a.resize(static_cast<std::size_t>(dom->node_count()));
    for (long k = 0; k < dom->node_count(); ++k)
      itg.a[static_cast<std::size_t>(k)] = std::pow(d[k], beta);
    itg.holder_seminorm =
        holder_seminorm_estimate(dom, itg.a, alpha, SeminormMode::Subsampled);
    return itg;
  }
  throw InvalidShape("unknown coefficient generator '" + kind + "'");
}

std::pair<double, double> a_bounds(const DoublePhaseIntegrand& itg,
                                   const std::vector<long>& region) {
  if (region.empty()) throw EmptyRegion("a_bounds over empty region");
  double lo = itg.coeff(region[0]), hi = lo;
  for (long k : region) {
    double v = itg.coeff(k);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return {lo, hi};
}

std::pair<double, double> a_bounds_ball(const DoublePhaseIntegrand& itg, const Vec3& center,
                                        double r) {
  const DiscreteDomain& dom = *itg.dom;
  bool any = false;
  double lo = 0, hi = 0;
  for (long k = 0; k < dom.node_count(); ++k) {
    Vec3 x = dom.position(k);
    double rho = 0;
    for (int d = 0; d < dom.dim; ++d) rho += (x[d] - center[d]) * (x[d] - center[d]);
    if (std::sqrt(rho) > r) continue;
    double v = itg.coeff(k);
    if (!any) {
      lo = hi = v;
      any = true;
    } else {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!any) throw EmptyRegion("ball does not contain any domain node");
  return {lo, hi};
}

double holder_seminorm_estimate(const DomainPtr& dom, const std::vector<double>& a, double alpha,
                                SeminormMode mode, std::uint64_t seed) {
  long n = dom->node_count();
  if (n < 2) throw EmptyRegion("need at least two nodes");
  auto quot = [&](long i, long j) -> double {
    if (i == j) return 0;
    Vec3 x = dom->position(i), y = dom->position(j);
    double d = 0;
    for (int k = 0; k < dom->dim; ++k) d += (x[k] - y[k]) * (x[k] - y[k]);
    d = std::sqrt(d);
    return std::abs(a[static_cast<std::size_t>(i)] - a[static_cast<std::size_t>(j)]) /
           std::pow(d, alpha);
  };
  double best = 0;
  if (mode == SeminormMode::Exact) {
    for (long i = 0; i < n; ++i)
      for (long j = i + 1; j < n; ++j) best = std::max(best, quot(i, j));
    return best;
  }
  // All axis-neighbor pairs plus random pairs; a lower bound on the true seminorm.
  for (long i = 0; i < n; ++i) {
    Idx3 idx = dom->unindex(i);
    for (int d = 0; d < dom->dim; ++d) {
      Idx3 j = idx;
      j[d] += 1;
      if (dom->in_range(j)) best = std::max(best, quot(i, dom->index(j)));
    }
  }
  Rng rng(seed);
  for (int t = 0; t < 10000; ++t) {
    long i = static_cast<long>(rng.below(static_cast<std::uint64_t>(n)));
    long j = static_cast<long>(rng.below(static_cast<std::uint64_t>(n)));
    if (i != j) best = std::max(best, quot(i, j));
  }
  return best;
}

GapReport validate_gap(const DoublePhaseIntegrand& itg, int n, bool strict) {
  (void)strict;
  GapReport rep;
  rep.ratio = itg.q / itg.p;
  rep.limit = 1.0 + itg.alpha / n;
  rep.pass_nonstrict = rep.ratio <= rep.limit + 1e-15;
  rep.pass_strict = rep.ratio < rep.limit - 1e-15;
  if (itg.p >= n) {
    rep.q_unrestricted = true;
    rep.sobolev_ok = true;
  } else {
    rep.sobolev_ok = itg.q <= n * itg.p / (n - itg.p) + 1e-12;
  }
  return rep;
}

std::optional<std::pair<double, double>> admissible_m_range(int n, double p, double q,
                                                            double alpha) {
  if (q / p > 1.0 + alpha / n + 1e-15) return std::nullopt;
  if (p > n) return std::make_pair(static_cast<double>(n), p);
  double lo = std::max(1.0, (p * n * n + p * n) / (n * n + p * n + p));
  return std::make_pair(lo, p);
}

PhaseTag classify_phase(const DoublePhaseIntegrand& itg, const Vec3& center, double r) {
  auto [lo, hi] = a_bounds_ball(itg, center, r);
  (void)hi;
  PhaseTag tag;
  tag.a_minus = lo;
  tag.holder_scale = itg.holder_seminorm * std::pow(r, itg.alpha);
  tag.tag = lo <= tag.holder_scale ? PhaseTag::P_PHASE : PhaseTag::PQ_PHASE;
  return tag;
}

}  // namespace capdp
