#pragma once

#include <optional>
#include <string>
#include <vector>

#include "capdp/grid.hpp"

namespace capdp {

/// Double-phase integrand phi(x,t) = t^p + a(x) t^q with a Hoelder coefficient field.
/// Immutable after construction; freely shareable.
struct DoublePhaseIntegrand {
  double p = 2;
  double q = 2;
  double alpha = 1;
  DomainPtr dom;
  std::vector<double> a;       // node samples, a >= 0
  double holder_seminorm = 0;  // [a]_{0;alpha}, analytic for library generators else measured

  double coeff(long node) const { return a[static_cast<std::size_t>(node)]; }
};

struct PhaseTag {
  enum Tag { P_PHASE, PQ_PHASE } tag = P_PHASE;
  double a_minus = 0;       // inf of a over the ball
  double holder_scale = 0;  // [a]_{0;alpha} * r^alpha
};

struct GapReport {
  double ratio = 0;       // q/p
  double limit = 0;       // 1 + alpha/n
  bool pass_nonstrict = false;
  bool pass_strict = false;
  bool q_unrestricted = false;  // p >= n branch of the Sobolev dichotomy
  bool sobolev_ok = false;      // q <= np/(n-p) when p < n
};

double phi_const(double p, double q, double a0, double t);
double eval_phi(const DoublePhaseIntegrand& itg, long node, double t);

DoublePhaseIntegrand make_integrand(DomainPtr dom, double p, double q, double alpha,
                                    const std::string& coeff_spec);
DoublePhaseIntegrand make_constant_integrand(DomainPtr dom, double p, double q, double a0);

/// (min, max) of a over a node set.
std::pair<double, double> a_bounds(const DoublePhaseIntegrand& itg,
                                   const std::vector<long>& region);
/// (min, max) of a over the nodes of a ball.
std::pair<double, double> a_bounds_ball(const DoublePhaseIntegrand& itg, const Vec3& center,
                                        double r);

enum class SeminormMode { Exact, Subsampled };
double holder_seminorm_estimate(const DomainPtr& dom, const std::vector<double>& a, double alpha,
                                SeminormMode mode, std::uint64_t seed = 7);

GapReport validate_gap(const DoublePhaseIntegrand& itg, int n, bool strict);

/// Admissible exponent range for the Maz'ya inequality parameter m.
/// Empty optional when the gap condition fails.
std::optional<std::pair<double, double>> admissible_m_range(int n, double p, double q,
                                                            double alpha);

PhaseTag classify_phase(const DoublePhaseIntegrand& itg, const Vec3& center, double r);

}  // namespace capdp
