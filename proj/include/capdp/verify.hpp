#pragma once

#include <functional>
#include <string>
#include <vector>

#include "capdp/capsolve.hpp"

namespace capdp {

struct InequalityReport {
  std::string name;
  double lhs = 0;
  double rhs_raw = 0;
  double implied_constant = 0;  // lhs / rhs_raw when rhs_raw > 0
  Vec3 z{0, 0, 0};
  double r = 0;
  double t = 0;
  std::string test_id;
  bool pass = true;
  bool degenerate = false;
  std::string note;
};

enum class CapKind { P, Q, Infimal };

/// Geometry and coefficient data for fatness scans: E is the closed set whose
/// capacity density is probed, the coefficient extends phi off the base grid.
struct SetConfig {
  std::function<bool(const Vec3&)> in_E;
  std::function<double(const Vec3&)> coeff;
  double p = 2;
  double q = 2;
  double alpha = 1;
  int dim = 2;
};

struct FatnessEntry {
  Vec3 z{0, 0, 0};
  double r = 0;
  double ratio = 0;
  double cap_num = 0;
  double cap_den = 0;
  bool converged = true;
};

struct FatnessReport {
  CapKind kind = CapKind::P;
  std::vector<FatnessEntry> entries;
  double min_ratio = 0;  // over converged entries
  std::string note;      // sampling provenance
};

/// Obstacle-boundary nodes of a domain, farthest-point subsampled to the cap.
std::vector<Vec3> sample_obstacle_boundary(const DiscreteDomain& dom, int cap = 64);

/// Capacity-density ratios cap(E cap B(z,r/2); B(z,r)) / cap(B(z,r/2); B(z,r))
/// per center and radius, solved on local ball grids with the given nodes-per-
/// radius resolution.
FatnessReport fatness_scan(const SetConfig& cfg, CapKind kind, const std::vector<Vec3>& centers,
                           const std::vector<double>& radii, int resolution,
                           const SolveSpec& spec);

struct EquivalenceReport {
  FatnessReport p_scan;
  FatnessReport inf_scan;
  bool agree = false;  // both above or both below the threshold
  double threshold = 0;
};

EquivalenceReport equivalence_probe(const SetConfig& cfg, const std::vector<Vec3>& centers,
                                    const std::vector<double>& radii, int resolution,
                                    double threshold, const SolveSpec& spec);

/// Sandwich of the infimal capacity between the classical p-capacity bounds,
/// with the explicit convexity constant c(p,q) = 2^{1-q/p} in the lower bound.
std::pair<InequalityReport, InequalityReport> capacity_bounds_check(
    const DomainPtr& dom, const DoublePhaseIntegrand& itg, const SolveSpec& spec,
    double tol = 0.02);

InequalityReport mazya_check(const ScalarField& u, const Vec3& z, double r,
                             const DoublePhaseIntegrand& itg, double m, const Vec3& y,
                             double R_ball, int resolution, const SolveSpec& spec);

struct CounterexampleRow {
  double r = 0;
  double mean_phi_u = 0;       // ball average of phi_o(u_r)
  double grad_energy = 0;      // integral of phi_o(|grad u_r|)
  double grad_energy_exact = 0;
  double Q = 0;                // mean_phi_u / grad_energy
  double Q_scaled_p = 0;       // Q * r^{n-p}
  double Q_scaled_q = 0;       // Q * r^{n-q}
  double I1d = 0;              // 1D radial integral of (t-r/2)^p t^{n-1}
  bool sandwich_ok = false;
};

struct CounterexampleReport {
  int n = 2;
  double p = 2, q = 3, a_o = 1;
  std::vector<CounterexampleRow> rows;
  bool all_sandwich_ok = false;
};

CounterexampleReport counterexample_report(int n, double p, double q, double a_o,
                                           const std::vector<double>& radii, int resolution);

std::vector<InequalityReport> hardy_integral_check(const DomainPtr& dom,
                                                   const DoublePhaseIntegrand& itg,
                                                   const std::vector<ScalarField>& family);

std::vector<InequalityReport> boundary_poincare_check(const DomainPtr& dom,
                                                      const DoublePhaseIntegrand& itg,
                                                      const std::vector<ScalarField>& family,
                                                      const std::vector<Vec3>& centers,
                                                      const std::vector<double>& radii,
                                                      const Vec3& y, double R_ball);

std::vector<InequalityReport> pointwise_hardy_check(const DomainPtr& dom,
                                                    const DoublePhaseIntegrand& itg,
                                                    const std::vector<ScalarField>& family,
                                                    const std::vector<long>& sample_nodes,
                                                    const Vec3& y, double R_ball);

struct SelfImprovementReport {
  std::vector<double> epsilons;
  std::vector<double> min_ratios;  // matched to epsilons; rejected entries are NaN
  std::vector<std::string> notes;
  double base_ratio = 0;  // epsilon = 0 scan
};

SelfImprovementReport self_improvement_scan(const SetConfig& cfg, CapKind kind,
                                            const std::vector<double>& epsilons,
                                            const std::vector<Vec3>& centers,
                                            const std::vector<double>& radii, int resolution,
                                            const SolveSpec& spec);

/// Pointwise factor-(1/2, 2) sandwich between phi^{1-delta} and the auxiliary
/// integrand with exponents p(1-delta), q(1-delta) and coefficient a^{1-delta}.
bool auxiliary_sandwich_ok(double p, double q, double delta, double t, double a);

/// Family of wedge fields equal 1 away from the given point and vanishing on a
/// shrinking neighborhood of it (and outside the domain interior).
std::vector<ScalarField> concentration_family(const DomainPtr& dom, const Vec3& point,
                                              const std::vector<double>& sigmas);

}  // namespace capdp
