#pragma once

#include <functional>

#include "capdp/verify.hpp"

namespace capdp {

struct HigherIntReport {
  std::vector<double> sigma_grid;
  std::vector<double> h_levels;
  // energies[level][sigma index] = integral of phi^sigma(x, |grad u|)
  std::vector<std::vector<double>> energies;
  double sigma_star = 1;
  // Dirichlet-side quantities of the global estimate
  double a_P = 0;
  bool a_P_infinite = false;
  double rho = 0;
  long P_node_count = 0;
  double diam = 0;
  double theorem_rhs = 0;  // bracketed right-hand side up to the unknown constant
  bool sigma1_stable = false;  // 5% agreement of the plain energy at the two finest levels
};

std::vector<InequalityReport> interior_reverse_holder_check(const ScalarField& u,
                                                            const DoublePhaseIntegrand& itg,
                                                            const std::vector<Ball>& balls,
                                                            const std::vector<double>& theta_grid);

std::vector<InequalityReport> boundary_caccioppoli_check(const ScalarField& u,
                                                         const ScalarField& f,
                                                         const DoublePhaseIntegrand& itg,
                                                         const std::vector<Ball>& balls);

/// Dirichlet solves across grid levels with phi^sigma integrals of the
/// gradient; sigma_star is the largest grid exponent whose energy changes by
/// at most a factor 1.5 between the two finest levels.
HigherIntReport higher_integrability_report(
    const std::function<DomainPtr(int level)>& make_domain,
    const std::function<DoublePhaseIntegrand(const DomainPtr&)>& make_integrand,
    const std::function<double(const Vec3&)>& boundary_data, int levels,
    const std::vector<double>& sigma_grid, double r_a, double r_hat0, const SolveSpec& spec);

struct OptimalityRow {
  double h = 0;
  double max_grad = 0;        // max cell |grad u|
  double pointwise_bound = 0; // max over cells of |grad u|^p d^n / ||grad u||_p^p
  std::vector<double> higher_energies;  // integral of |grad u|^{p+delta} per delta
};

struct OptimalityReport {
  double p = 2;
  std::vector<double> deltas;
  std::vector<OptimalityRow> rows;
};

/// p-energy Dirichlet solve with data 1 on the puncture and 0 on the outer
/// boundary, repeated across refinements.
OptimalityReport optimality_demo(int n, double p,
                                 const std::function<DomainPtr(int level)>& make_domain,
                                 int levels, const std::vector<double>& deltas,
                                 const SolveSpec& spec);

}  // namespace capdp
