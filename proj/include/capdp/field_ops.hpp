#pragma once

#include <optional>
#include <vector>

#include "capdp/grid.hpp"
#include "capdp/integrand.hpp"

namespace capdp {

/// Ball region selector; cells belong to it iff their center does.
struct Ball {
  Vec3 center{0, 0, 0};
  double r = 0;
};

/// Per-cell quadrature breakdown of the double-phase energy.
struct EnergyBreakdown {
  double total = 0;
  double p_part = 0;
  double q_part = 0;
  std::vector<double> cellwise;  // h^n * phi density per cell, row-major cell order
};

Idx3 cell_shape(const DiscreteDomain& dom);
long cell_count(const DiscreteDomain& dom);
long cell_index(const DiscreteDomain& dom, const Idx3& c);
Vec3 cell_center(const DiscreteDomain& dom, const Idx3& c);
/// Cell lies inside the open set (every corner non-exterior).
bool cell_active(const DiscreteDomain& dom, const Idx3& c);
/// Mean of the coefficient over the cell corners, the cell-center sample.
double cell_coeff(const DoublePhaseIntegrand& itg, const Idx3& c);

/// Forward-difference gradient per cell from the low corner, h-scaled.
/// A face contributes only when both of its endpoints are non-exterior.
std::vector<Vec3> discrete_gradient(const ScalarField& u);

/// Midpoint-quadrature energy sum of h^n * phi(cell center, g_delta(|grad u|)).
/// delta = 0 gives the raw energy; region limits to cells with center in the ball.
/// Cellwise densities are filled in parallel, the reduction runs in fixed index
/// order so results are bit-identical for any thread count.
EnergyBreakdown energy(const ScalarField& u, const DoublePhaseIntegrand& itg,
                       const std::optional<Ball>& region = std::nullopt, double delta = 0);

/// Serial reference for the same quantity, kept for testing and benchmarks.
EnergyBreakdown energy_serial(const ScalarField& u, const DoublePhaseIntegrand& itg,
                              const std::optional<Ball>& region = std::nullopt, double delta = 0);

/// Nodewise gradient of the smoothed energy, for the solver.
/// Entries at constrained nodes are still assembled; callers mask them.
std::vector<double> energy_gradient(const ScalarField& u, const DoublePhaseIntegrand& itg,
                                    double delta);
std::vector<double> energy_gradient_serial(const ScalarField& u, const DoublePhaseIntegrand& itg,
                                           double delta);

/// Volume-normalized m-mean (integral average of |u|^m)^{1/m} over active cells.
/// signed_mean applies only to m = 1 and drops the absolute value.
double lp_mean(const ScalarField& u, const std::optional<Ball>& region, double m,
               bool signed_mean = false);

/// Restricted centered maximal operator with nodewise radius field R >= 0.
/// R(x) = 0 returns |f(x)|; otherwise the sup of ball averages of |f| over the
/// discrete radii j*h below R(x).
ScalarField restricted_maximal(const ScalarField& f, const ScalarField& radii);

/// Clamp values to [0, t].
ScalarField truncate(const ScalarField& u, double t);

/// Deterministic family of compactly supported test fields: distance wedges,
/// radial bumps at random interior centers, and nonnegative combinations.
std::vector<ScalarField> lipschitz_bump_family(const DomainPtr& dom, int count,
                                               std::uint64_t seed);

}  // namespace capdp
