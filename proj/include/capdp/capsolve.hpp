#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "capdp/field_ops.hpp"
#include "capdp/grid.hpp"
#include "capdp/integrand.hpp"

namespace capdp {

struct Infeasible : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvalidCondenser : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SolveSpec {
  double tol = 1e-10;       // relative energy decrease threshold
  int max_iter = 50000;
  double delta_start = 1e-2;  // smoothing continuation, used when min(p,q) < 2
  double delta_end = 1e-6;
  double t_min = 9.5367431640625e-07;  // 2^-20
  double t_max = 1048576.0;            // 2^20
  double refine_tol = 1e-4;
};

struct CapacityResult {
  double value = 0;
  std::optional<double> level_t;
  ScalarField minimizer;
  int iterations = 0;
  double final_relative_decrease = 0;
  double delta_used = 0;
  bool not_converged = false;
  bool boundary_minimum = false;
  std::vector<std::pair<double, double>> t_curve;  // sampled (t, value), infimal solves only
};

/// Minimize the smoothed double-phase energy over the interior nodes with the
/// given node values held fixed. clamp_hi > 0 keeps iterates in [0, clamp_hi].
CapacityResult solve_constrained_min(const DomainPtr& dom, const DoublePhaseIntegrand& itg,
                                     const std::vector<std::pair<long, double>>& fixed,
                                     const SolveSpec& spec, double clamp_hi = 0);

/// inf of phi(x, t) over the open set, the capacity normalization.
double phi_lower(const DoublePhaseIntegrand& itg, double t);

/// Classical p-capacity of the obstacle set within the domain (a = 0, t = 1).
CapacityResult p_capacity(const DomainPtr& dom, double p, const SolveSpec& spec);

/// Level-t capacity: minimize the phi-energy over {u = t on the obstacle,
/// u = 0 on the collar, 0 <= u <= t}, divided by phi_lower(t).
CapacityResult level_t_capacity(const DomainPtr& dom, const DoublePhaseIntegrand& itg, double t,
                                const SolveSpec& spec);

/// inf over t of the level-t capacity; log grid scan then golden-section
/// refinement in log t. Flags boundary_minimum when the grid minimum sits at
/// an endpoint of the t range.
CapacityResult infimal_capacity(const DomainPtr& dom, const DoublePhaseIntegrand& itg,
                                const SolveSpec& spec);

/// Closed-form p-capacity of the spherical condenser (B(0,r), B(0,R)) in R^n.
double radial_condenser_oracle(int n, double p, double r, double R);

/// Minimize the phi-energy with the collar held at the given boundary data.
CapacityResult dirichlet_solve(const DomainPtr& dom, const DoublePhaseIntegrand& itg,
                               const ScalarField& boundary_data, const SolveSpec& spec);

/// Copy of the domain with interior nodes inside the ball marked as obstacle.
DiscreteDomain with_obstacle_ball(const DiscreteDomain& dom, const Vec3& center, double r);

}  // namespace capdp
