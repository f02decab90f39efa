#pragma once

#include <vector>

#include "erloss/dynamic.hpp"
#include "erloss/instance.hpp"

namespace erloss {

// One posted rate per class, applied in every non-full state.
struct static_policy {
  std::vector<double> rates;
};

struct static_solve_report {
  static_policy policy;
  double revenue = 0.0;
  double grad_norm = 0.0;  // projected gradient sup-norm at termination
  int starts_used = 0;
  double start_spread = 0.0;  // sup-norm disagreement across start points
  double lipschitz_bound = 0.0;
  bool boundary_active = false;  // some coordinate finished on a box face
};

// Occupancy-weighted average of a dynamic policy's rates, conditioned on the
// system not being full. Throws when the stationary full-state mass is 1.
static_policy constructed_static(const instance& inst, const state_space& S,
                                 const dynamic_policy& policy, const full_stationary& pi);

// Revenue rate of a static policy: total posted revenue times the service
// level of the induced Erlang loss system.
double static_revenue(const instance& inst, const static_policy& policy);

// Analytic gradient of static_revenue in the posted rates.
std::vector<double> static_revenue_gradient(const instance& inst, const static_policy& policy);

// Best static policy by projected gradient ascent over the rate box, with
// deterministic multistart. All starts must land on the same point (the
// objective has at most one stationary point); disagreement beyond 1e-4
// throws.
static_solve_report optimal_static(const instance& inst, double tol = 1e-9, int starts = 5);

// Solves max sum_j r_j(l_j) subject to sum_j l_j / mu_j <= delta over the
// rate box, by bisection on the capacity multiplier.
static_policy fluid_heuristic(const instance& inst, double delta);

struct fluid_sweep_result {
  static_policy best_policy;
  double best_revenue = 0.0;
  double delta_star = 0.0;
};

// Evaluates the capacity-relaxation heuristic on an inclusive grid of delta
// values over [0, 3C] and returns the best by static revenue.
fluid_sweep_result fluid_sweep(const instance& inst, int grid_points = 100);

}  // namespace erloss
