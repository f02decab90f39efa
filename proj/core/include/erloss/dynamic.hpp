#pragma once

#include <cstddef>
#include <vector>

#include "erloss/instance.hpp"
#include "erloss/loss.hpp"
#include "erloss/state_space.hpp"

namespace erloss {

// State-dependent pricing policy, stored as effective arrival rates:
// rates[s * M + j] is the class-j rate posted in state s. Full states carry
// zero rates.
struct dynamic_policy {
  std::vector<double> rates;
  int num_classes = 0;

  double rate(std::size_t s, int j) const { return rates[s * num_classes + j]; }
};

struct solve_options {
  double tol = 1e-9;        // span stopping threshold for the value sweep
  int max_iterations = 1000;
  std::size_t dense_evaluation_limit = 2000;  // above this, fall back to value sweeps
};

struct solve_report {
  dynamic_policy policy;
  double gain = 0.0;           // optimal long-run revenue rate
  double uniformization = 0.0;
  double span_residual = 0.0;
  int iterations = 0;          // value sweeps performed
  bool converged = false;
  std::vector<double> bias;    // relative values, bias[0] = 0
};

// Long-run average revenue maximisation over state-dependent rates.
// Value sweeps use the uniformised chain (U = sum_j Lambda_j + C mu_j) with
// per-class closed-form maximisation of l*(p_j(l) + dv); between sweeps the
// greedy policy is evaluated exactly (linear solve) to precondition the
// values, which keeps stiff instances (widely separated service rates)
// convergent in a handful of sweeps. Stopping: span(Tv - v) <= tol; the
// reported gain is the span midpoint times U.
solve_report solve_dynamic(const instance& inst, const state_space& S,
                           const solve_options& opt = {});

// Stationary distribution over states for a fixed policy. Direct linear solve
// up to 5000 states, power iteration beyond. States unreachable from the
// empty state under the policy get probability zero.
struct full_stationary {
  std::vector<double> probs;
  double balance_residual = 0.0;  // max |inflow - outflow| across states
  bool restricted = false;        // true when unreachable states were dropped

  occupancy_distribution occupancy(const state_space& S) const;
};

full_stationary stationary_of_policy(const instance& inst, const state_space& S,
                                     const dynamic_policy& policy);

double revenue_of_policy(const instance& inst, const state_space& S,
                         const dynamic_policy& policy, const full_stationary& pi);

// First-order optimality residual for single-class instances with an
// interior policy (all rates strictly inside (0, peak)). boundary is set when
// some rate sits at either end, in which case the residual is not meaningful.
struct kkt_report {
  double residual = 0.0;
  bool boundary = false;
  std::vector<double> omegas;  // occupancy-indexed rate-to-service ratios
  std::vector<double> gammas;  // -p'(rate) per occupancy level
};

kkt_report kkt_residual_1class(const instance& inst, const state_space& S,
                               const dynamic_policy& policy);

}  // namespace erloss
