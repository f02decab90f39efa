#pragma once

#include <cstdint>
#include <variant>
#include <vector>

#include "erloss/dynamic.hpp"
#include "erloss/instance.hpp"
#include "erloss/state_space.hpp"
#include "erloss/static_policy.hpp"

namespace erloss {

enum class service_kind { exponential, deterministic, lognormal, hyperexponential };

const char* to_string(service_kind k);

// Service-time distribution of one class. Samplers consume exactly two
// uniforms per draw so that runs stay aligned when only the service shape
// changes.
struct service_spec {
  service_kind kind = service_kind::exponential;
  double mean = 1.0;
  double cv = 1.0;  // lognormal (cv > 0) and hyperexponential (cv >= 1) only

  static service_spec exponential(double mean);
  static service_spec deterministic(double mean);
  static service_spec lognormal(double mean, double cv);
  static service_spec hyperexponential(double mean, double cv);  // balanced 2-phase
  void validate() const;
};

double sample_service(const service_spec& spec, double u1, double u2);

struct sim_estimate {
  double revenue_rate = 0.0, revenue_ci = 0.0;
  // fraction of candidate arrivals seeing a full system (time-stationary
  // saturation probability, by PASTA)
  double blocking = 0.0, blocking_ci = 0.0;
  // fraction of willing buyers lost to a full system; for state-dependent
  // pricing nobody is willing at a full-state price, so this is zero
  double blocking_purchaser = 0.0, blocking_purchaser_ci = 0.0;
  std::vector<double> occupancy, occupancy_ci;  // time fractions per level
  int reps = 0;
  double horizon = 0.0;
  std::uint64_t seed = 0;
};

using any_policy = std::variant<dynamic_policy, static_policy>;

// Event-driven run of the loss system under a fixed policy. Candidates
// arrive per class at the policy's highest posted rate, draw a valuation
// conditioned on that price level, and are admitted when the valuation
// covers the currently posted price and a unit is free. The first 10% of
// each replication is discarded as warm-up. Confidence intervals are 95%
// t-intervals across replications.
sim_estimate simulate(const instance& inst, const state_space& S, const any_policy& policy,
                      const std::vector<service_spec>& service, double horizon, int reps,
                      std::uint64_t seed);

struct compare_report {
  std::vector<sim_estimate> per_policy;
  // per-replication revenue ratio of each policy against the last policy
  // (the reference), averaged across replications
  std::vector<double> ratio_to_reference;
  std::vector<double> ratio_ci;
};

// Runs every policy on common random numbers: shared candidate streams,
// valuations, and service draws, with the per-class candidate rate taken as
// the highest rate any compared policy ever posts.
compare_report compare_policies(const instance& inst, const state_space& S,
                                const std::vector<any_policy>& policies,
                                const std::vector<service_spec>& service, double horizon,
                                int reps, std::uint64_t seed);

}  // namespace erloss
