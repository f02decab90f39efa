#pragma once

// Shared helpers for the test binaries: deterministic random-instance
// generation and the occupancy-aggregation identities used by both the
// property suite and the acceptance gate.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "erloss/demand.hpp"
#include "erloss/dynamic.hpp"
#include "erloss/instance.hpp"
#include "erloss/loss.hpp"
#include "erloss/rng.hpp"
#include "erloss/state_space.hpp"
#include "erloss/static_policy.hpp"

namespace testsupport {

using namespace erloss;

// Deterministic instance with monotone-hazard-rate demand (linear or
// exponential, chosen by the stream), capacity drawn from [c_lo, c_hi] and
// moderate parameter ranges so the solvers stay fast.
inline instance random_mhr_instance(std::uint64_t seed, int M, int c_lo, int c_hi) {
  rng_stream rng(seed);
  instance inst;
  const int span = c_hi - c_lo + 1;
  inst.C = c_lo + std::min(span - 1, static_cast<int>(rng.uniform() * span));
  for (int j = 0; j < M; ++j) {
    const double a = 0.2 + 4.8 * rng.uniform();
    const double b = 0.5 + 9.5 * rng.uniform();
    const double mu = 0.05 + 9.95 * rng.uniform();
    demand_curve d = rng.uniform() < 0.5 ? demand_curve::linear(a, b)
                                         : demand_curve::exponential(a, b);
    inst.classes.push_back({d.max_rate(), mu, d});
  }
  return inst;
}

// A static policy viewed as a state-dependent one: the same rates in every
// non-full state, zero when full.
inline dynamic_policy as_dynamic(const state_space& S, const static_policy& pol) {
  const int M = S.classes();
  dynamic_policy dp;
  dp.num_classes = M;
  dp.rates.assign(S.size() * static_cast<std::size_t>(M), 0.0);
  for (std::size_t s = 0; s < S.size(); ++s)
    if (S.occupancy(s) < S.capacity())
      for (int j = 0; j < M; ++j) dp.rates[s * M + j] = pol.rates[j];
  return dp;
}

struct reduction_gaps {
  double dynamic_occupancy = 0.0;  // aggregated chain vs multi-class occupancy
  double static_occupancy = 0.0;   // product-space static chain vs Erlang form
  double flow_balance = 0.0;       // mean occupancy vs load * availability
};

// Occupancy-aggregation identities for a solved multi-class instance.
//
// 1. Collapse the solved policy to a single-occupancy-coordinate birth-death
//    chain: birth rate out of level k is the stationary-conditional expected
//    total posted rate there, death rate is the conditional expected total
//    service rate. Its stationary law must reproduce the aggregated
//    multi-class occupancy exactly.
// 2. The averaged static policy induces a plain Erlang loss system with load
//    equal to the sum of per-class loads; the product-space chain under that
//    policy must aggregate to the same Erlang occupancy.
// 3. Flow balance of the optimal chain: mean occupancy equals the averaged
//    static load times the availability.
inline reduction_gaps reduction_identities(const instance& inst, const state_space& S,
                                           const dynamic_policy& policy) {
  const int C = inst.C, M = inst.num_classes();
  const full_stationary pi = stationary_of_policy(inst, S, policy);
  const occupancy_distribution agg = pi.occupancy(S);

  std::vector<double> mass(C + 1, 0.0), rate_num(C + 1, 0.0), srv_num(C + 1, 0.0);
  for (std::size_t s = 0; s < S.size(); ++s) {
    const int k = S.occupancy(s);
    const double p = pi.probs[s];
    mass[k] += p;
    double tot_rate = 0.0, tot_srv = 0.0;
    const auto x = S.state(s);
    for (int j = 0; j < M; ++j) {
      tot_rate += policy.rate(s, j);
      tot_srv += x[j] * inst.classes[j].mu;
    }
    rate_num[k] += p * tot_rate;
    srv_num[k] += p * tot_srv;
  }

  std::vector<double> births(C), deaths(C);
  for (int k = 0; k < C; ++k) {
    if (mass[k] <= 0.0) throw std::runtime_error("reduction_identities: empty level");
    births[k] = rate_num[k] / mass[k];
  }
  for (int k = 1; k <= C; ++k) {
    if (mass[k] <= 0.0) throw std::runtime_error("reduction_identities: empty level");
    deaths[k - 1] = srv_num[k] / mass[k];  // total service rate out of level k
  }

  reduction_gaps gaps;
  const occupancy_distribution collapsed =
      birth_death_stationary_general(births, deaths, C);
  for (int i = 0; i <= C; ++i)
    gaps.dynamic_occupancy =
        std::max(gaps.dynamic_occupancy, std::abs(collapsed.probs[i] - agg.probs[i]));

  const static_policy tilde = constructed_static(inst, S, policy, pi);
  std::vector<double> loads(M);
  double total_load = 0.0;
  for (int j = 0; j < M; ++j) {
    loads[j] = tilde.rates[j] / inst.classes[j].mu;
    total_load += loads[j];
  }

  const full_stationary pi_static = stationary_of_policy(inst, S, as_dynamic(S, tilde));
  const occupancy_distribution agg_static = pi_static.occupancy(S);
  const occupancy_distribution erlang = multiclass_static_occupancy(C, loads);
  for (int i = 0; i <= C; ++i)
    gaps.static_occupancy = std::max(
        gaps.static_occupancy, std::abs(agg_static.probs[i] - erlang.probs[i]));

  double mean_occ = 0.0, availability = 0.0;
  for (int i = 0; i <= C; ++i) {
    mean_occ += i * agg.probs[i];
    if (i < C) availability += agg.probs[i];
  }
  gaps.flow_balance = std::abs(mean_occ - total_load * availability);
  return gaps;
}

}  // namespace testsupport
