#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "erloss/certify.hpp"
#include "erloss/dynamic.hpp"
#include "erloss/experiments.hpp"
#include "erloss/loss.hpp"
#include "erloss/rng.hpp"
#include "erloss/sim.hpp"
#include "erloss/state_space.hpp"
#include "erloss/static_policy.hpp"
#include "support.hpp"

using namespace erloss;
using testsupport::random_mhr_instance;

namespace {
bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }
}  // namespace

TEST_CASE("availability-normalised ratio: monotone in the conditional mean") {
  for (int C : {3, 7}) {
    for (double alpha : {0.05, 0.2, 0.5, 0.8, 0.95, 1.0}) {
      double prev = 1e300;
      for (int k = 0; k <= 60; ++k) {
        const double beta = (C - 1) * k / 60.0;
        const double v = ratio_R(C, alpha, beta);
        CHECK_MESSAGE(v <= prev + 1e-12, "C=", C, " alpha=", alpha, " beta=", beta);
        // full availability is the floor over the alpha direction
        CHECK_MESSAGE(v >= ratio_R(C, 1.0, beta) - 1e-12, "C=", C, " alpha=", alpha,
                      " beta=", beta);
        prev = v;
      }
    }
    // vanishing availability: ratio approaches one at both ends of the beta range
    CHECK(close(ratio_R(C, 1e-6, 0.0), 1.0, 5e-5));
    CHECK(close(ratio_R(C, 1e-6, C - 1.0), 1.0, 5e-5));
  }
}

TEST_CASE("heavy-load kernel is non-decreasing in the offered load") {
  for (int C : {3, 10, 47}) {
    double prev = -1.0;
    for (int k = 0; k < 1000; ++k) {
      const double w = 2.0 * C * C * k / 999.0;
      const double v = (w + 1.0) / C * erlang_service_level(C, w);
      CHECK_MESSAGE(v >= prev - 1e-12, "C=", C, " w=", w);
      prev = v;
    }
  }
}

TEST_CASE("availability falls and conditional mean rises along each rate coordinate") {
  rng_stream rng(1234);
  for (int C : {3, 5}) {
    for (int sweep = 0; sweep < 8; ++sweep) {
      // a conforming non-increasing rate vector, swept upward in one coordinate
      std::vector<double> w(C);
      w[0] = 1.0 + 8.0 * rng.uniform();
      for (int i = 1; i < C; ++i) w[i] = w[i - 1] * (0.55 + 0.45 * rng.uniform());
      const int coord = static_cast<int>(rng.uniform() * C) % C;

      double prev_alpha = 2.0, prev_beta = -1.0;
      for (int step = 0; step < 20; ++step) {
        std::vector<double> probe = w;
        const double hi = coord == 0 ? w[0] * 3.0 : w[coord - 1];
        probe[coord] = w[coord] + (hi - w[coord]) * step / 19.0;
        const occupancy_distribution d = birth_death_stationary(probe, 1.0, C);
        const double alpha = d.alpha(), beta = d.beta();
        CHECK_MESSAGE(alpha <= prev_alpha + 1e-12, "C=", C, " coord=", coord);
        CHECK_MESSAGE(beta >= prev_beta - 1e-12, "C=", C, " coord=", coord);
        prev_alpha = alpha;
        prev_beta = beta;
      }
    }
  }
}

TEST_CASE("certificates are sound: no feasible point beats the bound") {
  rng_stream rng(0xC0FFEE);
  for (int C : {3, 5, 19}) {
    const certificate cert = certify_box(C, 100);
    const double lo0 = C - 2.7, hi = (C + 3.0) * C, lom = 2.0 * (C - 2.7) / C;
    int accepted = 0;
    while (accepted < 10000) {
      const double w0 = lo0 + (hi - lo0) * rng.uniform();
      const double wm3 = C == 3 ? w0 : lom + (hi - lom) * rng.uniform();
      const double wm2 = lom + (hi - lom) * rng.uniform();
      if (!point_feasible(C, w0, wm3, wm2)) continue;
      ++accepted;
      const double v = ratio_at_point(C, w0, wm3, wm2);
      CHECK_MESSAGE(cert.lower_bound <= v + 1e-12, "C=", C, " at (", w0, ",", wm3, ",",
                    wm2, ")");
    }
  }
}

TEST_CASE("grid refinement never weakens a certificate") {
  for (int C : {3, 19}) {
    const double coarse = certify_box(C, 50).lower_bound;
    const double fine = certify_box(C, 200).lower_bound;
    CHECK_MESSAGE(fine >= coarse - 1e-12, "C=", C);
  }
}

TEST_CASE("solved single-class systems: monotone rates, optimality residuals, floors") {
  int interior_seen = 0;
  for (int t = 0; t < 50; ++t) {
    const instance inst = random_mhr_instance(mix_seed(9000, t, 0), 1, 2, 6);
    const state_space S(inst.C, 1);
    solve_options opt;
    opt.tol = 1e-10;
    const solve_report rep = solve_dynamic(inst, S, opt);
    CHECK_MESSAGE(rep.converged, "t=", t);

    const kkt_report kkt = kkt_residual_1class(inst, S, rep.policy);
    for (std::size_t i = 0; i + 1 < kkt.omegas.size(); ++i)
      CHECK_MESSAGE(kkt.omegas[i] >= kkt.omegas[i + 1] - 1e-6, "t=", t, " level=", i);
    if (!kkt.boundary) {
      ++interior_seen;
      CHECK_MESSAGE(kkt.residual <= 1e-4, "t=", t, " residual=", kkt.residual);
    }

    const full_stationary pi = stationary_of_policy(inst, S, rep.policy);
    const static_policy tilde = constructed_static(inst, S, rep.policy, pi);
    const double r_tilde = static_revenue(inst, tilde);
    CHECK_MESSAGE(r_tilde / rep.gain >= guarantee_G(inst.C) - 1e-6, "t=", t);

    // service-level comparison that drives the floor
    const occupancy_distribution occ = pi.occupancy(S);
    const double sl_dyn = occ.alpha();
    const double sl_tilde =
        erlang_service_level(inst.C, tilde.rates[0] / inst.classes[0].mu);
    CHECK_MESSAGE(r_tilde / rep.gain >= sl_tilde / sl_dyn - 1e-8, "t=", t);
  }
  CHECK(interior_seen >= 10);  // the residual check must actually exercise
}

TEST_CASE("gain dominates every static policy") {
  rng_stream rng(31337);
  for (int t = 0; t < 4; ++t) {
    const instance inst = random_mhr_instance(mix_seed(9100, t, 0), 2, 2, 4);
    const state_space S(inst.C, 2);
    const solve_report rep = solve_dynamic(inst, S);
    for (int k = 0; k < 20; ++k) {
      static_policy pol{{inst.classes[0].demand.max_rate() * rng.uniform(),
                         inst.classes[1].demand.max_rate() * rng.uniform()}};
      CHECK_MESSAGE(static_revenue(inst, pol) <=
                        rep.gain + 1e-8 * std::max(1.0, rep.gain),
                    "t=", t, " k=", k);
    }
  }
}

TEST_CASE("occupancy aggregation identities on two-class systems") {
  for (int t = 0; t < 20; ++t) {
    const instance inst = random_mhr_instance(mix_seed(9200, t, 0), 2, 2, 4);
    const state_space S(inst.C, 2);
    const solve_report rep = solve_dynamic(inst, S);
    const testsupport::reduction_gaps gaps =
        testsupport::reduction_identities(inst, S, rep.policy);
    CHECK_MESSAGE(gaps.dynamic_occupancy <= 1e-8, "t=", t, " gap=", gaps.dynamic_occupancy);
    CHECK_MESSAGE(gaps.static_occupancy <= 1e-8, "t=", t, " gap=", gaps.static_occupancy);
    CHECK_MESSAGE(gaps.flow_balance <= 1e-8, "t=", t, " gap=", gaps.flow_balance);
  }
}

TEST_CASE("multistart ascent lands on a single point") {
  for (int t = 0; t < 50; ++t) {
    const int M = 1 + t % 5;
    const instance inst = random_mhr_instance(mix_seed(9300, t, 0), M, 2, 5);
    const static_solve_report opt = optimal_static(inst);
    CHECK_MESSAGE(opt.start_spread <= 1e-6, "t=", t, " spread=", opt.start_spread);
    CHECK_MESSAGE(opt.revenue > 0.0, "t=", t);
  }
}

TEST_CASE("simulated occupancy matches the product form under static pricing") {
  for (int t = 0; t < 10; ++t) {
    const instance base = random_mhr_instance(mix_seed(9400, t, 0), 2, 2, 3);
    instance inst = base;
    for (auto& cl : inst.classes) cl.mu = 1.0 + 3.0 * (cl.mu / 10.0);  // keep services fast
    const state_space S(inst.C, 2);
    static_policy pol{{inst.classes[0].demand.max_rate() * 0.6,
                       inst.classes[1].demand.max_rate() * 0.5}};
    std::vector<service_spec> service;
    double mu_min = 1e300;
    std::vector<double> loads;
    for (const auto& cl : inst.classes) {
      service.push_back(service_spec::exponential(1.0 / cl.mu));
      mu_min = std::min(mu_min, cl.mu);
    }
    for (int j = 0; j < 2; ++j) loads.push_back(pol.rates[j] / inst.classes[j].mu);

    const double horizon = 1e5 / mu_min / 10.0;  // long runs, kept tractable
    const sim_estimate est = simulate(inst, S, pol, service, horizon, 20, mix_seed(1, t, 2));
    const occupancy_distribution want = multiclass_static_occupancy(inst.C, loads);
    for (int i = 0; i <= inst.C; ++i)
      CHECK_MESSAGE(close(est.occupancy[i], want.probs[i],
                          3.0 * est.occupancy_ci[i] + 2e-3),
                    "t=", t, " level=", i);
  }
}

TEST_CASE("blocking is insensitive to the service-time shape") {
  for (int t = 0; t < 5; ++t) {
    const instance inst = random_mhr_instance(mix_seed(9500, t, 0), 1, 2, 3);
    const state_space S(inst.C, 1);
    const static_policy pol{{inst.classes[0].demand.max_rate() * 0.7}};
    const double mean = 1.0 / inst.classes[0].mu;
    const std::uint64_t seed = mix_seed(2, t, 7);
    const double horizon = 4e3 * mean;
    const sim_estimate expo =
        simulate(inst, S, pol, {service_spec::exponential(mean)}, horizon, 16, seed);
    const sim_estimate logn =
        simulate(inst, S, pol, {service_spec::lognormal(mean, 2.0)}, horizon, 16, seed);
    const double paired_ci =
        std::sqrt(expo.blocking_ci * expo.blocking_ci + logn.blocking_ci * logn.blocking_ci);
    CHECK_MESSAGE(close(expo.blocking, logn.blocking, 3.0 * paired_ci + 1e-4), "t=", t,
                  " expo=", expo.blocking, " logn=", logn.blocking);
    // and both sit on the loss-formula value
    const double want =
        1.0 - erlang_service_level(inst.C, pol.rates[0] / inst.classes[0].mu);
    CHECK_MESSAGE(close(expo.blocking, want, 3.0 * expo.blocking_ci + 1e-4), "t=", t);
    CHECK_MESSAGE(close(logn.blocking, want, 3.0 * logn.blocking_ci + 1e-4), "t=", t);
  }
}

TEST_CASE("confidence intervals shrink like the square root of the horizon") {
  instance inst;
  inst.C = 3;
  inst.classes.push_back({3.0, 1.0, demand_curve::linear(1.0, 3.0)});
  const state_space S(3, 1);
  const static_policy pol{{2.0}};
  const std::vector<service_spec> service{service_spec::exponential(1.0)};
  const sim_estimate short_run = simulate(inst, S, pol, service, 3000.0, 24, 5150);
  const sim_estimate long_run = simulate(inst, S, pol, service, 12000.0, 24, 5151);
  const double shrink = short_run.revenue_ci / long_run.revenue_ci;
  // quadrupling the horizon should roughly halve the interval
  CHECK_MESSAGE(shrink >= 1.2, "shrink=", shrink);
  CHECK_MESSAGE(shrink <= 3.4, "shrink=", shrink);
}

TEST_CASE("paired comparison reproduces the deterministic ratio on the workhorse") {
  const instance inst = example1_instance();
  const state_space S(inst.C, 2);
  const solve_report rep = solve_dynamic(inst, S);
  const full_stationary pi = stationary_of_policy(inst, S, rep.policy);
  const static_policy tilde = constructed_static(inst, S, rep.policy, pi);
  std::vector<service_spec> service;
  for (const auto& cl : inst.classes) service.push_back(service_spec::exponential(1.0 / cl.mu));
  const compare_report cmp = compare_policies(
      inst, S, {any_policy{tilde}, any_policy{rep.policy}}, service, 3e4, 16, 777);
  const double want = static_revenue(inst, tilde) / rep.gain;
  CHECK_MESSAGE(close(cmp.ratio_to_reference[0], want, 3.0 * cmp.ratio_ci[0]),
                "sim=", cmp.ratio_to_reference[0], " want=", want,
                " ci=", cmp.ratio_ci[0]);
  CHECK(cmp.ratio_to_reference[1] == 1.0);  // the reference against itself
}
