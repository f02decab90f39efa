#include <array>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "erloss/dynamic.hpp"
#include "erloss/experiments.hpp"
#include "erloss/loss.hpp"
#include "erloss/rng.hpp"
#include "erloss/state_space.hpp"
#include "erloss/static_policy.hpp"
#include "support.hpp"

using namespace erloss;

namespace {
bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }
}  // namespace

TEST_CASE("single-unit system solves to its closed form") {
  instance inst;
  inst.C = 1;
  inst.classes.push_back({1.0, 1.0, demand_curve::linear(1.0, 1.0)});
  const state_space S(1, 1);
  const solve_report rep = solve_dynamic(inst, S);
  CHECK(rep.converged);
  CHECK(rep.gain == doctest::Approx(3.0 - 2.0 * std::sqrt(2.0)).epsilon(1e-8));
  CHECK(close(rep.policy.rate(0, 0), std::sqrt(2.0) - 1.0, 1e-6));
  CHECK(rep.policy.rate(1, 0) == 0.0);  // full state posts nothing
}

TEST_CASE("two-class workhorse instance reproduces its frozen solution") {
  const instance inst = example1_instance();
  const state_space S(inst.C, inst.num_classes());
  const solve_report rep = solve_dynamic(inst, S);
  CHECK(rep.converged);
  CHECK(rep.gain == doctest::Approx(0.964555320821).epsilon(1e-8));
  CHECK(close(rep.policy.rate(S.index(std::array<int, 2>{0, 0}), 0), 2.68161955976, 1e-6));
  // with two slow units held, the slow class is priced out entirely
  CHECK(close(rep.policy.rate(S.index(std::array<int, 2>{2, 0}), 0), 0.0, 1e-9));

  const full_stationary pi = stationary_of_policy(inst, S, rep.policy);
  CHECK(pi.balance_residual <= 1e-10);
  double total = 0.0;
  for (double p : pi.probs) total += p;
  CHECK(close(total, 1.0, 1e-10));

  const static_policy tilde = constructed_static(inst, S, rep.policy, pi);
  CHECK(close(tilde.rates[0], 0.00199916535952, 1e-8));
  CHECK(close(tilde.rates[1], 0.109993957041, 1e-8));
  CHECK(close(static_revenue(inst, tilde) / rep.gain, 0.789822951177, 1e-8));

  const static_solve_report opt = optimal_static(inst);
  CHECK(opt.starts_used == 5);
  CHECK(opt.start_spread <= 1e-6);
  CHECK(close(opt.revenue / rep.gain, 0.789894620405, 1e-8));

  const static_policy at_c = fluid_heuristic(inst, 3.0);
  CHECK(close(static_revenue(inst, at_c) / rep.gain, 0.7761510301600025, 1e-8));
}

TEST_CASE("revenue of a fixed policy matches the static closed form") {
  const instance inst = example1_instance();
  const state_space S(inst.C, inst.num_classes());
  static_policy pol{{0.002, 0.11}};
  const dynamic_policy as_dyn = testsupport::as_dynamic(S, pol);
  const full_stationary pi = stationary_of_policy(inst, S, as_dyn);
  const double via_chain = revenue_of_policy(inst, S, as_dyn, pi);
  CHECK(close(via_chain, static_revenue(inst, pol), 1e-10 * std::max(1.0, via_chain)));
}

TEST_CASE("static revenue gradient matches finite differences") {
  rng_stream rng(21);
  for (int t = 0; t < 10; ++t) {
    const instance inst = testsupport::random_mhr_instance(mix_seed(500, t, 0), 2, 2, 5);
    std::vector<double> x(2);
    for (int j = 0; j < 2; ++j)
      x[j] = inst.classes[j].demand.max_rate() * (0.05 + 0.85 * rng.uniform());
    static_policy pol{x};
    const std::vector<double> g = static_revenue_gradient(inst, pol);
    for (int j = 0; j < 2; ++j) {
      const double h = 1e-6 * inst.classes[j].demand.max_rate();
      static_policy up = pol, dn = pol;
      up.rates[j] += h;
      dn.rates[j] -= h;
      const double fd = (static_revenue(inst, up) - static_revenue(inst, dn)) / (2 * h);
      CHECK_MESSAGE(close(g[j], fd, 1e-5 * std::max(1.0, std::abs(fd))), "t=", t, " j=", j);
    }
  }
}

TEST_CASE("first-order optimality residual on interior solutions") {
  instance inst;
  inst.C = 2;
  inst.classes.push_back({3.0, 1.0, demand_curve::linear(1.0, 3.0)});
  const state_space S(2, 1);
  solve_options opt;
  opt.tol = 1e-10;
  const solve_report rep = solve_dynamic(inst, S, opt);
  const kkt_report kkt = kkt_residual_1class(inst, S, rep.policy);
  CHECK_FALSE(kkt.boundary);
  CHECK(kkt.residual <= 1e-4);
  // posted rates fall with occupancy
  CHECK(kkt.omegas.size() == 2);
  CHECK(kkt.omegas[0] >= kkt.omegas[1] - 1e-9);

  const state_space S2(3, 2);
  dynamic_policy dummy;
  dummy.num_classes = 2;
  dummy.rates.assign(S2.size() * 2, 0.0);
  CHECK_THROWS_AS(kkt_residual_1class(example1_instance(), S2, dummy),
                  std::invalid_argument);
}

TEST_CASE("tightness family approaches the worst-case constant from above") {
  const double mus[3] = {1e-2, 1e-3, 1e-4};
  const double frozen[3] = {0.789772892887, 0.789503602645, 0.789476687261};
  double prev = 1.0;
  for (int i = 0; i < 3; ++i) {
    const instance inst = tight_instance(mus[i]);
    const state_space S(inst.C, 1);
    const solve_report rep = solve_dynamic(inst, S);
    const full_stationary pi = stationary_of_policy(inst, S, rep.policy);
    const static_policy tilde = constructed_static(inst, S, rep.policy, pi);
    const double ratio = static_revenue(inst, tilde) / rep.gain;
    CHECK_MESSAGE(close(ratio, frozen[i], 5e-6), "mu=", mus[i]);
    CHECK(ratio < prev);
    CHECK(ratio >= 15.0 / 19.0 - 1e-9);
    prev = ratio;
  }
  CHECK(prev <= 15.0 / 19.0 + 0.005);
}

TEST_CASE("boundary detection on the tight family") {
  const instance inst = tight_instance(1e-3);
  const state_space S(inst.C, 1);
  const solve_report rep = solve_dynamic(inst, S);
  // the optimal policy posts the full market rate below the protection level
  const kkt_report kkt = kkt_residual_1class(inst, S, rep.policy);
  CHECK(kkt.boundary);
}

TEST_CASE("capacity-relaxation heuristic respects its load budget") {
  for (int t = 0; t < 10; ++t) {
    const instance inst = testsupport::random_mhr_instance(mix_seed(600, t, 0), 3, 2, 6);
    for (double delta : {0.0, 0.7, 2.5, static_cast<double>(inst.C)}) {
      const static_policy pol = fluid_heuristic(inst, delta);
      double load = 0.0;
      for (int j = 0; j < 3; ++j) load += pol.rates[j] / inst.classes[j].mu;
      CHECK_MESSAGE(load <= delta + 1e-9, "t=", t, " delta=", delta);
      for (int j = 0; j < 3; ++j) {
        CHECK(pol.rates[j] >= 0.0);
        CHECK(pol.rates[j] <= inst.classes[j].demand.max_rate() * (1 + 1e-12));
      }
    }
  }
}

TEST_CASE("relaxation sweep finds a budget at least as good as the capacity point") {
  for (int t = 0; t < 5; ++t) {
    const instance inst = testsupport::random_mhr_instance(mix_seed(700, t, 0), 2, 3, 5);
    const fluid_sweep_result swept = fluid_sweep(inst);
    const double at_c = static_revenue(inst, fluid_heuristic(inst, inst.C));
    CHECK(swept.best_revenue >= at_c - 1e-12);
    CHECK(swept.delta_star >= 0.0);
    CHECK(swept.delta_star <= 3.0 * inst.C + 1e-12);
    CHECK(close(static_revenue(inst, swept.best_policy), swept.best_revenue,
                1e-12 * std::max(1.0, swept.best_revenue)));
  }
}

TEST_CASE("best static policy dominates the averaged one and stays below the gain") {
  for (int t = 0; t < 6; ++t) {
    const instance inst = testsupport::random_mhr_instance(mix_seed(800, t, 0), 2, 2, 4);
    const state_space S(inst.C, inst.num_classes());
    const solve_report rep = solve_dynamic(inst, S);
    const full_stationary pi = stationary_of_policy(inst, S, rep.policy);
    const static_policy tilde = constructed_static(inst, S, rep.policy, pi);
    const static_solve_report opt = optimal_static(inst);
    const double r_tilde = static_revenue(inst, tilde);
    CHECK(opt.revenue >= r_tilde - 1e-9);
    CHECK(opt.revenue <= rep.gain + 1e-8 * std::max(1.0, rep.gain));
  }
}

TEST_CASE("distributional fluid table carries consistent rows") {
  const fluid_experiment_summary sum = table_fluid(2, 3, 4, 99, demand_kind::linear);
  CHECK(sum.rows.size() == 4);
  for (const auto& r : sum.rows) {
    CHECK(r.M == 2);
    CHECK(r.C == 3);
    CHECK(r.demand_kind == "linear");
    CHECK(r.ratio_deltaC > 0.0);
    CHECK(r.ratio_bestDelta <= 1.0 + 1e-6);
    CHECK(r.ratio_bestDelta >= r.ratio_deltaC - 1e-12);
    CHECK(r.ratio_optimal <= 1.0 + 1e-4);
    CHECK(r.revenue_optimal >= r.revenue_bestDelta - 1e-6);
    CHECK(close(r.revenue_bestDelta / r.revenue_optimal, r.ratio_bestDelta, 1e-12));
    CHECK(close(r.revenue_optimal / r.revenue_dynamic, r.ratio_optimal, 1e-12));
  }
  // deterministic given the seed
  const fluid_experiment_summary again = table_fluid(2, 3, 4, 99, demand_kind::linear);
  for (std::size_t i = 0; i < sum.rows.size(); ++i) {
    CHECK(sum.rows[i].seed == again.rows[i].seed);
    CHECK(sum.rows[i].ratio_bestDelta == again.rows[i].ratio_bestDelta);
  }
  CHECK_THROWS_AS(table_fluid(2, 3, 0, 1, demand_kind::linear), std::domain_error);
  CHECK_THROWS_AS(table_fluid(2, 3, 2, 1, demand_kind::reciprocal_tight), std::domain_error);
}
