#include "erloss/experiments.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "erloss/dynamic.hpp"
#include "erloss/loss.hpp"
#include "erloss/rng.hpp"
#include "erloss/state_space.hpp"
#include "erloss/static_policy.hpp"

namespace erloss {

instance example1_instance() {
  instance inst;
  inst.C = 3;
  inst.classes.push_back({3600.0, 0.001, demand_curve::linear(0.05, 180.0)});
  inst.classes.push_back({0.22, 1000.0, demand_curve::linear(50.0, 11.0)});
  return inst;
}

instance tight_instance(double mu) {
  instance inst;
  inst.C = 3;
  inst.classes.push_back({10.0, mu, demand_curve::reciprocal_tight(1.0, 3.0, 10.0)});
  return inst;
}

fluid_experiment_summary table_fluid(int M, int C, int instances, std::uint64_t seed,
                                     demand_kind kind) {
  if (instances < 1) throw std::domain_error("table_fluid: need at least one instance");
  if (kind != demand_kind::linear && kind != demand_kind::exponential)
    throw std::domain_error("table_fluid: demand kind must be linear or exponential");

  fluid_experiment_summary sum;
  const state_space S(C, M);
  for (int n = 0; n < instances; ++n) {
    const std::uint64_t inst_seed = mix_seed(seed, static_cast<std::uint64_t>(n), 0);
    rng_stream rng(inst_seed);
    instance inst;
    inst.C = C;
    for (int j = 0; j < M; ++j) {
      const double a = 0.1 + 4.9 * rng.uniform();
      const double b = 0.5 + 9.5 * rng.uniform();
      const double mu = 0.02 + 19.98 * rng.uniform();
      demand_curve d = kind == demand_kind::linear ? demand_curve::linear(a, b)
                                                   : demand_curve::exponential(a, b);
      inst.classes.push_back({d.max_rate(), mu, d});
    }

    const solve_report dyn = solve_dynamic(inst, S);
    const static_policy at_c = fluid_heuristic(inst, static_cast<double>(C));
    const fluid_sweep_result swept = fluid_sweep(inst);
    const static_solve_report opt = optimal_static(inst);

    fluid_experiment_row row;
    row.M = M;
    row.C = C;
    row.seed = inst_seed;
    row.demand_kind = to_string(kind);
    // Fluid-policy quality is measured against the optimal static policy (the
    // tightest static benchmark); ratio_optimal then reports how much of the
    // dynamic gain the optimal static policy itself captures.
    row.ratio_deltaC = static_revenue(inst, at_c) / opt.revenue;
    row.ratio_bestDelta = swept.best_revenue / opt.revenue;
    row.ratio_optimal = opt.revenue / dyn.gain;
    row.revenue_dynamic = dyn.gain;
    row.revenue_optimal = opt.revenue;
    row.revenue_bestDelta = swept.best_revenue;
    sum.rows.push_back(std::move(row));
  }

  auto fold = [&](auto get, double& worst, double& avg) {
    worst = 2.0;
    avg = 0.0;
    for (const auto& r : sum.rows) {
      const double v = get(r);
      worst = std::min(worst, v);
      avg += v;
    }
    avg /= sum.rows.size();
  };
  fold([](const fluid_experiment_row& r) { return r.ratio_deltaC; }, sum.worst_deltaC,
       sum.avg_deltaC);
  fold([](const fluid_experiment_row& r) { return r.ratio_bestDelta; }, sum.worst_bestDelta,
       sum.avg_bestDelta);
  fold([](const fluid_experiment_row& r) { return r.ratio_optimal; }, sum.worst_optimal,
       sum.avg_optimal);
  return sum;
}

void write_fluid_csv(std::ostream& os, const fluid_experiment_summary& summary) {
  os << "M,C,seed,demand_kind,ratio_deltaC,ratio_bestDelta,ratio_optimal\n";
  char buf[160];
  for (const auto& r : summary.rows) {
    std::snprintf(buf, sizeof(buf), "%d,%d,%llu,%s,%.6f,%.6f,%.6f\n", r.M, r.C,
                  static_cast<unsigned long long>(r.seed), r.demand_kind.c_str(),
                  r.ratio_deltaC, r.ratio_bestDelta, r.ratio_optimal);
    os << buf;
  }
}

void write_guarantee_csv(std::ostream& os, const mhr_guarantee_result& result) {
  os << "C,G,case1,case2,box,combined\n";
  char buf[160];
  for (const auto& row : result.rows) {
    std::snprintf(buf, sizeof(buf), "%d,%.6f,%.6f,%.6f,%.6f,%.6f\n", row.C,
                  guarantee_G(row.C), row.case1, row.case2, row.box.lower_bound,
                  row.combined);
    os << buf;
  }
}

}  // namespace erloss
