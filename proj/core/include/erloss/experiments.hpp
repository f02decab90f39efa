#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "erloss/certify.hpp"
#include "erloss/instance.hpp"

namespace erloss {

// Two-class capacity-3 system with widely separated service rates, used as
// the end-to-end workhorse: a slow expensive class and a fast cheap one.
instance example1_instance();

// Single-class capacity-3 system whose constructed static policy approaches
// its worst-case ratio as mu shrinks.
instance tight_instance(double mu);

struct fluid_experiment_row {
  int M = 0, C = 0;
  std::uint64_t seed = 0;
  std::string demand_kind;
  double ratio_deltaC = 0.0;     // fluid at delta = C, over optimal static
  double ratio_bestDelta = 0.0;  // best delta on the sweep grid, over optimal static
  double ratio_optimal = 0.0;    // optimal static over dynamic gain
  // absolute revenue rates backing the ratios (not part of the CSV)
  double revenue_dynamic = 0.0, revenue_optimal = 0.0, revenue_bestDelta = 0.0;
};

struct fluid_experiment_summary {
  std::vector<fluid_experiment_row> rows;
  double worst_deltaC = 1.0, avg_deltaC = 0.0;
  double worst_bestDelta = 1.0, avg_bestDelta = 0.0;
  double worst_optimal = 1.0, avg_optimal = 0.0;
};

// Random-instance sweep of fluid-heuristic quality against the optimal
// static policy, and of the optimal static policy against the dynamic
// optimum. Per class: a ~ U[0.1, 5], b ~ U[0.5, 10], mu ~ U[0.02, 20],
// with the given demand shape (linear or exponential).
fluid_experiment_summary table_fluid(int M, int C, int instances, std::uint64_t seed,
                                     demand_kind kind);

// CSV emission with fixed headers and formatting (byte-stable for a fixed
// seed).
void write_fluid_csv(std::ostream& os, const fluid_experiment_summary& summary);
void write_guarantee_csv(std::ostream& os, const mhr_guarantee_result& result);

}  // namespace erloss
