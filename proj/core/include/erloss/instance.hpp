#pragma once

#include <vector>

#include "erloss/demand.hpp"

namespace erloss {

struct class_spec {
  double Lambda = 0.0;  // candidate arrival intensity (market size)
  double mu = 0.0;      // per-unit service rate
  demand_curve demand = demand_curve::linear(1.0, 1.0);
};

struct instance {
  int C = 1;
  std::vector<class_spec> classes;

  int num_classes() const { return static_cast<int>(classes.size()); }
  void validate() const;  // throws std::invalid_argument on bad fields
};

}  // namespace erloss
