#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "erloss/certify.hpp"
#include "erloss/dynamic.hpp"
#include "erloss/instance.hpp"
#include "erloss/sim.hpp"
#include "erloss/static_policy.hpp"

namespace erloss {

// Result of parsing an instance config document. Validation failures throw
// std::invalid_argument naming the offending field path, for example
// "classes[0].mu". Unknown fields are collected as warnings.
struct load_report {
  instance inst;
  std::vector<std::string> warnings;
  std::uint64_t seed = 0;
  bool has_seed = false;
  double tol = 1e-9;  // default when the config does not override it
};

load_report load_instance_json(const std::string& text);
load_report load_instance_file(const std::string& path);

// Canonical serialisation; parse -> serialise -> parse is stable.
std::string instance_to_json(const instance& inst);

std::string solve_report_to_json(const instance& inst, const state_space& S,
                                 const solve_report& rep);
std::string static_report_to_json(const instance& inst, const static_solve_report& rep);
std::string sim_estimate_to_json(const sim_estimate& est);

// Certification document for one capacity: the box certificate plus both
// closed-form case values, with the combined bound.
std::string certify_document_json(double case1, double case2, const certificate& box);

}  // namespace erloss
