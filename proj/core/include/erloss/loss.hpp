#pragma once

#include <span>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace erloss {

// Occupancy-level distribution of a capacity-C loss system (index = number of
// busy units, 0..C).
struct occupancy_distribution {
  std::vector<double> probs;

  int capacity() const { return static_cast<int>(probs.size()) - 1; }

  // Availability: probability that at least one unit is free.
  double alpha() const { return 1.0 - probs.back(); }

  // Mean occupancy conditional on not being full; 0 (with beta_defined()
  // false) in the degenerate always-full case.
  bool beta_defined() const { return alpha() > 0.0; }
  double beta() const;

  double mean() const;
};

// Blocking probability of an M/M/C/C queue at offered load rho, via the
// standard stable recursion.
double erlang_b(int C, double rho);

// 1 - erlang_b: fraction of time at least one unit is free.
double erlang_service_level(int C, double rho);

// Stationary distribution of the birth-death chain on {0..C} with arrival
// rate lambdas[i] in state i and service rate i*mu in state i. Computed with
// a running-normalisation recursion; stable for any rate magnitudes.
occupancy_distribution birth_death_stationary(std::span<const double> lambdas,
                                              double mu, int C);

// Same chain but with a fully general death rate deaths[i-1] out of state i
// (so deaths has C entries for transitions 1->0 .. C->C-1).
occupancy_distribution birth_death_stationary_general(std::span<const double> lambdas,
                                                      std::span<const double> deaths,
                                                      int C);

// Occupancy distribution of a multi-class loss system under fixed per-class
// rates; loads[j] = lambda_j / mu_j. Depends on the loads only through their
// sum (Erlang form).
occupancy_distribution multiclass_static_occupancy(int C, std::span<const double> loads);

// Availability-normalised service-level ratio used by the performance
// guarantees: R(alpha, beta) = (1/alpha) * erlang_service_level(C, w) with
// w = C*(1/alpha - 1) + beta. Raw value, may exceed 1.
double ratio_R(int C, double alpha, double beta);

// Worst-case revenue ratio of the availability-matched single-price policy,
// closed form: G(C) = 1 - ((C-1)^C / C!) / sum_{i=0}^C (C-1)^i / i!.
double guarantee_G(int C);

// Exact rational value of G(C), reduced; supported for 2 <= C <= 64.
struct rational {
  boost::multiprecision::cpp_int num;
  boost::multiprecision::cpp_int den;

  double to_double() const;
  std::string str() const;  // "num/den"
};
rational guarantee_G_exact(int C);

}  // namespace erloss
