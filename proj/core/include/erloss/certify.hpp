#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

namespace erloss {

enum class certify_method { case1, case2, box_bruteforce, closed_form_c2, regular_G };

const char* to_string(certify_method m);

struct certificate {
  int C = 0;
  certify_method method = certify_method::box_bruteforce;
  double lower_bound = 0.0;
  int grid_N = 0;                     // box method only
  std::array<double, 3> argmin_box{}; // lower corner (w0, w_{C-3}, w_{C-2})
  double runtime_s = 0.0;
};

// Closed-form worst-case ratio bounds for 3 <= C <= 47. case1 covers
// light-load policies: the service level at offered load C - 2.7. case2
// covers heavy-load policies: (1 + 4/C) times the service level at offered
// load C + 3.
double closed_form_case1(int C);
double closed_form_case2(int C);

// Certified lower bound on the worst-case ratio for the intermediate load
// window, by a conservative per-box bound evaluated over an N^3 grid of the
// rate-ratio region (N^2 for C = 3, where the first two coordinates
// coincide). Streaming min-reduction, parallel over grid slices, result
// independent of the worker count.
certificate certify_box(int C, int N);

// Zero-width-box specialisation of the box objective at a single point,
// used to spot-check soundness of certify_box.
double ratio_at_point(int C, double w0, double w_cm3, double w_cm2);
bool point_feasible(int C, double w0, double w_cm3, double w_cm2);

struct mhr_row {
  int C = 0;
  double case1 = 0.0;
  double case2 = 0.0;
  certificate box;
  double combined = 0.0;  // min of the three per-case bounds
};

struct mhr_guarantee_result {
  double overall = 0.0;
  int argmin_C = 0;           // 48 denotes the tail term
  double tail = 0.0;          // guarantee_G(48), covering every C >= 48
  std::vector<mhr_row> rows;  // C = 3..47
};

// Capacity-by-capacity guarantee table for systems with non-decreasing
// hazard-rate valuations, combined into the overall universal bound. Rows
// cover C = 3..c_max; the tail term covers every C > c_max regardless, but
// only equals the true remainder bound when c_max = 47.
mhr_guarantee_result mhr_guarantee(int N = 500, int c_max = 47);

struct scalar_min {
  double bound = 0.0;
  double argmin = 0.0;
};

// Two-unit closed-form guarantees, minimised over the empty-state rate
// ratio w0: one for non-decreasing hazard-rate valuations (a rational
// function), one for uniform valuations (an algebraic function derived from
// the first-order optimality conditions).
scalar_min c2_mhr_bound();
scalar_min c2_uniform_bound();

struct constraint_violation {
  std::string name;             // "order" or "rate_mix"
  int index = 0;                // position of the violated inequality
  double slack = 0.0;           // negative means violated
  bool infinite_slack = false;  // zero denominator in the constraint
};

// Structural inequalities satisfied by optimal single-class rate ratios:
// monotonicity w_0 >= ... >= w_{C-1}, and the mixing bounds
// w_{j+1}/(j+1) + w_{C-1}/w_j >= 1 + (C-j-1) w_0 / (C (j+1)). Returns the
// constraints violated beyond tol.
std::vector<constraint_violation> rate_structure_check(std::span<const double> omega, int C,
                                                       double tol = 1e-6);

}  // namespace erloss
