#pragma once

#include <string>

namespace erloss {

// Price/rate sides of a demand relation p(lambda) for one customer class.
// Every curve is backed by a valuation distribution on top of a Poisson
// arrival stream of total intensity max_rate(): posting price p sells at
// effective rate max_rate * P(valuation >= p).
//
// Supported shapes:
//   linear             p(l) = b - a*l            (uniform valuations on [0, b])
//   exponential        p(l) = a * ln(b / (a*l))  (Exp(1/a) valuations)
//   reciprocal_tight   p(l) = b + a/l            (Pareto-like tail, capped at market)
//   uniform_valuation  valuations uniform on [lo, hi], market size Lambda
enum class demand_kind { linear, exponential, reciprocal_tight, uniform_valuation };

const char* to_string(demand_kind k);

struct demand_classification {
  bool regular = false;  // concave revenue, one-to-one price/rate map
  bool mhr = false;      // non-decreasing hazard rate of the valuation law
};

class demand_curve {
 public:
  static demand_curve linear(double a, double b);
  static demand_curve exponential(double a, double b);
  static demand_curve reciprocal_tight(double a, double b, double market);
  static demand_curve uniform_valuation(double lo, double hi, double market);

  demand_kind kind() const { return kind_; }
  double coeff_a() const { return a_; }
  double coeff_b() const { return b_; }
  double support_lo() const { return lo_; }
  double support_hi() const { return hi_; }

  // Largest admissible effective arrival rate (market size).
  double max_rate() const { return market_; }

  // Rate floor used whenever a formula degenerates at l = 0 (log/1-over-l
  // terms). Rates below it are clamped up.
  double rate_floor() const { return 1e-12 * market_; }

  // Revenue-maximising rate, capped at max_rate().
  double peak_rate() const;

  double price(double rate) const;        // inverse demand p(l)
  double price_prime(double rate) const;  // dp/dl
  double effective_rate(double price) const;

  double revenue(double rate) const;  // l * p(l), defined 0 at l = 0
  double revenue_prime(double rate) const;
  double revenue_second(double rate) const;

  // argmax over [0, peak_rate()] of l * (p(l) + shift); ties resolved toward
  // the smallest maximiser.
  double argmax_shifted_revenue(double shift) const;

  // Inverse of revenue_prime clamped to [0, peak_rate()]; used by the fluid
  // relaxation. For curves with constant revenue slope this is a step
  // function of the target.
  double rate_at_revenue_slope(double slope) const;

  // Suprema of |r|, |r'|, |r''| over [rate_floor, max_rate], used to build
  // gradient step sizes. Exact for each shape; the log/1-over-l shapes take
  // their derivative suprema at the rate floor.
  struct revenue_norms {
    double value = 0.0;
    double slope = 0.0;
    double curvature = 0.0;
  };
  revenue_norms sup_revenue_norms() const;

  // Grid-probed curve properties (1000 sample points).
  demand_classification classify() const;

 private:
  demand_curve() = default;
  void validate() const;

  demand_kind kind_ = demand_kind::linear;
  double a_ = 0.0, b_ = 0.0;   // coefficients for the first three kinds
  double lo_ = 0.0, hi_ = 0.0; // valuation support for uniform_valuation
  double market_ = 0.0;
};

}  // namespace erloss
