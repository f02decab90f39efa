#include "erloss/demand.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace erloss {

const char* to_string(demand_kind k) {
  switch (k) {
    case demand_kind::linear: return "linear";
    case demand_kind::exponential: return "exponential";
    case demand_kind::reciprocal_tight: return "reciprocal_tight";
    case demand_kind::uniform_valuation: return "uniform_valuation";
  }
  return "?";
}

demand_curve demand_curve::linear(double a, double b) {
  demand_curve c;
  c.kind_ = demand_kind::linear;
  c.a_ = a;
  c.b_ = b;
  c.market_ = b / a;
  c.validate();
  return c;
}

demand_curve demand_curve::exponential(double a, double b) {
  demand_curve c;
  c.kind_ = demand_kind::exponential;
  c.a_ = a;
  c.b_ = b;
  c.market_ = b / a;
  c.validate();
  return c;
}

demand_curve demand_curve::reciprocal_tight(double a, double b, double market) {
  demand_curve c;
  c.kind_ = demand_kind::reciprocal_tight;
  c.a_ = a;
  c.b_ = b;
  c.market_ = market;
  c.validate();
  return c;
}

demand_curve demand_curve::uniform_valuation(double lo, double hi, double market) {
  demand_curve c;
  c.kind_ = demand_kind::uniform_valuation;
  c.lo_ = lo;
  c.hi_ = hi;
  c.market_ = market;
  c.validate();
  return c;
}

void demand_curve::validate() const {
  if (!(market_ > 0.0) || !std::isfinite(market_))
    throw std::invalid_argument("demand_curve: market size must be positive");
  switch (kind_) {
    case demand_kind::linear:
    case demand_kind::exponential:
    case demand_kind::reciprocal_tight:
      if (!(a_ > 0.0) || !(b_ > 0.0))
        throw std::invalid_argument("demand_curve: coefficients a, b must be positive");
      break;
    case demand_kind::uniform_valuation:
      if (!(hi_ > lo_) || lo_ < 0.0)
        throw std::invalid_argument("demand_curve: need 0 <= lo < hi");
      break;
  }
}

double demand_curve::peak_rate() const {
  double unconstrained;
  switch (kind_) {
    case demand_kind::linear:
      unconstrained = b_ / (2.0 * a_);
      break;
    case demand_kind::exponential:
      // d/dl [ l * a * ln(b/(a l)) ] = a ln(b/(a l)) - a = 0
      unconstrained = b_ / (a_ * std::exp(1.0));
      break;
    case demand_kind::reciprocal_tight:
      // revenue a + b*l increases in l
      return market_;
    case demand_kind::uniform_valuation:
      // p(l) = hi - (hi-lo) l / market
      unconstrained = hi_ * market_ / (2.0 * (hi_ - lo_));
      break;
    default:
      unconstrained = market_;
  }
  return std::min(unconstrained, market_);
}

double demand_curve::price(double rate) const {
  if (!(rate >= 0.0) || rate > market_ * (1.0 + 1e-12))
    throw std::domain_error("demand_curve::price: rate outside [0, max_rate]");
  const double l = std::max(rate, rate_floor());
  switch (kind_) {
    case demand_kind::linear:
      return b_ - a_ * l;
    case demand_kind::exponential:
      return a_ * std::log(b_ / (a_ * l));
    case demand_kind::reciprocal_tight:
      return b_ + a_ / l;
    case demand_kind::uniform_valuation:
      return hi_ - (hi_ - lo_) * l / market_;
  }
  return 0.0;
}

double demand_curve::price_prime(double rate) const {
  const double l = std::max(rate, rate_floor());
  switch (kind_) {
    case demand_kind::linear:
      return -a_;
    case demand_kind::exponential:
      return -a_ / l;
    case demand_kind::reciprocal_tight:
      return -a_ / (l * l);
    case demand_kind::uniform_valuation:
      return -(hi_ - lo_) / market_;
  }
  return 0.0;
}

double demand_curve::effective_rate(double p) const {
  if (!std::isfinite(p) || p < 0.0)
    throw std::domain_error("demand_curve::effective_rate: price must be finite and >= 0");
  double l;
  switch (kind_) {
    case demand_kind::linear:
      l = (b_ - p) / a_;
      break;
    case demand_kind::exponential:
      l = (b_ / a_) * std::exp(-p / a_);
      break;
    case demand_kind::reciprocal_tight:
      l = p > b_ ? a_ / (p - b_) : market_;
      break;
    case demand_kind::uniform_valuation:
      if (p <= lo_) return market_;
      if (p >= hi_) return 0.0;
      l = market_ * (hi_ - p) / (hi_ - lo_);
      break;
    default:
      l = 0.0;
  }
  return std::clamp(l, 0.0, market_);
}

double demand_curve::revenue(double rate) const {
  if (rate <= 0.0) return 0.0;
  return rate * price(rate);
}

double demand_curve::revenue_prime(double rate) const {
  const double l = std::max(rate, rate_floor());
  switch (kind_) {
    case demand_kind::linear:
      return b_ - 2.0 * a_ * l;
    case demand_kind::exponential:
      return a_ * std::log(b_ / (a_ * l)) - a_;
    case demand_kind::reciprocal_tight:
      return b_;
    case demand_kind::uniform_valuation:
      return hi_ - 2.0 * (hi_ - lo_) * l / market_;
  }
  return 0.0;
}

double demand_curve::revenue_second(double rate) const {
  const double l = std::max(rate, rate_floor());
  switch (kind_) {
    case demand_kind::linear:
      return -2.0 * a_;
    case demand_kind::exponential:
      return -a_ / l;
    case demand_kind::reciprocal_tight:
      return 0.0;
    case demand_kind::uniform_valuation:
      return -2.0 * (hi_ - lo_) / market_;
  }
  return 0.0;
}

double demand_curve::argmax_shifted_revenue(double shift) const {
  const double peak = peak_rate();
  switch (kind_) {
    case demand_kind::linear:
      return std::clamp((b_ + shift) / (2.0 * a_), 0.0, peak);
    case demand_kind::uniform_valuation: {
      const double slope = (hi_ - lo_) / market_;
      return std::clamp((hi_ + shift) / (2.0 * slope), 0.0, peak);
    }
    case demand_kind::exponential: {
      // maximise l*(a ln(b/(a l)) + shift): stationary at ln(b/(a l)) = 1 - shift/a
      const double e = shift / a_ - 1.0;
      if (e > 700.0) return peak;  // exp would overflow; maximiser is clamped anyway
      return std::clamp((b_ / a_) * std::exp(e), 0.0, peak);
    }
    case demand_kind::reciprocal_tight:
      // objective a + l*(b + shift) for l > 0, but exactly 0 at l = 0: the
      // supremum for non-positive slope sits at l -> 0+, which we realise at
      // the rate floor (value a, versus 0 at rate 0).
      return (b_ + shift > 0.0) ? peak : rate_floor();
  }
  return 0.0;
}

double demand_curve::rate_at_revenue_slope(double slope) const {
  const double peak = peak_rate();
  switch (kind_) {
    case demand_kind::linear:
      return std::clamp((b_ - slope) / (2.0 * a_), 0.0, peak);
    case demand_kind::uniform_valuation: {
      const double s = (hi_ - lo_) / market_;
      return std::clamp((hi_ - slope) / (2.0 * s), 0.0, peak);
    }
    case demand_kind::exponential: {
      const double e = -1.0 - slope / a_;
      if (e > 700.0) return peak;
      return std::clamp((b_ / a_) * std::exp(e), 0.0, peak);
    }
    case demand_kind::reciprocal_tight:
      // constant slope b: all-or-nothing
      return slope < b_ ? peak : 0.0;
  }
  return 0.0;
}

demand_curve::revenue_norms demand_curve::sup_revenue_norms() const {
  revenue_norms n;
  switch (kind_) {
    case demand_kind::linear:
      n.value = b_ * b_ / (4.0 * a_);
      n.slope = b_;
      n.curvature = 2.0 * a_;
      break;
    case demand_kind::exponential:
      n.value = b_ / std::exp(1.0);
      n.slope = a_ * (std::log(market_ / rate_floor()) - 1.0);
      n.curvature = a_ / rate_floor();
      break;
    case demand_kind::reciprocal_tight:
      n.value = a_ + b_ * market_;
      n.slope = b_;
      n.curvature = 0.0;
      break;
    case demand_kind::uniform_valuation: {
      const double s = (hi_ - lo_) / market_;
      const double vertex = hi_ / (2.0 * s);
      n.value = vertex <= market_ ? hi_ * hi_ * market_ / (4.0 * (hi_ - lo_)) : market_ * lo_;
      n.slope = hi_;
      n.curvature = 2.0 * s;
      break;
    }
  }
  return n;
}

demand_classification demand_curve::classify() const {
  constexpr int kPoints = 1000;
  demand_classification out;

  // regular: revenue concave and price strictly decreasing on (0, max_rate]
  out.regular = true;
  const double l0 = rate_floor();
  for (int i = 1; i <= kPoints; ++i) {
    const double l = l0 + (market_ - l0) * i / kPoints;
    if (revenue_second(l) > 1e-9 || price_prime(l) > -0.0) {
      out.regular = false;
      break;
    }
  }

  // mhr: hazard -l'(p)/l(p) non-decreasing over the price range swept by
  // rates in [rate_floor, max_rate]
  auto hazard = [&](double p) {
    const double l = effective_rate(p);
    if (l <= 0.0) return std::numeric_limits<double>::infinity();
    double lprime;  // dl/dp
    switch (kind_) {
      case demand_kind::linear: lprime = -1.0 / a_; break;
      case demand_kind::exponential: lprime = -l / a_; break;
      case demand_kind::reciprocal_tight: lprime = -a_ / ((p - b_) * (p - b_)); break;
      case demand_kind::uniform_valuation: lprime = -market_ / (hi_ - lo_); break;
      default: lprime = 0.0;
    }
    return -lprime / l;
  };

  const double p_hi = price(rate_floor());
  const double p_lo = price(market_);
  out.mhr = true;
  double prev = hazard(p_lo);
  for (int i = 1; i <= kPoints; ++i) {
    const double p = p_lo + (p_hi - p_lo) * i / kPoints;
    const double h = hazard(p);
    if (h < prev * (1.0 - 1e-9) - 1e-12) {
      out.mhr = false;
      break;
    }
    prev = h;
  }
  return out;
}

}  // namespace erloss
