#include "erloss/loss.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace erloss {

double occupancy_distribution::beta() const {
  const double a = alpha();
  if (a <= 0.0) return 0.0;
  double s = 0.0;
  for (int i = 1; i < capacity(); ++i) s += i * probs[i];
  return s / a;
}

double occupancy_distribution::mean() const {
  double s = 0.0;
  for (int i = 1; i <= capacity(); ++i) s += i * probs[i];
  return s;
}

double erlang_b(int C, double rho) {
  if (C < 0) throw std::domain_error("erlang_b: C must be >= 0");
  if (!(rho >= 0.0)) throw std::domain_error("erlang_b: rho must be >= 0");
  double B = 1.0;
  for (int k = 1; k <= C; ++k) B = rho * B / (k + rho * B);
  return B;
}

double erlang_service_level(int C, double rho) {
  if (C < 0) throw std::domain_error("erlang_service_level: C must be >= 0");
  if (!(rho >= 0.0)) throw std::domain_error("erlang_service_level: rho must be >= 0");
  // Direct recursion for S_k = 1 - B_k keeps full relative precision when
  // the service level is tiny (rho >> C); 1 - erlang_b would be limited to
  // the absolute ulp of B ~= 1 there, which turns the revenue surface into a
  // staircase and breaks line searches on heavily overloaded instances.
  double S = 0.0;  // zero capacity: never available
  for (int k = 1; k <= C; ++k) S = k / (k + rho * (1.0 - S));
  return S;
}

occupancy_distribution birth_death_stationary(std::span<const double> lambdas,
                                              double mu, int C) {
  if (!(mu > 0.0)) throw std::domain_error("birth_death_stationary: mu must be > 0");
  std::vector<double> deaths(static_cast<std::size_t>(C));
  for (int i = 1; i <= C; ++i) deaths[i - 1] = i * mu;
  return birth_death_stationary_general(lambdas, deaths, C);
}

occupancy_distribution birth_death_stationary_general(std::span<const double> lambdas,
                                                      std::span<const double> deaths,
                                                      int C) {
  if (C < 1) throw std::domain_error("birth_death_stationary: C must be >= 1");
  if (lambdas.size() != static_cast<std::size_t>(C) ||
      deaths.size() != static_cast<std::size_t>(C))
    throw std::invalid_argument("birth_death_stationary: need C birth and C death rates");
  for (double l : lambdas)
    if (!(l >= 0.0)) throw std::domain_error("birth_death_stationary: negative birth rate");
  for (double d : deaths)
    if (!(d > 0.0)) throw std::domain_error("birth_death_stationary: death rates must be > 0");

  // top[i] = P(state i | chain truncated at i); the full distribution is then
  // unwound as P_i = top[i] * prod_{k>i} (1 - top[k]). Never forms raw
  // factorial-sized weights, so it cannot overflow.
  std::vector<double> top(static_cast<std::size_t>(C) + 1);
  top[0] = 1.0;
  double t = 1.0;
  for (int k = 1; k <= C; ++k) {
    const double x = lambdas[k - 1] / deaths[k - 1];
    const double u = x * t;
    t = u / (1.0 + u);
    top[k] = t;
  }

  occupancy_distribution out;
  out.probs.assign(static_cast<std::size_t>(C) + 1, 0.0);
  double tail = 1.0;
  for (int i = C; i >= 0; --i) {
    out.probs[i] = top[i] * tail;
    tail *= 1.0 - top[i];
  }
  return out;
}

occupancy_distribution multiclass_static_occupancy(int C, std::span<const double> loads) {
  double rho = 0.0;
  for (double l : loads) {
    if (!(l >= 0.0)) throw std::domain_error("multiclass_static_occupancy: negative load");
    rho += l;
  }
  if (C < 1) throw std::domain_error("multiclass_static_occupancy: C must be >= 1");
  if (rho == 0.0) {
    occupancy_distribution out;
    out.probs.assign(static_cast<std::size_t>(C) + 1, 0.0);
    out.probs[0] = 1.0;
    return out;
  }
  std::vector<double> lam(static_cast<std::size_t>(C), rho);
  return birth_death_stationary(lam, 1.0, C);
}

double ratio_R(int C, double alpha, double beta) {
  if (C < 1) throw std::domain_error("ratio_R: C must be >= 1");
  if (!(alpha > 0.0) || alpha > 1.0)
    throw std::domain_error("ratio_R: alpha must lie in (0, 1]");
  if (!(beta >= 0.0)) throw std::domain_error("ratio_R: beta must be >= 0");
  const double w = C * (1.0 / alpha - 1.0) + beta;
  return erlang_service_level(C, w) / alpha;
}

double guarantee_G(int C) {
  if (C < 1) throw std::domain_error("guarantee_G: C must be >= 1");
  return erlang_service_level(C, static_cast<double>(C - 1));
}

double rational::to_double() const {
  // both parts stay far below double range for the supported C
  return num.convert_to<double>() / den.convert_to<double>();
}

std::string rational::str() const { return num.str() + "/" + den.str(); }

rational guarantee_G_exact(int C) {
  using boost::multiprecision::cpp_int;
  if (C < 2 || C > 64)
    throw std::domain_error("guarantee_G_exact: supported for 2 <= C <= 64");
  // Scale numerator and denominator by C!: the blocking term becomes
  // (C-1)^C over sum_{i=0}^C (C!/i!) (C-1)^i, all integers.
  cpp_int den = 0;
  cpp_int fact_ratio = 1;  // C!/i! built downward from i = C
  cpp_int power = boost::multiprecision::pow(cpp_int(C - 1), static_cast<unsigned>(C));
  for (int i = C; i >= 0; --i) {
    den += fact_ratio * boost::multiprecision::pow(cpp_int(C - 1), static_cast<unsigned>(i));
    fact_ratio *= i;  // after the i-th round: C!/ (i-1)!
  }
  cpp_int num = den - power;
  cpp_int g = boost::multiprecision::gcd(num, den);
  return rational{num / g, den / g};
}

}  // namespace erloss
