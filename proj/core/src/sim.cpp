#include "erloss/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <utility>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "erloss/rng.hpp"

namespace erloss {

const char* to_string(service_kind k) {
  switch (k) {
    case service_kind::exponential: return "exponential";
    case service_kind::deterministic: return "deterministic";
    case service_kind::lognormal: return "lognormal";
    case service_kind::hyperexponential: return "hyperexponential";
  }
  return "?";
}

service_spec service_spec::exponential(double mean) { return {service_kind::exponential, mean, 1.0}; }
service_spec service_spec::deterministic(double mean) {
  return {service_kind::deterministic, mean, 0.0};
}
service_spec service_spec::lognormal(double mean, double cv) {
  return {service_kind::lognormal, mean, cv};
}
service_spec service_spec::hyperexponential(double mean, double cv) {
  return {service_kind::hyperexponential, mean, cv};
}

void service_spec::validate() const {
  if (!(mean > 0.0)) throw std::invalid_argument("service_spec: mean must be > 0");
  if (kind == service_kind::lognormal && !(cv > 0.0))
    throw std::invalid_argument("service_spec: lognormal needs cv > 0");
  if (kind == service_kind::hyperexponential && !(cv >= 1.0))
    throw std::invalid_argument("service_spec: hyperexponential needs cv >= 1");
}

double sample_service(const service_spec& spec, double u1, double u2) {
  switch (spec.kind) {
    case service_kind::exponential:
      return -spec.mean * std::log(u1);
    case service_kind::deterministic:
      return spec.mean;
    case service_kind::lognormal: {
      const double sigma2 = std::log(1.0 + spec.cv * spec.cv);
      const double mu = std::log(spec.mean) - 0.5 * sigma2;
      static const boost::math::normal_distribution<double> unit_normal;
      return std::exp(mu + std::sqrt(sigma2) * boost::math::quantile(unit_normal, u1));
    }
    case service_kind::hyperexponential: {
      // balanced two-phase mixture matching the mean and cv
      const double d = std::sqrt((spec.cv * spec.cv - 1.0) / (spec.cv * spec.cv + 1.0));
      const double p1 = 0.5 * (1.0 + d);
      const double p = u1 <= p1 ? p1 : 1.0 - p1;
      const double branch_mean = spec.mean / (2.0 * p);
      return -branch_mean * std::log(u2);
    }
  }
  return spec.mean;
}

namespace {

struct policy_view {
  const dynamic_policy* dyn = nullptr;
  const static_policy* sta = nullptr;

  double posted(std::size_t s, int j) const { return dyn ? dyn->rate(s, j) : sta->rates[j]; }
};

policy_view view_of(const any_policy& p) {
  policy_view v;
  if (const auto* d = std::get_if<dynamic_policy>(&p))
    v.dyn = d;
  else
    v.sta = &std::get<static_policy>(p);
  return v;
}

void check_dimensions(const instance& inst, const state_space& S, const any_policy& p) {
  const int M = inst.num_classes();
  const policy_view v = view_of(p);
  if (v.dyn && (v.dyn->num_classes != M || v.dyn->rates.size() != S.size() * M))
    throw std::invalid_argument("simulate: dynamic policy does not match the state space");
  if (v.sta && static_cast<int>(v.sta->rates.size()) != M)
    throw std::invalid_argument("simulate: static policy does not match the class count");
}

std::vector<double> dominating_rates(const instance& inst, const state_space& S,
                                     const std::vector<any_policy>& policies) {
  const int M = inst.num_classes();
  std::vector<double> dom(M, 0.0);
  for (const auto& p : policies) {
    const policy_view v = view_of(p);
    for (int j = 0; j < M; ++j) {
      if (v.sta) {
        dom[j] = std::max(dom[j], v.sta->rates[j]);
      } else {
        for (std::size_t s = 0; s < S.size(); ++s) dom[j] = std::max(dom[j], v.dyn->rate(s, j));
      }
    }
  }
  return dom;
}

struct rep_result {
  double revenue_rate = 0.0;
  double blocking = 0.0;
  double blocking_purchaser = 0.0;
  std::vector<double> occupancy;
};

rep_result run_rep(const instance& inst, const state_space& S, const policy_view& view,
                   const std::vector<double>& dom, const std::vector<service_spec>& service,
                   double horizon, int rep, std::uint64_t seed) {
  const int M = inst.num_classes();
  const int C = inst.C;
  const double warm = 0.1 * horizon;
  constexpr double inf = std::numeric_limits<double>::infinity();

  std::vector<rng_stream> stream;
  stream.reserve(M);
  for (int j = 0; j < M; ++j) stream.emplace_back(mix_seed(seed, static_cast<std::uint64_t>(rep), j));

  std::vector<double> next_arrival(M, inf);
  for (int j = 0; j < M; ++j)
    if (dom[j] > 0.0) next_arrival[j] = stream[j].exponential(1.0 / dom[j]);

  using completion = std::pair<double, int>;
  std::priority_queue<completion, std::vector<completion>, std::greater<completion>> done;

  int occ = 0;
  std::size_t s = 0;
  double t = 0.0;
  double revenue = 0.0, candidates = 0.0, blocked = 0.0, purchasers = 0.0, blocked_p = 0.0;
  std::vector<double> occ_time(C + 1, 0.0);

  auto accrue = [&](double from, double to) {
    const double a = std::max(from, warm), b = std::min(to, horizon);
    if (b > a) occ_time[occ] += b - a;
  };

  while (true) {
    const double t_comp = done.empty() ? inf : done.top().first;
    int j_arr = -1;
    double t_arr = inf;
    for (int j = 0; j < M; ++j)
      if (next_arrival[j] < t_arr) {
        t_arr = next_arrival[j];
        j_arr = j;
      }
    const double t_next = std::min(t_comp, t_arr);
    if (t_next >= horizon) {
      accrue(t, horizon);
      break;
    }
    accrue(t, t_next);
    t = t_next;

    if (t_comp <= t_arr) {
      const int j = done.top().second;
      done.pop();
      --occ;
      s = S.down(s, j);
      continue;
    }

    const int j = j_arr;
    const double u_val = stream[j].uniform();
    const double su1 = stream[j].uniform();
    const double su2 = stream[j].uniform();
    next_arrival[j] = t + stream[j].exponential(1.0 / dom[j]);

    const bool full = occ >= C;
    const double posted = view.posted(s, j);  // full-state dynamic entries are zero
    const bool wants = u_val * dom[j] <= posted;
    if (t >= warm) {
      candidates += 1.0;
      if (full) blocked += 1.0;
      if (wants) {
        purchasers += 1.0;
        if (full) blocked_p += 1.0;
      }
    }
    if (wants && !full) {
      if (t >= warm) revenue += inst.classes[j].demand.price(posted);
      ++occ;
      s = S.up(s, j);
      done.emplace(t + sample_service(service[j], su1, su2), j);
    }
  }

  rep_result out;
  const double window = horizon - warm;
  out.revenue_rate = revenue / window;
  out.blocking = candidates > 0.0 ? blocked / candidates : 0.0;
  out.blocking_purchaser = purchasers > 0.0 ? blocked_p / purchasers : 0.0;
  out.occupancy.resize(C + 1);
  for (int i = 0; i <= C; ++i) out.occupancy[i] = occ_time[i] / window;
  return out;
}

struct mean_ci {
  double mean = 0.0, half = 0.0;
};

mean_ci t_interval(const std::vector<double>& xs) {
  const int n = static_cast<int>(xs.size());
  mean_ci out;
  for (double v : xs) out.mean += v;
  out.mean /= n;
  if (n < 2) return out;
  double var = 0.0;
  for (double v : xs) var += (v - out.mean) * (v - out.mean);
  var /= (n - 1);
  if (var <= 0.0) return out;
  const boost::math::students_t_distribution<double> dist(n - 1);
  out.half = boost::math::quantile(dist, 0.975) * std::sqrt(var / n);
  return out;
}

std::vector<rep_result> run_all_reps(const instance& inst, const state_space& S,
                                     const policy_view& view, const std::vector<double>& dom,
                                     const std::vector<service_spec>& service, double horizon,
                                     int reps, std::uint64_t seed) {
  std::vector<rep_result> out;
  out.reserve(reps);
  for (int r = 0; r < reps; ++r)
    out.push_back(run_rep(inst, S, view, dom, service, horizon, r, seed));
  return out;
}

sim_estimate aggregate(const std::vector<rep_result>& reps, double horizon, std::uint64_t seed,
                       int C) {
  sim_estimate est;
  est.reps = static_cast<int>(reps.size());
  est.horizon = horizon;
  est.seed = seed;
  std::vector<double> buf(reps.size());
  auto fill = [&](auto&& get) {
    for (std::size_t i = 0; i < reps.size(); ++i) buf[i] = get(reps[i]);
    return t_interval(buf);
  };
  auto rev = fill([](const rep_result& r) { return r.revenue_rate; });
  est.revenue_rate = rev.mean;
  est.revenue_ci = rev.half;
  auto blk = fill([](const rep_result& r) { return r.blocking; });
  est.blocking = blk.mean;
  est.blocking_ci = blk.half;
  auto bp = fill([](const rep_result& r) { return r.blocking_purchaser; });
  est.blocking_purchaser = bp.mean;
  est.blocking_purchaser_ci = bp.half;
  est.occupancy.resize(C + 1);
  est.occupancy_ci.resize(C + 1);
  for (int i = 0; i <= C; ++i) {
    auto oc = fill([i](const rep_result& r) { return r.occupancy[i]; });
    est.occupancy[i] = oc.mean;
    est.occupancy_ci[i] = oc.half;
  }
  return est;
}

void check_common(const instance& inst, double horizon, int reps,
                  const std::vector<service_spec>& service) {
  inst.validate();
  if (!(horizon > 0.0)) throw std::domain_error("simulate: horizon must be > 0");
  if (reps < 2) throw std::domain_error("simulate: need at least 2 replications");
  if (static_cast<int>(service.size()) != inst.num_classes())
    throw std::invalid_argument("simulate: one service spec per class required");
  for (const auto& sp : service) sp.validate();
}

}  // namespace

sim_estimate simulate(const instance& inst, const state_space& S, const any_policy& policy,
                      const std::vector<service_spec>& service, double horizon, int reps,
                      std::uint64_t seed) {
  check_common(inst, horizon, reps, service);
  check_dimensions(inst, S, policy);
  const std::vector<double> dom = dominating_rates(inst, S, {policy});
  const auto rr =
      run_all_reps(inst, S, view_of(policy), dom, service, horizon, reps, seed);
  return aggregate(rr, horizon, seed, inst.C);
}

compare_report compare_policies(const instance& inst, const state_space& S,
                                const std::vector<any_policy>& policies,
                                const std::vector<service_spec>& service, double horizon,
                                int reps, std::uint64_t seed) {
  check_common(inst, horizon, reps, service);
  if (policies.size() < 2)
    throw std::invalid_argument("compare_policies: need at least 2 policies");
  for (const auto& p : policies) check_dimensions(inst, S, p);

  const std::vector<double> dom = dominating_rates(inst, S, policies);
  compare_report rep;
  std::vector<std::vector<rep_result>> raw;
  raw.reserve(policies.size());
  for (const auto& p : policies) {
    raw.push_back(run_all_reps(inst, S, view_of(p), dom, service, horizon, reps, seed));
    rep.per_policy.push_back(aggregate(raw.back(), horizon, seed, inst.C));
  }
  const auto& ref = raw.back();
  std::vector<double> ratios(reps);
  for (std::size_t p = 0; p < policies.size(); ++p) {
    for (int r = 0; r < reps; ++r) ratios[r] = raw[p][r].revenue_rate / ref[r].revenue_rate;
    const mean_ci ci = t_interval(ratios);
    rep.ratio_to_reference.push_back(ci.mean);
    rep.ratio_ci.push_back(ci.half);
  }
  return rep;
}

}  // namespace erloss
