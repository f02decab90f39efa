#include "erloss/dynamic.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

#include <Eigen/Dense>

namespace erloss {

namespace {

double uniformization_constant(const instance& inst) {
  double U = 0.0;
  for (const auto& cl : inst.classes) U += cl.Lambda + inst.C * cl.mu;
  return U;
}

// One Bellman sweep of the uniformised chain. Writes the greedy policy and
// T v; returns nothing. delta_out may alias nothing.
void bellman_sweep(const instance& inst, const state_space& S, double U,
                   const std::vector<double>& v, std::vector<double>& Tv,
                   dynamic_policy& greedy) {
  const int M = inst.num_classes();
  const std::size_t n = S.size();
  for (std::size_t s = 0; s < n; ++s) {
    auto x = S.state(s);
    double flux = 0.0;
    if (S.occupancy(s) < inst.C) {
      for (int j = 0; j < M; ++j) {
        const std::size_t t = S.up(s, j);
        const double dv = v[t] - v[s];
        const double lam = inst.classes[j].demand.argmax_shifted_revenue(dv);
        greedy.rates[s * M + j] = lam;
        flux += inst.classes[j].demand.revenue(lam) + lam * dv;
      }
    } else {
      for (int j = 0; j < M; ++j) greedy.rates[s * M + j] = 0.0;
    }
    for (int j = 0; j < M; ++j) {
      if (x[j] > 0) {
        const std::size_t t = S.down(s, j);
        flux += x[j] * inst.classes[j].mu * (v[t] - v[s]);
      }
    }
    Tv[s] = v[s] + flux / U;
  }
}

// Exact average-reward evaluation of a fixed policy: solve the Poisson
// equations  g = r(x) + sum_y q(x,y) (h(y) - h(x)),  h(0) = 0.
std::vector<double> evaluate_policy_bias(const instance& inst, const state_space& S,
                                         const dynamic_policy& pol) {
  const int M = inst.num_classes();
  const auto n = static_cast<Eigen::Index>(S.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (Eigen::Index s = 0; s < n; ++s) {
    auto x = S.state(s);
    A(s, 0) = 1.0;  // column 0 holds the gain unknown; h(0) is pinned to 0
    double r = 0.0;
    // h(0) = 0, so its column is reused for the gain and both h(0)
    // coefficients are dropped
    auto couple = [&](std::size_t t, double rate) {
      if (t != 0) A(s, static_cast<Eigen::Index>(t)) -= rate;
      if (s != 0) A(s, s) += rate;
    };
    if (S.occupancy(s) < inst.C) {
      for (int j = 0; j < M; ++j) {
        const double lam = pol.rate(s, j);
        r += inst.classes[j].demand.revenue(lam);
        couple(S.up(s, j), lam);
      }
    }
    for (int j = 0; j < M; ++j)
      if (x[j] > 0) couple(S.down(s, j), x[j] * inst.classes[j].mu);
    rhs(s) = r;
  }
  Eigen::VectorXd sol = A.partialPivLu().solve(rhs);
  std::vector<double> h(S.size());
  h[0] = 0.0;
  for (Eigen::Index s = 1; s < n; ++s) h[s] = sol(s);
  return h;
}

}  // namespace

solve_report solve_dynamic(const instance& inst, const state_space& S,
                           const solve_options& opt) {
  inst.validate();
  if (S.capacity() != inst.C || S.classes() != inst.num_classes())
    throw std::invalid_argument("solve_dynamic: state space does not match instance");

  const int M = inst.num_classes();
  const double U = uniformization_constant(inst);
  const std::size_t n = S.size();

  solve_report rep;
  rep.uniformization = U;
  rep.policy.num_classes = M;
  rep.policy.rates.assign(n * M, 0.0);

  std::vector<double> v(n, 0.0), Tv(n, 0.0);
  const bool dense_ok = n <= opt.dense_evaluation_limit;

  for (int it = 0; it < opt.max_iterations; ++it) {
    bellman_sweep(inst, S, U, v, Tv, rep.policy);
    ++rep.iterations;
    double lo = Tv[0] - v[0], hi = lo;
    for (std::size_t s = 1; s < n; ++s) {
      const double d = Tv[s] - v[s];
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    rep.span_residual = hi - lo;
    if (rep.span_residual <= opt.tol) {
      rep.gain = 0.5 * (hi + lo) * U;
      rep.converged = true;
      const double v0 = Tv[0];
      for (std::size_t s = 0; s < n; ++s) v[s] = Tv[s] - v0;
      break;
    }
    if (dense_ok) {
      v = evaluate_policy_bias(inst, S, rep.policy);
    } else {
      // plain relative value sweeps when the exact solve is too large
      const double v0 = Tv[0];
      for (std::size_t s = 0; s < n; ++s) v[s] = Tv[s] - v0;
    }
  }
  if (!rep.converged) {
    bellman_sweep(inst, S, U, v, Tv, rep.policy);
    double lo = Tv[0] - v[0], hi = lo;
    for (std::size_t s = 1; s < n; ++s) {
      const double d = Tv[s] - v[s];
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    rep.span_residual = hi - lo;
    rep.gain = 0.5 * (hi + lo) * U;
  }
  rep.bias = std::move(v);
  return rep;
}

full_stationary stationary_of_policy(const instance& inst, const state_space& S,
                                     const dynamic_policy& policy) {
  inst.validate();
  const int M = inst.num_classes();
  const std::size_t n = S.size();

  // restrict to states reachable from empty under the policy (service moves
  // are always possible, so the reachable set is one closed class)
  std::vector<char> reach(n, 0);
  std::queue<std::size_t> bfs;
  reach[0] = 1;
  bfs.push(0);
  while (!bfs.empty()) {
    const std::size_t s = bfs.front();
    bfs.pop();
    auto x = S.state(s);
    if (S.occupancy(s) < inst.C) {
      for (int j = 0; j < M; ++j) {
        if (policy.rate(s, j) > 0.0) {
          const std::size_t t = S.up(s, j);
          if (!reach[t]) { reach[t] = 1; bfs.push(t); }
        }
      }
    }
    for (int j = 0; j < M; ++j) {
      if (x[j] > 0) {
        const std::size_t t = S.down(s, j);
        if (!reach[t]) { reach[t] = 1; bfs.push(t); }
      }
    }
  }
  std::vector<std::size_t> live;
  std::vector<std::size_t> pos(n, state_space::npos);
  for (std::size_t s = 0; s < n; ++s)
    if (reach[s]) { pos[s] = live.size(); live.push_back(s); }

  full_stationary out;
  out.probs.assign(n, 0.0);
  out.restricted = live.size() != n;
  const auto m = static_cast<Eigen::Index>(live.size());

  auto transitions = [&](std::size_t s, auto&& emit) {
    auto x = S.state(s);
    if (S.occupancy(s) < inst.C)
      for (int j = 0; j < M; ++j) {
        const double lam = policy.rate(s, j);
        if (lam > 0.0) emit(S.up(s, j), lam);
      }
    for (int j = 0; j < M; ++j)
      if (x[j] > 0) emit(S.down(s, j), x[j] * inst.classes[j].mu);
  };

  if (live.size() <= 5000) {
    // pi Q = 0 with sum(pi) = 1: replace the last balance column
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      const std::size_t s = live[i];
      transitions(s, [&](std::size_t t, double rate) {
        A(static_cast<Eigen::Index>(pos[t]), i) += rate;
        A(i, i) -= rate;
      });
    }
    for (Eigen::Index i = 0; i < m; ++i) A(m - 1, i) = 1.0;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    rhs(m - 1) = 1.0;
    Eigen::VectorXd pi = A.partialPivLu().solve(rhs);
    for (Eigen::Index i = 0; i < m; ++i) out.probs[live[i]] = std::max(0.0, pi(i));
  } else {
    // power iteration on the uniformised kernel
    double U = uniformization_constant(inst);
    std::vector<double> pi(live.size(), 1.0 / live.size()), nxt(live.size());
    for (int it = 0; it < 200000; ++it) {
      std::fill(nxt.begin(), nxt.end(), 0.0);
      for (std::size_t i = 0; i < live.size(); ++i) {
        const std::size_t s = live[i];
        double out_rate = 0.0;
        transitions(s, [&](std::size_t t, double rate) {
          nxt[pos[t]] += pi[i] * rate / U;
          out_rate += rate;
        });
        nxt[i] += pi[i] * (1.0 - out_rate / U);
      }
      double diff = 0.0;
      for (std::size_t i = 0; i < live.size(); ++i) diff = std::max(diff, std::abs(nxt[i] - pi[i]));
      pi.swap(nxt);
      if (diff < 1e-15) break;
    }
    double total = 0.0;
    for (double p : pi) total += p;
    for (std::size_t i = 0; i < live.size(); ++i) out.probs[live[i]] = pi[i] / total;
  }

  // renormalise and measure global balance
  double total = 0.0;
  for (double p : out.probs) total += p;
  for (double& p : out.probs) p /= total;
  std::vector<double> net(n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    if (out.probs[s] == 0.0) continue;
    transitions(s, [&](std::size_t t, double rate) {
      net[s] -= out.probs[s] * rate;
      net[t] += out.probs[s] * rate;
    });
  }
  for (std::size_t s = 0; s < n; ++s)
    out.balance_residual = std::max(out.balance_residual, std::abs(net[s]));
  return out;
}

occupancy_distribution full_stationary::occupancy(const state_space& S) const {
  occupancy_distribution d;
  d.probs.assign(S.capacity() + 1, 0.0);
  for (std::size_t s = 0; s < probs.size(); ++s) d.probs[S.occupancy(s)] += probs[s];
  return d;
}

double revenue_of_policy(const instance& inst, const state_space& S,
                         const dynamic_policy& policy, const full_stationary& pi) {
  const int M = inst.num_classes();
  double r = 0.0;
  for (std::size_t s = 0; s < S.size(); ++s) {
    if (S.occupancy(s) >= inst.C) continue;
    for (int j = 0; j < M; ++j)
      r += pi.probs[s] * inst.classes[j].demand.revenue(policy.rate(s, j));
  }
  return r;
}

kkt_report kkt_residual_1class(const instance& inst, const state_space& S,
                               const dynamic_policy& policy) {
  if (inst.num_classes() != 1 || S.classes() != 1)
    throw std::invalid_argument("kkt_residual_1class: single-class instances only");
  const int C = inst.C;
  const auto& cl = inst.classes[0];
  const double mu = cl.mu;
  const double peak = cl.demand.peak_rate();

  kkt_report rep;
  rep.omegas.resize(C);
  rep.gammas.resize(C);
  for (int i = 0; i < C; ++i) {
    // states are occupancy-ordered for M = 1
    const double lam = policy.rate(static_cast<std::size_t>(i), 0);
    rep.omegas[i] = lam / mu;
    rep.gammas[i] = -cl.demand.price_prime(lam);
    const double floor = cl.demand.rate_floor();
    if (lam <= floor * (1.0 + 1e-6) || lam >= peak * (1.0 - 1e-9)) rep.boundary = true;
  }
  for (int j = 0; j < C; ++j) {
    const double wj = rep.omegas[j];
    const double lhs = (j + 1) * (rep.gammas[j] * wj - cl.demand.price(wj * mu) / mu);
    const double up = (j + 1 < C) ? rep.gammas[j + 1] * rep.omegas[j + 1] * rep.omegas[j + 1] : 0.0;
    const double rhs = up - rep.gammas[0] * rep.omegas[0] * rep.omegas[0];
    rep.residual = std::max(rep.residual, std::abs(lhs - rhs));
  }
  return rep;
}

}  // namespace erloss
