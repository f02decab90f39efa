#include "erloss/static_policy.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "erloss/loss.hpp"

namespace erloss {

static_policy constructed_static(const instance& inst, const state_space& S,
                                 const dynamic_policy& policy, const full_stationary& pi) {
  const int M = inst.num_classes();
  double full_mass = 0.0;
  for (std::size_t s = 0; s < S.size(); ++s)
    if (S.occupancy(s) >= inst.C) full_mass += pi.probs[s];
  const double open = 1.0 - full_mass;
  if (!(open > 1e-15))
    throw std::domain_error("constructed_static: stationary mass is entirely on full states");

  static_policy out;
  out.rates.assign(M, 0.0);
  for (std::size_t s = 0; s < S.size(); ++s) {
    if (S.occupancy(s) >= inst.C) continue;
    for (int j = 0; j < M; ++j) out.rates[j] += policy.rate(s, j) * pi.probs[s];
  }
  for (int j = 0; j < M; ++j) out.rates[j] /= open;
  return out;
}

double static_revenue(const instance& inst, const static_policy& policy) {
  const int M = inst.num_classes();
  double rho = 0.0, posted = 0.0;
  for (int j = 0; j < M; ++j) {
    rho += policy.rates[j] / inst.classes[j].mu;
    posted += inst.classes[j].demand.revenue(policy.rates[j]);
  }
  return posted * erlang_service_level(inst.C, rho);
}

std::vector<double> static_revenue_gradient(const instance& inst, const static_policy& policy) {
  const int M = inst.num_classes();
  double rho = 0.0, posted = 0.0;
  for (int j = 0; j < M; ++j) {
    rho += policy.rates[j] / inst.classes[j].mu;
    posted += inst.classes[j].demand.revenue(policy.rates[j]);
  }
  const double s_c = erlang_service_level(inst.C, rho);
  const double s_cm1 = erlang_service_level(inst.C - 1, rho);
  // d(service level)/d(rho) = -S_C (S_C - S_{C-1}); both levels come from the
  // relative-precision recursion so the difference survives rho >> C
  std::vector<double> g(M);
  for (int k = 0; k < M; ++k)
    g[k] = s_c * (inst.classes[k].demand.revenue_prime(policy.rates[k]) -
                  posted * (s_c - s_cm1) / inst.classes[k].mu);
  return g;
}

namespace {

double gradient_lipschitz_bound(const instance& inst) {
  const int M = inst.num_classes();
  double max_curv = 0.0, max_slope = 0.0, sum_value = 0.0, min_mu = inst.classes[0].mu;
  for (const auto& cl : inst.classes) {
    const auto n = cl.demand.sup_revenue_norms();
    max_curv = std::max(max_curv, n.curvature);
    max_slope = std::max(max_slope, n.slope);
    sum_value += n.value;
    min_mu = std::min(min_mu, cl.mu);
  }
  return M * (max_curv + 2.0 * max_slope / min_mu + 3.0 * sum_value / (min_mu * min_mu));
}

struct ascent_result {
  std::vector<double> rates;
  double revenue = 0.0;
  double grad_norm = 0.0;
};

ascent_result ascend(const instance& inst, std::vector<double> x, const std::vector<double>& lo,
                     const std::vector<double>& hi, double step0, double tol) {
  const int M = inst.num_classes();
  static_policy sp;
  sp.rates = x;
  double f = static_revenue(inst, sp);
  double step = step0;
  double f_mark = f;

  ascent_result res;
  for (int it = 0; it < 100000; ++it) {
    sp.rates = x;
    const std::vector<double> g = static_revenue_gradient(inst, sp);
    double pg = 0.0;
    for (int j = 0; j < M; ++j) {
      double gj = g[j];
      if (x[j] <= lo[j] && gj < 0.0) gj = 0.0;
      if (x[j] >= hi[j] && gj > 0.0) gj = 0.0;
      pg = std::max(pg, std::abs(gj));
    }
    res.grad_norm = pg;
    if (pg <= tol) break;
    // objective has stopped moving at machine precision: accept where we are
    if (it > 0 && it % 256 == 0) {
      if (f - f_mark <= 1e-15 * std::max(1.0, std::abs(f))) break;
      f_mark = f;
    }

    std::vector<double> xt(M);
    while (true) {
      double ascent = 0.0;
      for (int j = 0; j < M; ++j) {
        xt[j] = std::clamp(x[j] + step * g[j], lo[j], hi[j]);
        ascent += g[j] * (xt[j] - x[j]);
      }
      sp.rates = xt;
      const double ft = static_revenue(inst, sp);
      // The 1e-13 slack keeps last-ulp rounding noise from rejecting the
      // sub-ulp trial moves that occur while the step is still growing out
      // of a conservative 1/L start; without it a single noisy rejection
      // halves the step back into the dead zone for good.
      const double noise = 1e-13 * std::max(1.0, std::abs(f));
      if (ft >= f + 1e-4 * ascent - noise || step < 1e-18 * step0) {
        f = ft;
        break;
      }
      step *= 0.5;
    }
    x = xt;
    step = std::min(step * 2.0, 1e100);
  }
  res.rates = std::move(x);
  res.revenue = f;
  return res;
}

// Newton refinement on the coordinates left free by the box. First-order
// ascent stops once the objective is flat at machine precision, which can
// leave the maximiser itself ~sqrt(eps/curvature) away; the quadratic step
// recovers it to near machine precision so that independent starts agree in
// rate space, not just in revenue.
void polish(const instance& inst, ascent_result& res, const std::vector<double>& lo,
            const std::vector<double>& hi) {
  const int M = inst.num_classes();
  static_policy sp;
  std::vector<double>& x = res.rates;
  sp.rates = x;
  double f = static_revenue(inst, sp);

  for (int round = 0; round < 25; ++round) {
    sp.rates = x;
    const std::vector<double> g = static_revenue_gradient(inst, sp);
    std::vector<int> free_idx;
    for (int j = 0; j < M; ++j) {
      const bool blocked_lo = x[j] <= lo[j] && g[j] <= 0.0;
      const bool blocked_hi = x[j] >= hi[j] && g[j] >= 0.0;
      if (!blocked_lo && !blocked_hi) free_idx.push_back(j);
    }
    if (free_idx.empty()) break;
    const auto F = static_cast<Eigen::Index>(free_idx.size());

    // Hessian of the free block by central differences of the analytic
    // gradient; ~1e-7 relative accuracy, plenty for the final Newton steps.
    Eigen::MatrixXd H(F, F);
    Eigen::VectorXd gf(F);
    for (Eigen::Index a = 0; a < F; ++a) {
      const int j = free_idx[static_cast<std::size_t>(a)];
      gf(a) = g[j];
      const double h = 1.5e-8 * std::max(1.0, std::abs(x[j]));
      sp.rates = x;
      sp.rates[j] = x[j] + h;
      const std::vector<double> gp = static_revenue_gradient(inst, sp);
      sp.rates[j] = x[j] - h;
      const std::vector<double> gm = static_revenue_gradient(inst, sp);
      for (Eigen::Index b = 0; b < F; ++b) {
        const int k = free_idx[static_cast<std::size_t>(b)];
        H(b, a) = (gp[k] - gm[k]) / (2.0 * h);
      }
    }
    H = 0.5 * (H + H.transpose()).eval();

    const Eigen::VectorXd d = H.fullPivLu().solve(-gf);
    if (!d.allFinite()) break;
    if (gf.dot(d) < 0.0) break;  // not an ascent direction: Hessian unusable here

    const double noise = 1e-13 * std::max(1.0, std::abs(f));
    double scale = 1.0;
    bool accepted = false;
    double moved = 0.0;
    for (int trial = 0; trial < 8 && !accepted; ++trial, scale *= 0.5) {
      std::vector<double> xt = x;
      moved = 0.0;
      for (Eigen::Index a = 0; a < F; ++a) {
        const int j = free_idx[static_cast<std::size_t>(a)];
        xt[j] = std::clamp(x[j] + scale * d(a), lo[j], hi[j]);
        moved = std::max(moved, std::abs(xt[j] - x[j]));
      }
      sp.rates = xt;
      const double ft = static_revenue(inst, sp);
      if (ft >= f - noise) {
        x = std::move(xt);
        f = std::max(ft, f);
        accepted = true;
      }
    }
    if (!accepted || moved <= 1e-13 * std::max(1.0, std::abs(x[free_idx[0]]))) break;
  }

  sp.rates = x;
  res.revenue = std::max(f, static_revenue(inst, sp));
  const std::vector<double> g = static_revenue_gradient(inst, sp);
  double pg = 0.0;
  for (int j = 0; j < M; ++j) {
    double gj = g[j];
    if (x[j] <= lo[j] && gj < 0.0) gj = 0.0;
    if (x[j] >= hi[j] && gj > 0.0) gj = 0.0;
    pg = std::max(pg, std::abs(gj));
  }
  res.grad_norm = pg;
}

}  // namespace

static_solve_report optimal_static(const instance& inst, double tol, int starts) {
  inst.validate();
  const int M = inst.num_classes();

  std::vector<double> lo(M), hi(M), peak(M);
  for (int j = 0; j < M; ++j) {
    const auto& d = inst.classes[j].demand;
    hi[j] = d.max_rate();
    peak[j] = d.peak_rate();
    // curves with a revenue jump at zero keep the zero corner out of the box
    lo[j] = d.kind() == demand_kind::reciprocal_tight ? d.rate_floor() : 0.0;
  }

  const double L = gradient_lipschitz_bound(inst);
  const double step0 = 1.0 / L;

  std::vector<std::vector<double>> inits;
  auto scaled = [&](double t) {
    std::vector<double> x(M);
    for (int j = 0; j < M; ++j) x[j] = std::clamp(t * hi[j], lo[j], hi[j]);
    return x;
  };
  inits.push_back(scaled(0.5));
  inits.push_back(scaled(0.25));
  inits.push_back(scaled(0.75));
  inits.push_back(peak);
  inits.push_back(scaled(1e-3));
  while (static_cast<int>(inits.size()) > std::max(1, starts)) inits.pop_back();

  static_solve_report rep;
  rep.lipschitz_bound = L;
  std::vector<ascent_result> results;
  for (const auto& x0 : inits) {
    results.push_back(ascend(inst, x0, lo, hi, step0, tol));
    polish(inst, results.back(), lo, hi);
    ++rep.starts_used;
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i)
    if (results[i].revenue > results[best].revenue) best = i;

  double spread = 0.0;
  for (const auto& r : results)
    for (int j = 0; j < M; ++j)
      spread = std::max(spread, std::abs(r.rates[j] - results[best].rates[j]));
  rep.start_spread = spread;
  if (spread > 1e-4)
    throw std::runtime_error(
        "optimal_static: multistart points disagree beyond 1e-4; stationary point "
        "should be unique for regular demand");

  rep.policy.rates = results[best].rates;
  rep.revenue = results[best].revenue;
  rep.grad_norm = results[best].grad_norm;
  for (int j = 0; j < M; ++j) {
    if (rep.policy.rates[j] <= lo[j] + 1e-12 * hi[j] || rep.policy.rates[j] >= hi[j] * (1.0 - 1e-12))
      rep.boundary_active = true;
  }
  return rep;
}

static_policy fluid_heuristic(const instance& inst, double delta) {
  inst.validate();
  if (!(delta >= 0.0)) throw std::domain_error("fluid_heuristic: delta must be >= 0");
  const int M = inst.num_classes();

  auto rates_at = [&](double theta) {
    std::vector<double> x(M);
    for (int j = 0; j < M; ++j)
      x[j] = inst.classes[j].demand.rate_at_revenue_slope(theta / inst.classes[j].mu);
    return x;
  };
  auto load_of = [&](const std::vector<double>& x) {
    double rho = 0.0;
    for (int j = 0; j < M; ++j) rho += x[j] / inst.classes[j].mu;
    return rho;
  };

  static_policy out;
  out.rates = rates_at(0.0);  // per-class revenue maximisers
  if (load_of(out.rates) <= delta) return out;

  double theta_lo = 0.0, theta_hi = 0.0;
  for (int j = 0; j < M; ++j)
    theta_hi = std::max(theta_hi, inst.classes[j].mu * inst.classes[j].demand.revenue_prime(0.0));
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (theta_lo + theta_hi);
    if (load_of(rates_at(mid)) > delta)
      theta_lo = mid;
    else
      theta_hi = mid;
  }
  out.rates = rates_at(theta_hi);

  // all-or-nothing classes (constant revenue slope) leave a load gap at their
  // critical multiplier; fill them marginally up to the capacity budget
  double residual = delta - load_of(out.rates);
  for (int j = 0; j < M && residual > 0.0; ++j) {
    const auto& cl = inst.classes[j];
    if (cl.demand.kind() != demand_kind::reciprocal_tight) continue;
    const double crit = cl.mu * cl.demand.revenue_prime(0.0);
    if (crit < theta_lo || crit > theta_hi + 1e-9 * (1.0 + theta_hi)) continue;
    const double room = cl.demand.peak_rate() - out.rates[j];
    const double add = std::min(room, residual * cl.mu);
    out.rates[j] += add;
    residual -= add / cl.mu;
  }
  return out;
}

fluid_sweep_result fluid_sweep(const instance& inst, int grid_points) {
  inst.validate();
  if (grid_points < 2) throw std::domain_error("fluid_sweep: need at least 2 grid points");
  fluid_sweep_result best;
  best.best_revenue = -1.0;
  for (int k = 0; k < grid_points; ++k) {
    const double delta = 3.0 * inst.C * k / (grid_points - 1);
    static_policy cand = fluid_heuristic(inst, delta);
    const double rev = static_revenue(inst, cand);
    if (rev > best.best_revenue) {
      best.best_revenue = rev;
      best.best_policy = std::move(cand);
      best.delta_star = delta;
    }
  }
  return best;
}

}  // namespace erloss
