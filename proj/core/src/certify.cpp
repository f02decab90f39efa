#include "erloss/certify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>
#include <tuple>

#include "erloss/loss.hpp"
#include "erloss/parallel.hpp"

namespace erloss {

const char* to_string(certify_method m) {
  switch (m) {
    case certify_method::case1: return "case1";
    case certify_method::case2: return "case2";
    case certify_method::box_bruteforce: return "box_bruteforce";
    case certify_method::closed_form_c2: return "closed_form_c2";
    case certify_method::regular_G: return "regular_G";
  }
  return "?";
}

namespace {

void require_c_range(int C) {
  if (C < 3 || C > 47) throw std::domain_error("certify: capacity must be in [3, 47]");
}

// Lowest admissible value of the last rate ratio within a box; pessimistic
// corners throughout, except that the subtracted w_{C-2} term takes the
// upper corner.
double omega_hat(int C, double w0_lo, double w3_lo, double w2_lo, double w2_hi) {
  const double t1 =
      (C * (C - 1.0) * w2_lo + w0_lo * w2_lo) / (C * w2_lo + C * (C - 1.0));
  const double t2 = w3_lo * (1.0 + 2.0 * w0_lo / (C * (C - 2.0)) - w2_hi / (C - 2.0));
  return std::min(std::max(t1, t2), w2_lo);
}

// Top-probability prefix of the C-level birth-death chain whose first C-2
// birth ratios are (w0, w3, w3, ..., w3); unit service rate per busy unit.
double alpha_prefix(int C, double w0, double w3) {
  double t = w0 / (1.0 + w0);
  for (int k = 2; k <= C - 2; ++k) {
    const double u = (w3 / k) * t;
    t = u / (1.0 + u);
  }
  return t;
}

double alpha_finish(int C, double t, double w2, double what) {
  double u = (w2 / (C - 1.0)) * t;
  t = u / (1.0 + u);
  u = (what / C) * t;
  t = u / (1.0 + u);
  return 1.0 - t;  // probability of not being saturated
}

// Running (top probability, mean) of the chain truncated at C-1 whose first
// C-2 birth ratios are (w0 repeated C-3 times, then w3).
struct tm_pair {
  double t = 1.0;
  double m = 0.0;
};

tm_pair beta_prefix(int C, double w0, double w3) {
  tm_pair p;
  for (int k = 1; k <= C - 3; ++k) {
    const double u = (w0 / k) * p.t;
    p.m = (p.m + k * u) / (1.0 + u);
    p.t = u / (1.0 + u);
  }
  const double u = (w3 / (C - 2.0)) * p.t;
  p.m = (p.m + (C - 2.0) * u) / (1.0 + u);
  p.t = u / (1.0 + u);
  return p;
}

double beta_finish(int C, tm_pair p, double w2) {
  const double u = (w2 / (C - 1.0)) * p.t;
  return (p.m + (C - 1.0) * u) / (1.0 + u);
}

double box_value(int C, double a2, double b2) {
  const double w = C * (1.0 / a2 - 1.0) + b2;
  return (1.0 / a2) * erlang_service_level(C, w);
}

struct box_min {
  double value = std::numeric_limits<double>::infinity();
  int i = -1, j = -1, k = -1;

  void consider(double v, int ii, int jj, int kk) {
    if (v < value) {
      value = v;
      i = ii;
      j = jj;
      k = kk;
    }
  }
  void merge(const box_min& o) {
    if (o.value < value ||
        (o.value == value && std::tie(o.i, o.j, o.k) < std::tie(i, j, k)))
      *this = o;
  }
};

}  // namespace

double closed_form_case1(int C) {
  require_c_range(C);
  return erlang_service_level(C, C - 2.7);
}

double closed_form_case2(int C) {
  require_c_range(C);
  return (1.0 + 4.0 / C) * erlang_service_level(C, C + 3.0);
}

certificate certify_box(int C, int N) {
  require_c_range(C);
  if (N < 10) throw std::domain_error("certify_box: N must be >= 10");
  const auto t_start = std::chrono::steady_clock::now();

  const double ax_lo0 = C - 2.7;
  const double ax_hi = (C + 3.0) * C;
  const double ax_lom = 2.0 * (C - 2.7) / C;
  const double step0 = (ax_hi - ax_lo0) / N;
  const double stepm = (ax_hi - ax_lom) / N;
  auto g0 = [&](int i) { return ax_lo0 + step0 * i; };
  auto gm = [&](int j) { return ax_lom + stepm * j; };
  // conservative first index with gm(k+1) >= threshold
  auto first_at_least = [&](double threshold) {
    return std::max(0, static_cast<int>(std::floor((threshold - ax_lom) / stepm)) - 1);
  };

  auto scan_slice = [&](int i_begin, int i_end, box_min& out) {
    for (int i = i_begin; i < i_end; ++i) {
      const double w0l = g0(i), w0h = g0(i + 1);
      if (C == 3) {
        // two free coordinates; w_{C-3} is identified with w0 box-wise
        const double ta = alpha_prefix(C, w0l, w0l);
        const tm_pair tb = beta_prefix(C, w0h, w0h);
        for (int k = first_at_least(2.0 * w0l / C); k < N; ++k) {
          const double w2l = gm(k), w2h = gm(k + 1);
          if (w2l > w0h) break;                  // order w0 >= w2 unattainable
          if ((C / 2.0) * w2h < w0l) continue;   // capacity mix unattainable
          const double what = omega_hat(C, w0l, w0l, w2l, w2h);
          const double v = box_value(C, alpha_finish(C, ta, w2l, what),
                                     beta_finish(C, tb, w2h));
          out.consider(v, i, i, k);
        }
        continue;
      }
      for (int j = first_at_least(3.0 * w0l / C); j < N; ++j) {
        const double w3l = gm(j), w3h = gm(j + 1);
        if (w3l > w0h) break;                    // order w0 >= w3 unattainable
        if ((C / 3.0) * w3h < w0l) continue;
        const double ta = alpha_prefix(C, w0l, w3l);
        const tm_pair tb = beta_prefix(C, w0h, w3h);
        for (int k = first_at_least(2.0 * w0l / C); k < N; ++k) {
          const double w2l = gm(k), w2h = gm(k + 1);
          if (w2l > w3h) break;                  // order w3 >= w2 unattainable
          if ((C / 2.0) * w2h < w0l) continue;
          const double what = omega_hat(C, w0l, w3l, w2l, w2h);
          const double v = box_value(C, alpha_finish(C, ta, w2l, what),
                                     beta_finish(C, tb, w2h));
          out.consider(v, i, j, k);
        }
      }
    }
  };

  const int workers = std::min(worker_count(), N);
  box_min best;
  if (workers <= 1) {
    scan_slice(0, N, best);
  } else {
    std::vector<box_min> partial(workers);
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      const int b = N * w / workers, e = N * (w + 1) / workers;
      pool.emplace_back(scan_slice, b, e, std::ref(partial[w]));
    }
    for (auto& th : pool) th.join();
    for (const auto& p : partial) best.merge(p);
  }
  if (!std::isfinite(best.value))
    throw std::runtime_error("certify_box: no feasible box found");

  certificate cert;
  cert.C = C;
  cert.method = certify_method::box_bruteforce;
  cert.lower_bound = best.value;
  cert.grid_N = N;
  cert.argmin_box = {g0(best.i), C == 3 ? g0(best.j) : gm(best.j), gm(best.k)};
  cert.runtime_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return cert;
}

double ratio_at_point(int C, double w0, double w_cm3, double w_cm2) {
  require_c_range(C);
  if (C == 3) w_cm3 = w0;
  const double what = omega_hat(C, w0, w_cm3, w_cm2, w_cm2);
  const double a2 = alpha_finish(C, alpha_prefix(C, w0, w_cm3), w_cm2, what);
  const double b2 = beta_finish(C, beta_prefix(C, w0, w_cm3), w_cm2);
  return box_value(C, a2, b2);
}

bool point_feasible(int C, double w0, double w_cm3, double w_cm2) {
  require_c_range(C);
  if (C == 3) w_cm3 = w0;
  const double lo0 = C - 2.7, hi = (C + 3.0) * C, lom = 2.0 * (C - 2.7) / C;
  return w0 >= lo0 && w0 <= hi && w_cm3 >= lom && w_cm3 <= hi && w_cm2 >= lom &&
         w_cm2 <= hi && w0 >= w_cm3 && w_cm3 >= w_cm2 && (C / 2.0) * w_cm2 >= w0 &&
         (C / 3.0) * w_cm3 >= w0;
}

mhr_guarantee_result mhr_guarantee(int N, int c_max) {
  if (c_max < 3 || c_max > 47)
    throw std::domain_error("mhr_guarantee: c_max must lie in [3, 47]");
  mhr_guarantee_result res;
  res.tail = guarantee_G(48);
  res.overall = res.tail;
  res.argmin_C = 48;
  for (int C = 3; C <= c_max; ++C) {
    mhr_row row;
    row.C = C;
    row.case1 = closed_form_case1(C);
    row.case2 = closed_form_case2(C);
    row.box = certify_box(C, N);
    row.combined = std::min({row.case1, row.case2, row.box.lower_bound});
    if (row.combined < res.overall) {
      res.overall = row.combined;
      res.argmin_C = C;
    }
    res.rows.push_back(std::move(row));
  }
  return res;
}

namespace {

template <class F>
scalar_min golden_min(F f, double lo, double hi, int iters) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    }
  }
  const double x = 0.5 * (a + b);
  return {f(x), x};
}

// coarse log-spaced scan over [lo, hi] to bracket the global dip
template <class F>
std::pair<double, double> bracket_min(F f, double lo, double hi, int points) {
  const double ratio = std::log(hi / lo);
  std::vector<double> xs(points);
  for (int i = 0; i < points; ++i) xs[i] = lo * std::exp(ratio * i / (points - 1));
  int best_i = 0;
  double best_f = f(xs[0]);
  for (int i = 1; i < points; ++i) {
    const double fi = f(xs[i]);
    if (fi < best_f) {
      best_f = fi;
      best_i = i;
    }
  }
  return {xs[std::max(0, best_i - 1)], xs[std::min(points - 1, best_i + 1)]};
}

}  // namespace

scalar_min c2_mhr_bound() {
  auto num = [](double w) {
    return ((((((w + 12) * w + 50) * w + 90) * w + 84) * w + 40) * w + 8);
  };
  auto den = [](double w) {
    return ((((((w + 12) * w + 52) * w + 92) * w + 84) * w + 40) * w + 8);
  };
  auto f = [&](double w) { return num(w) / den(w); };
  auto [lo, hi] = bracket_min(f, 1e-6, 1e3, 4000);
  scalar_min res = golden_min(f, lo, hi, 200);

  // stationary-point polish: bisect num' den - num den' (exact polynomials)
  auto nump = [](double w) {
    return (((((6 * w + 60) * w + 200) * w + 270) * w + 168) * w + 40);
  };
  auto denp = [](double w) {
    return (((((6 * w + 60) * w + 208) * w + 276) * w + 168) * w + 40);
  };
  auto g = [&](double w) { return nump(w) * den(w) - num(w) * denp(w); };
  double a = std::max(lo, res.argmin - 1e-2), b = std::min(hi, res.argmin + 1e-2);
  if (g(a) < 0.0 && g(b) > 0.0) {
    for (int i = 0; i < 200; ++i) {
      const double m = 0.5 * (a + b);
      (g(m) < 0.0 ? a : b) = m;
    }
    res.argmin = 0.5 * (a + b);
    res.bound = f(res.argmin);
  }
  return res;
}

scalar_min c2_uniform_bound() {
  auto f = [](double w) {
    const double s = std::sqrt(2.0 * w * w + 8.0 * w + 4.0);
    const double q = std::sqrt(w * w + 4.0 * w + 2.0);
    const double numer =
        (w + 2.0) * q * (w * w - w - 2.0 + s) * (2.0 * w + 2.0 + w * s);
    const double quartic = ((((w + 4.0) * w + 6.0) * w + 8.0) * w + 4.0);
    const double denom =
        std::sqrt(2.0) * w * (1.0 + w) * (quartic + 2.0 * w * w * s + 2.0 * w * s);
    return numer / denom;
  };
  auto [lo, hi] = bracket_min(f, 1e-6, 1e3, 4000);
  scalar_min res = golden_min(f, lo, hi, 200);

  // stationary-point polish by successive parabolic interpolation
  double h = 1e-4;
  for (int i = 0; i < 40; ++i) {
    const double fl = f(res.argmin - h), fc = f(res.argmin), fr = f(res.argmin + h);
    const double denom = fl - 2.0 * fc + fr;
    if (denom <= 0.0) break;
    const double shift = 0.5 * h * (fl - fr) / denom;
    if (std::abs(shift) < h) res.argmin += shift;
    h *= 0.5;
  }
  res.bound = f(res.argmin);
  return res;
}

std::vector<constraint_violation> rate_structure_check(std::span<const double> omega, int C,
                                                       double tol) {
  if (static_cast<int>(omega.size()) != C)
    throw std::invalid_argument("rate_structure_check: omega must have C entries");
  std::vector<constraint_violation> out;
  for (int j = 0; j + 1 < C; ++j) {
    const double slack = omega[j] - omega[j + 1];
    if (slack < -tol) out.push_back({"order", j, slack, false});
  }
  for (int j = 0; j <= C - 2; ++j) {
    if (omega[j] == 0.0) {
      out.push_back({"rate_mix", j, std::numeric_limits<double>::infinity(), true});
      continue;
    }
    const double lhs = omega[j + 1] / (j + 1.0) + omega[C - 1] / omega[j];
    const double rhs = 1.0 + (C - j - 1.0) * omega[0] / (C * (j + 1.0));
    const double slack = lhs - rhs;
    if (slack < -tol) out.push_back({"rate_mix", j, slack, false});
  }
  return out;
}

}  // namespace erloss
