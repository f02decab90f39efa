#include "erloss/state_space.hpp"

#include <limits>
#include <stdexcept>

namespace erloss {

namespace {
constexpr std::uint64_t kMaxStates = 10'000'000;
}

std::uint64_t state_space::count_states(int C, int M) {
  // binomial(C+M, M) with saturation well above the construction guard
  std::uint64_t n = 1;
  for (int i = 1; i <= M; ++i) {
    n = n * static_cast<std::uint64_t>(C + i) / static_cast<std::uint64_t>(i);
    if (n > 100 * kMaxStates) return n;
  }
  return n;
}

state_space::state_space(int C, int M) : C_(C), M_(M) {
  if (C < 0 || M < 1) throw std::invalid_argument("state_space: need C >= 0, M >= 1");
  const std::uint64_t n = count_states(C, M);
  if (n > kMaxStates)
    throw std::length_error("state_space: more than 10^7 states requested");

  tail_count_.assign(M + 1, std::vector<std::uint64_t>(C + 1, 1));
  for (int m = 1; m <= M; ++m)
    for (int c = 0; c <= C; ++c)
      tail_count_[m][c] = (c > 0 ? tail_count_[m][c - 1] : 0) + tail_count_[m - 1][c];
  // tail_count_[m][c] = binomial(c+m, m): suffixes of length m summing to <= c

  flat_.reserve(n * M);
  occ_.reserve(n);
  std::vector<int> x(M, 0);
  while (true) {
    int s = 0;
    for (int v : x) s += v;
    flat_.insert(flat_.end(), x.begin(), x.end());
    occ_.push_back(s);
    // lexicographic successor with sum <= C
    int j = M - 1;
    while (j >= 0) {
      if (s - x[j] + (x[j] + 1) <= C) {
        ++x[j];
        for (int k = j + 1; k < M; ++k) x[k] = 0;
        break;
      }
      s -= x[j];
      x[j] = 0;
      --j;
    }
    if (j < 0) break;
  }

  up_.assign(size() * M, npos);
  down_.assign(size() * M, npos);
  std::vector<int> y(M);
  for (std::size_t i = 0; i < size(); ++i) {
    auto xi = state(i);
    for (int j = 0; j < M; ++j) {
      if (occ_[i] < C) {
        for (int k = 0; k < M; ++k) y[k] = xi[k];
        ++y[j];
        up_[i * M + j] = index(y);
      }
      if (xi[j] > 0) {
        for (int k = 0; k < M; ++k) y[k] = xi[k];
        --y[j];
        down_[i * M + j] = index(y);
      }
    }
  }
}

std::size_t state_space::index(std::span<const int> x) const {
  if (x.size() != static_cast<std::size_t>(M_))
    throw std::invalid_argument("state_space::index: wrong dimension");
  std::size_t rank = 0;
  int used = 0;
  for (int j = 0; j < M_; ++j) {
    if (x[j] < 0 || used + x[j] > C_)
      throw std::out_of_range("state_space::index: state outside the space");
    // states with a smaller j-th coordinate and the same prefix
    for (int v = 0; v < x[j]; ++v)
      rank += tail_count_[M_ - 1 - j][C_ - used - v];
    used += x[j];
  }
  return rank;
}

}  // namespace erloss
