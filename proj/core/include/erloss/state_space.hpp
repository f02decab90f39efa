#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace erloss {

// Enumeration of the class-count states of a capacity-C loss system with M
// customer classes: all x in N^M with x_1 + ... + x_M <= C, in lexicographic
// order. Size is binomial(C+M, M); construction refuses anything above 10^7
// states.
class state_space {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  state_space(int C, int M);

  int capacity() const { return C_; }
  int classes() const { return M_; }
  std::size_t size() const { return occ_.size(); }

  std::span<const int> state(std::size_t idx) const {
    return {flat_.data() + idx * M_, static_cast<std::size_t>(M_)};
  }
  int occupancy(std::size_t idx) const { return occ_[idx]; }

  // Lexicographic rank of a state; throws if out of range.
  std::size_t index(std::span<const int> x) const;

  // Neighbour lookups: state with one more / one fewer class-j unit, or npos
  // when the move is not admissible.
  std::size_t up(std::size_t idx, int j) const { return up_[idx * M_ + j]; }
  std::size_t down(std::size_t idx, int j) const { return down_[idx * M_ + j]; }

  static std::uint64_t count_states(int C, int M);  // binomial(C+M, M), saturating

 private:
  int C_ = 0, M_ = 0;
  std::vector<int> flat_;
  std::vector<int> occ_;
  std::vector<std::size_t> up_, down_;
  // tail_count_[m][c] = number of suffixes of length m with sum <= c
  std::vector<std::vector<std::uint64_t>> tail_count_;
};

}  // namespace erloss
