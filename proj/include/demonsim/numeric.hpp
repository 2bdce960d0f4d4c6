#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace demonsim {

/// Neumaier-compensated accumulator. All ensemble reductions in the library
/// run through this in a fixed term order so results are bit-reproducible.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  CompensatedSum& operator+=(double x) {
    add(x);
    return *this;
  }

  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline double compensated_total(const std::vector<double>& xs) {
  CompensatedSum acc;
  for (double x : xs) acc.add(x);
  return acc.value();
}

/// Counter-based random stream: the SplitMix64 output function applied to
/// (seed, counter). Stateless, so any draw can be reproduced from its index
/// alone and sampling order never depends on scheduling.
inline std::uint64_t mix64(std::uint64_t seed, std::uint64_t counter) {
  std::uint64_t z = seed + (counter + 1) * 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline double uniform_from_bits(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// One trajectory's private stream, carved out of the root seed by index.
/// Each trajectory owns a fixed-size block of counters, so streams never
/// overlap no matter how many draws a single trajectory consumes (up to the
/// stride).
class CounterRng {
 public:
  static constexpr std::uint64_t kDrawsPerTrajectory = 16;

  CounterRng(std::uint64_t seed, std::uint64_t trajectory_index)
      : seed_(seed), base_(trajectory_index * kDrawsPerTrajectory) {}

  double uniform() { return uniform_from_bits(mix64(seed_, base_ + next_++)); }

 private:
  std::uint64_t seed_;
  std::uint64_t base_;
  std::uint64_t next_ = 0;
};

/// Inverse-CDF draw over a weight row that sums to 1. The final bucket
/// absorbs rounding residue.
inline std::size_t draw_index(const std::vector<double>& weights, double u) {
  double cumulative = 0.0;
  for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
    cumulative += weights[i];
    if (u < cumulative) return i;
  }
  return weights.empty() ? 0 : weights.size() - 1;
}

}  // namespace demonsim
