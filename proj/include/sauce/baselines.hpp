#pragma once

#include <cstdint>

#include "sauce/sauce.hpp"
#include "sauce/scanner.hpp"

namespace sauce {

/// Keeps indices round(k*N/n), k = 0..n-1 (half rounds up).
SampleMask uniform_mask(Eigen::Index total, Eigen::Index n);

/// Uniformly random n-subset from a seeded partial Fisher-Yates shuffle.
SampleMask random_mask(Eigen::Index total, Eigen::Index n, std::uint64_t seed);

/// Event-driven sampler: keeps index 0, then every sample whose mean absolute
/// change from the last kept sample reaches `delta`.
SampleMask level_crossing_mask(const SampleStream& stream, double delta);

struct RateMatchedMask {
  SampleMask mask;
  double delta = 0.0;
  // False when no delta came within one sample of the budget and the mask
  // had to be padded or trimmed by index order.
  bool reached = true;
};

/// Bisects the level-crossing threshold (at most 32 steps) until the kept
/// count is within one of n, then drops the highest-index extras or adds the
/// lowest-index missing samples to hit n exactly.
RateMatchedMask level_crossing_at_rate(const SampleStream& stream, Eigen::Index n);

inline constexpr double kDefaultMarRandomFraction = 0.5;

/// Mixed adaptive-random: floor(rho*n) random samples, the rest of the
/// budget on the largest |value(i) - value(i-1)|_1.
SampleMask mar_mask(const SampleStream& stream, Eigen::Index n, double rho, std::uint64_t seed);

}  // namespace sauce
