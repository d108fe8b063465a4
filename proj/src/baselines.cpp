#include "sauce/baselines.hpp"

#include <cmath>
#include <numeric>
#include <vector>

#include "sauce/rng.hpp"

namespace sauce {
namespace {

void check_budget(Eigen::Index total, Eigen::Index n) {
  if (n < 0 || n > total) throw DomainError("budget must satisfy 0 <= n <= N");
}

double change(const SampleStream& stream, Eigen::Index a, Eigen::Index b) {
  return (stream.values.row(a) - stream.values.row(b)).abs().sum() / double(stream.channels);
}

// Exact-n adjustment: drop highest-index extras, then add lowest-index unkept.
void fit_to_budget(SampleMask& mask, Eigen::Index n) {
  for (Eigen::Index i = mask.size() - 1; i >= 0 && mask.n > n; --i) {
    if (mask.keep(i)) {
      mask.keep(i) = false;
      --mask.n;
    }
  }
  for (Eigen::Index i = 0; i < mask.size() && mask.n < n; ++i) {
    if (!mask.keep(i)) {
      mask.keep(i) = true;
      ++mask.n;
    }
  }
}

}  // namespace

SampleMask uniform_mask(Eigen::Index total, Eigen::Index n) {
  check_budget(total, n);
  SampleMask mask = SampleMask::none(total);
  for (Eigen::Index k = 0; k < n; ++k) {
    mask.keep((2 * k * total + n) / (2 * n)) = true;
  }
  mask.n = mask.keep.count();
  fit_to_budget(mask, n);
  return mask;
}

SampleMask random_mask(Eigen::Index total, Eigen::Index n, std::uint64_t seed) {
  check_budget(total, n);
  std::vector<Eigen::Index> order(static_cast<std::size_t>(total));
  std::iota(order.begin(), order.end(), Eigen::Index(0));
  Rng rng(seed);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto j = k + Eigen::Index(rng.below(std::uint64_t(total - k)));
    std::swap(order[k], order[j]);
  }
  SampleMask mask = SampleMask::none(total);
  for (Eigen::Index k = 0; k < n; ++k) mask.keep(order[k]) = true;
  mask.n = n;
  return mask;
}

SampleMask level_crossing_mask(const SampleStream& stream, double delta) {
  if (stream.empty()) throw InputError("level crossing requires a non-empty stream");
  if (!(delta > 0.0)) throw DomainError("level-crossing delta must be positive");
  SampleMask mask = SampleMask::none(stream.size());
  mask.keep(0) = true;
  Eigen::Index last = 0;
  for (Eigen::Index i = 1; i < stream.size(); ++i) {
    if (change(stream, i, last) >= delta) {
      mask.keep(i) = true;
      last = i;
    }
  }
  mask.n = mask.keep.count();
  return mask;
}

RateMatchedMask level_crossing_at_rate(const SampleStream& stream, Eigen::Index n) {
  if (stream.empty()) throw InputError("level crossing requires a non-empty stream");
  if (n <= 0 || n > stream.size()) throw DomainError("budget must satisfy 0 < n <= N");

  // No change can exceed the value range, so hi keeps only index 0.
  double lo = 0.0;
  double hi = 1.0 + 1e-9;
  RateMatchedMask result{SampleMask::none(stream.size()), hi, false};
  Eigen::Index best_gap = -1;
  for (int iter = 0; iter < 32; ++iter) {
    const double delta = 0.5 * (lo + hi);
    SampleMask mask = level_crossing_mask(stream, delta);
    const Eigen::Index kept = mask.n;
    const Eigen::Index gap = std::abs(kept - n);
    if (best_gap < 0 || gap < best_gap) {
      best_gap = gap;
      result.mask = std::move(mask);
      result.delta = delta;
    }
    if (gap <= 1) break;
    (kept > n ? lo : hi) = delta;
  }
  result.reached = best_gap <= 1;
  fit_to_budget(result.mask, n);
  return result;
}

SampleMask mar_mask(const SampleStream& stream, Eigen::Index n, double rho, std::uint64_t seed) {
  if (stream.empty()) throw InputError("MAR requires a non-empty stream");
  const Eigen::Index total = stream.size();
  if (n <= 0 || n > total) throw DomainError("budget must satisfy 0 < n <= N");
  if (!(rho >= 0.0 && rho <= 1.0)) throw DomainError("random fraction must lie in [0, 1]");

  const auto random_count = static_cast<Eigen::Index>(std::floor(rho * double(n)));
  SampleMask mask = random_mask(total, random_count, seed);

  // Already-chosen samples rank below every candidate so top-k skips them.
  Eigen::ArrayXd gradient(total);
  gradient(0) = 0.0;
  for (Eigen::Index i = 1; i < total; ++i) gradient(i) = change(stream, i, i - 1) * double(stream.channels);
  for (Eigen::Index i = 0; i < total; ++i) {
    if (mask.keep(i)) gradient(i) = -1.0;
  }
  const SampleMask adaptive = top_k(gradient, n - random_count);
  mask.keep = mask.keep || adaptive.keep;
  mask.n = mask.keep.count();
  fit_to_budget(mask, n);
  return mask;
}

}  // namespace sauce
