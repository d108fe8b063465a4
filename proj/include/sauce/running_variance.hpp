#pragma once

#include <cstdint>

namespace sauce {

// Welford's online mean/variance.
template <typename Scalar = double>
class RunningVariance {
 public:
  void push(Scalar x) {
    ++count_;
    const Scalar delta = x - mean_;
    mean_ += delta / Scalar(count_);
    m2_ += delta * (x - mean_);
  }

  std::uint64_t count() const { return count_; }
  Scalar mean() const { return mean_; }
  Scalar population_variance() const { return count_ > 0 ? m2_ / Scalar(count_) : Scalar(0); }
  Scalar sample_variance() const { return count_ > 1 ? m2_ / Scalar(count_ - 1) : Scalar(0); }

 private:
  std::uint64_t count_ = 0;
  Scalar mean_ = Scalar(0);
  Scalar m2_ = Scalar(0);
};

}  // namespace sauce
