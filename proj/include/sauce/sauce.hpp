#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <string>

#include "sauce/image.hpp"
#include "sauce/scanner.hpp"
#include "sauce/sparse_image.hpp"

namespace sauce {

/// Learnable weights of the distance function: alpha on scan rate,
/// beta on intensity change, gamma constant.
template <typename Scalar>
struct BasicSamplerParams {
  Scalar alpha = Scalar(1);
  Scalar beta = Scalar(1);
  Scalar gamma = Scalar(0);

  using Vector = Eigen::Matrix<Scalar, 3, 1>;
  Vector as_vector() const { return Vector(alpha, beta, gamma); }
  static BasicSamplerParams from_vector(const Vector& v) { return {v(0), v(1), v(2)}; }
  bool finite() const { return std::isfinite(alpha) && std::isfinite(beta) && std::isfinite(gamma); }
  friend bool operator==(const BasicSamplerParams&, const BasicSamplerParams&) = default;
};

using SamplerParams = BasicSamplerParams<double>;

/// D = alpha * theta_rate + beta * intensity_change + gamma.
template <typename Scalar>
constexpr Scalar distance(Scalar theta_rate, Scalar intensity_change, const BasicSamplerParams<Scalar>& params) {
  return params.alpha * theta_rate + params.beta * intensity_change + params.gamma;
}

/// P = 1 - exp(-D / sigma_sq), with D <= 0 mapped to 0.
template <typename Scalar>
Scalar probability(Scalar d, Scalar sigma_sq) {
  if (!(sigma_sq > Scalar(0))) throw DomainError("variance must be positive");
  if (!(d > Scalar(0))) return Scalar(0);
  return -std::expm1(-d / sigma_sq);
}

/// dP/d(alpha, beta, gamma) with sigma_sq held fixed. Zero where P is clamped.
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 1> probability_gradient(Scalar theta_rate, Scalar intensity_change,
                                                 const BasicSamplerParams<Scalar>& params, Scalar sigma_sq) {
  if (!(sigma_sq > Scalar(0))) throw DomainError("variance must be positive");
  const Scalar d = distance(theta_rate, intensity_change, params);
  if (!(d > Scalar(0))) return Eigen::Matrix<Scalar, 3, 1>::Zero();
  const Scalar w = std::exp(-d / sigma_sq) / sigma_sq;
  return Eigen::Matrix<Scalar, 3, 1>(theta_rate * w, intensity_change * w, w);
}

enum class VarianceMode {
  TwoPass,    // population variance of D over the whole scan
  Streaming,  // running variance over the samples seen so far
};

/// Floor applied to the variance estimate in both modes.
inline constexpr double kVarianceFloor = 1e-8;

struct Heatmap {
  Eigen::ArrayXd p;         // usefulness per sample, in [0, 1]
  double sigma_sq = 1.0;    // variance estimate used (final value in streaming mode)
  Eigen::ArrayXd d_values;  // raw distance trace; entry 0 is 0 and excluded from the variance
  int grid_width = 0;
  int grid_height = 0;

  Eigen::Index size() const { return p.size(); }
  ImageD as_image() const;
};

/// Heatmap of a scan. P(0) = 1 since the first sample has no predecessor.
Heatmap heatmap(const SampleStream& stream, const SamplerParams& params,
                VarianceMode mode = VarianceMode::TwoPass);

/// ln(n / (N - n)).
double samplerate_logit(Eigen::Index n, Eigen::Index total);

/// Shifts the map by the logit of the target samplerate n/N, then rescales
/// affinely to [0, 1]. A flat map becomes 0.5 everywhere. Requires 0 < n < N.
Heatmap normalize(const Heatmap& hmap, Eigen::Index n, Eigen::Index total);

/// Affine map onto [0, 1]; constant input maps to 0.5.
Eigen::ArrayXd rescale01(const Eigen::ArrayXd& values);

struct SampleMask {
  Eigen::Array<bool, Eigen::Dynamic, 1> keep;
  Eigen::Index n = 0;

  Eigen::Index size() const { return keep.size(); }
  double kept_fraction() const { return keep.size() == 0 ? 0.0 : double(n) / double(keep.size()); }
  /// Builds a mask, computing n from the flags.
  static SampleMask from_flags(Eigen::Array<bool, Eigen::Dynamic, 1> flags);
  static SampleMask none(Eigen::Index total);
  static SampleMask all(Eigen::Index total);
};

/// Keeps exactly the n highest scores; ties go to the lower index.
SampleMask top_k(const Eigen::ArrayXd& scores, Eigen::Index n);
SampleMask threshold(const Heatmap& hmap, Eigen::Index n);

/// Per-sample keep probability for stochastic selection at budget n of N:
/// sigmoid(P + ln(n / (N - n))). A sample with P = 0 is kept with probability
/// n/N and larger P raises it.
/// Requires 0 < n < N.
Eigen::ArrayXd keep_probability(const Heatmap& hmap, Eigen::Index n, Eigen::Index total);

/// Independent Bernoulli draw per sample.
SampleMask bernoulli_mask(const Eigen::ArrayXd& probabilities, std::uint64_t seed);

/// The kept samples S_n, positioned on the scan grid.
SparseImage apply_mask(const SampleStream& stream, const SampleMask& mask);

/// Mask file: u32 N, u32 n, then N bits packed LSB-first, little-endian.
void write_mask(const std::string& path, const SampleMask& mask);
SampleMask read_mask(const std::string& path);

/// 8-bit PGM of P on the scan grid.
void write_heatmap_pgm(const std::string& path, const Heatmap& hmap);

/// {"alpha": .., "beta": .., "gamma": ..}
std::string params_to_json(const SamplerParams& params);
SamplerParams params_from_json(const std::string& text);
void write_params(const std::string& path, const SamplerParams& params);
SamplerParams read_params(const std::string& path);

}  // namespace sauce
