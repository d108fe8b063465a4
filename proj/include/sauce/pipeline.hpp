#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "sauce/image.hpp"
#include "sauce/sauce.hpp"
#include "sauce/scanner.hpp"
#include "sauce/sparse_image.hpp"

namespace sauce {

enum class SamplerKind { Sauce, Uniform, Random, LevelCrossing, Mar, TwoStage };

/// A sampler plus its structural options, e.g. "sauce", "mar:rho=0.25", "twostage:f=3".
struct SamplerSpec {
  SamplerKind kind = SamplerKind::Sauce;
  int downscale = 2;    // twostage only
  double rho = 0.5;     // mar only

  std::string name() const;
  static SamplerSpec parse(const std::string& text);
};

enum class SelectionMode { TopK, Bernoulli };
enum class FillMode { Nearest, Zero };

struct SamplingOptions {
  SamplerParams params;
  SelectionMode selection = SelectionMode::TopK;
  FillMode fill = FillMode::Nearest;
  VarianceMode variance = VarianceMode::TwoPass;
  // Apply the samplerate shift before selection (SAUCE only).
  bool normalize = true;
};

/// n = round(rate * N), at least 1. Rates outside (0, 1] raise DomainError.
Eigen::Index budget_for_rate(double rate, Eigen::Index total);

/// SAUCE selection at budget n over a heatmap of N samples, honouring the
/// selection mode and normalization flag.
SampleMask select_samples(const Heatmap& hmap, Eigen::Index n, const SamplingOptions& options, std::uint64_t seed);

struct SampledImage {
  ImageD image;       // what the task sees: the reconstruction from kept samples
  SampleMask mask;    // full-resolution mask
  SparseImage sparse;
  Eigen::Index budget = 0;
  double achieved_rate = 0.0;  // samples actually taken / N, both passes for twostage
  std::optional<Heatmap> heatmap;  // sauce: the raw map; twostage: the upsampled first-pass map
  Eigen::Index first_pass_samples = 0;
};

/// Scans `image` at full resolution (one sample per pixel), selects samples
/// with `sampler` at `rate`, and reconstructs. At rate 1 every sampler keeps
/// the whole scan, so the output equals the input.
SampledImage sample_image(const ImageD& image, const SamplerSpec& sampler, double rate,
                          const SamplingOptions& options, std::uint64_t seed);

/// Same, for an existing scan; the two-stage sampler treats the scan grid as
/// its full-resolution image.
SampledImage sample_stream(const SampleStream& stream, const SamplerSpec& sampler, double rate,
                           const SamplingOptions& options, std::uint64_t seed);

ImageD fill(const SparseImage& sparse, FillMode mode);

}  // namespace sauce
