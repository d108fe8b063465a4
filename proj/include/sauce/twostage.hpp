#pragma once

#include "sauce/image.hpp"
#include "sauce/sauce.hpp"
#include "sauce/scanner.hpp"
#include "sauce/sparse_image.hpp"

namespace sauce {

struct TwoStageConfig {
  int downscale = 2;                   // first-pass footprint, in source pixels
  Eigen::Index second_pass_budget = 0; // full-resolution samples in the second pass
  SamplerParams params;
  // Feed the first-pass samples to reconstruction alongside the second pass.
  bool reuse_first_pass = true;

  void validate(Eigen::Index total) const;
};

struct FirstPass {
  SampleStream stream;  // low resolution, one sample per downscale x downscale block
  Heatmap heatmap;
};

/// Full scan with a `downscale`-pixel footprint at the no-overlap samplerate;
/// edge blocks that overhang the image are averaged over their clipped area.
FirstPass first_pass(const ImageD& image, const TwoStageConfig& config);

/// Bilinear interpolation of a grid of values at continuous grid coordinates,
/// clamped to the grid.
double bilinear_sample(const Eigen::ArrayXd& grid, int grid_width, int grid_height, double row, double col);

/// Bilinear upsampling onto a width x height grid, where low-resolution cell
/// (R, C) is centred on full-resolution coordinate (R*f + (f-1)/2, C*f + (f-1)/2).
Heatmap upsample_heatmap(const Heatmap& low, int downscale, int width, int height);
Heatmap upsample_heatmap(const Heatmap& low, int downscale);

struct TwoStageResult {
  FirstPass first;
  Heatmap upsampled;
  SampleMask mask;  // second-pass mask over the full-resolution scan
  Eigen::Index first_pass_samples = 0;
  double effective_rate = 0.0;  // (first-pass samples + second-pass samples) / N
};

TwoStageResult two_stage_mask(const ImageD& image, const TwoStageConfig& config);

/// Second-pass samples plus (optionally) first-pass samples placed at the
/// pixel nearest their block centre; second-pass values win on collisions.
SparseImage two_stage_samples(const ImageD& image, const TwoStageResult& result, const TwoStageConfig& config);

}  // namespace sauce
