#include "sauce/twostage.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace sauce {

void TwoStageConfig::validate(Eigen::Index total) const {
  if (downscale < 2) throw DomainError("two-stage downscale factor must be at least 2");
  if (second_pass_budget < 0 || second_pass_budget > total) {
    throw DomainError("second-pass budget must satisfy 0 <= n2 <= N");
  }
  if (!params.finite()) throw DomainError("sampler parameters must be finite");
}

FirstPass first_pass(const ImageD& image, const TwoStageConfig& config) {
  config.validate(image.pixel_count());
  const ScanConfig scan_config = ScanConfig::at_bound(image.width(), image.height(), config.downscale);
  FirstPass out;
  out.stream = scan(image, scan_config);
  out.heatmap = heatmap(out.stream, config.params, VarianceMode::TwoPass);
  return out;
}

double bilinear_sample(const Eigen::ArrayXd& grid, int grid_width, int grid_height, double row, double col) {
  if (grid.size() != Eigen::Index(grid_width) * grid_height || grid.size() == 0) {
    throw InputError("grid dimensions do not match its values");
  }
  row = std::clamp(row, 0.0, double(grid_height - 1));
  col = std::clamp(col, 0.0, double(grid_width - 1));
  const int r0 = int(std::floor(row));
  const int c0 = int(std::floor(col));
  const int r1 = std::min(r0 + 1, grid_height - 1);
  const int c1 = std::min(c0 + 1, grid_width - 1);
  const double fr = row - r0;
  const double fc = col - c0;
  auto at = [&](int r, int c) { return grid(Eigen::Index(r) * grid_width + c); };
  return (1 - fr) * ((1 - fc) * at(r0, c0) + fc * at(r0, c1)) + fr * ((1 - fc) * at(r1, c0) + fc * at(r1, c1));
}

Heatmap upsample_heatmap(const Heatmap& low, int downscale, int width, int height) {
  if (downscale < 1) throw DomainError("downscale factor must be positive");
  if (low.size() != Eigen::Index(low.grid_width) * low.grid_height || low.size() == 0) {
    throw InputError("low-resolution heatmap dimensions are inconsistent");
  }
  if ((width + downscale - 1) / downscale != low.grid_width || (height + downscale - 1) / downscale != low.grid_height) {
    throw InputError("target dimensions are inconsistent with the low-resolution grid");
  }
  Heatmap up;
  up.grid_width = width;
  up.grid_height = height;
  up.sigma_sq = low.sigma_sq;
  up.p.resize(Eigen::Index(width) * height);
  const bool has_d = low.d_values.size() == low.p.size();
  up.d_values.resize(has_d ? up.p.size() : 0);
  const double offset = 0.5 * (downscale - 1);
  for (int r = 0; r < height; ++r) {
    const double lr = (r - offset) / downscale;
    for (int c = 0; c < width; ++c) {
      const double lc = (c - offset) / downscale;
      const Eigen::Index i = Eigen::Index(r) * width + c;
      up.p(i) = std::clamp(bilinear_sample(low.p, low.grid_width, low.grid_height, lr, lc), 0.0, 1.0);
      if (has_d) up.d_values(i) = bilinear_sample(low.d_values, low.grid_width, low.grid_height, lr, lc);
    }
  }
  return up;
}

Heatmap upsample_heatmap(const Heatmap& low, int downscale) {
  return upsample_heatmap(low, downscale, low.grid_width * downscale, low.grid_height * downscale);
}

TwoStageResult two_stage_mask(const ImageD& image, const TwoStageConfig& config) {
  const Eigen::Index total = image.pixel_count();
  config.validate(total);
  TwoStageResult out;
  out.first = first_pass(image, config);
  out.upsampled = upsample_heatmap(out.first.heatmap, config.downscale, image.width(), image.height());
  const Eigen::Index n2 = config.second_pass_budget;
  // The samplerate shift is undefined at n2 in {0, N}; normalization is
  // order-preserving, so selection is unaffected either way.
  out.mask = (n2 > 0 && n2 < total) ? threshold(normalize(out.upsampled, n2, total), n2) : threshold(out.upsampled, n2);
  out.first_pass_samples = out.first.stream.size();
  out.effective_rate = double(out.first_pass_samples + n2) / double(total);
  return out;
}

SparseImage two_stage_samples(const ImageD& image, const TwoStageResult& result, const TwoStageConfig& config) {
  const SampleStream full = scan(image, ScanConfig::at_bound(image.width(), image.height()));
  SparseImage sparse = apply_mask(full, result.mask);
  if (!config.reuse_first_pass) return sparse;

  std::vector<char> taken(static_cast<std::size_t>(image.pixel_count()), 0);
  for (const GridPosition& pos : sparse.positions) taken[std::size_t(pos.row) * image.width() + pos.col] = 1;

  const SampleStream& low = result.first.stream;
  const int f = config.downscale;
  std::vector<GridPosition> extra_pos;
  std::vector<Eigen::Index> extra_src;
  for (Eigen::Index k = 0; k < low.size(); ++k) {
    const int lr = int(k / low.grid_width);
    const int lc = int(k % low.grid_width);
    const GridPosition pos{std::min(lr * f + (f - 1) / 2, image.height() - 1),
                           std::min(lc * f + (f - 1) / 2, image.width() - 1)};
    char& flag = taken[std::size_t(pos.row) * image.width() + pos.col];
    if (flag) continue;
    flag = 1;
    extra_pos.push_back(pos);
    extra_src.push_back(k);
  }
  const Eigen::Index base = sparse.size();
  sparse.values.conservativeResize(base + Eigen::Index(extra_pos.size()), sparse.channels);
  for (std::size_t j = 0; j < extra_pos.size(); ++j) {
    sparse.positions.push_back(extra_pos[j]);
    sparse.values.row(base + Eigen::Index(j)) = low.values.row(extra_src[j]);
  }
  return sparse;
}

}  // namespace sauce
