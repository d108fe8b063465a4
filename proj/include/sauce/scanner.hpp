#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <vector>

#include "sauce/image.hpp"

namespace sauce {

enum class ScanPattern { Raster };

/// Sensor geometry and motion for a raster-scanning single-pixel camera.
///
/// Angles are in degrees. The footprint of one sample spans
/// round(acceptance_angle / pixel_pitch) source pixels in both directions;
/// along a scan line the footprint advances angular_velocity / samplerate
/// degrees per sample. Scan lines are spaced one footprint apart, so only the
/// samplerate controls overlap, and only along the scan direction.
struct ScanConfig {
  int width = 0;
  int height = 0;
  double acceptance_angle = 1.0;  // degrees
  double angular_velocity = 1.0;  // degrees / second
  double samplerate = 1.0;        // hertz
  double pixel_pitch = 0.0;       // degrees per source pixel; <= 0 means "equal to acceptance_angle"
  ScanPattern pattern = ScanPattern::Raster;
  // Replace the flyback jump with the in-row step when computing scan rates.
  bool clamp_flyback = false;

  double pitch() const { return pixel_pitch > 0.0 ? pixel_pitch : acceptance_angle; }
  int footprint_px() const;
  /// Footprint advance per sample, in source pixels.
  double step_px() const;
  /// Degrees the footprint advances per sample (angular_velocity / samplerate).
  double step_degrees() const { return angular_velocity / samplerate; }
  int samples_per_line() const;
  int line_count() const;
  Eigen::Index sample_count() const { return Eigen::Index(samples_per_line()) * line_count(); }

  /// Throws DomainError when any invariant is violated.
  void validate() const;

  /// Footprint `footprint` px, samplerate `rate_multiple` times the no-overlap bound.
  static ScanConfig at_bound(int width, int height, int footprint = 1, double rate_multiple = 1.0);
};

/// Smallest supported footprint advance (in pixels); bounds the samplerate.
inline constexpr double kMinStepPx = 1.0 / 64.0;

/// Largest samplerate without footprint overlap: angular_velocity / acceptance_angle.
double max_samplerate(double angular_velocity, double acceptance_angle);

/// Source-pixel rectangle covered by one footprint, half-open and clipped.
struct Footprint {
  int row_begin, row_end;
  int col_begin, col_end;
};

Footprint footprint(const ScanConfig& config, int line, int sample_in_line);

struct ScanPoint {
  std::uint32_t index = 0;
  double row = 0.0;    // footprint centre, source-pixel coordinates
  double col = 0.0;
  double theta = 0.0;  // horizontal scan angle, degrees
};

/// The ordered set of all potential samples of one scan. Sample i lies at
/// grid cell (i / grid_width, i % grid_width).
struct SampleStream {
  int grid_width = 0;
  int grid_height = 0;
  int channels = 1;
  double pitch = 1.0;  // degrees per source pixel, used for flyback distances
  bool clamp_flyback = false;
  double step_degrees = 1.0;
  std::vector<ScanPoint> points;
  Eigen::ArrayXXd values;  // size() x channels

  Eigen::Index size() const { return Eigen::Index(points.size()); }
  bool empty() const { return points.empty(); }
  /// Sample values laid out on the scan grid.
  ImageD as_image() const;
};

/// Raster-scans `image`; each sample is the mean of the source pixels inside
/// its (border-clipped) footprint.
SampleStream scan(const ImageD& image, const ScanConfig& config);

/// Number of samples whose footprint covers each source pixel.
Eigen::ArrayXXi footprint_coverage(const ScanConfig& config);

/// Per-sample scan rate (degrees per sample interval) and intensity change
/// (mean absolute per-channel change). Entry 0 has no predecessor and is NaN
/// in both arrays.
struct ScanDeltas {
  Eigen::ArrayXd theta_rate;
  Eigen::ArrayXd intensity_change;
};

ScanDeltas scan_deltas(const SampleStream& stream);

/// Binary "SPSC" stream file, little-endian.
void write_stream(const std::string& path, const SampleStream& stream);
SampleStream read_stream(const std::string& path);

}  // namespace sauce
