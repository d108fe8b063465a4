#include "sauce/scanner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "sauce/binary_io.hpp"

namespace sauce {
namespace {

// Guards ceil() against representation error when the scan ends exactly on the border.
constexpr double kCountSlack = 1e-9;

}  // namespace

double max_samplerate(double angular_velocity, double acceptance_angle) {
  if (!(angular_velocity > 0.0) || !(acceptance_angle > 0.0)) {
    throw DomainError("angular velocity and acceptance angle must be positive");
  }
  return angular_velocity / acceptance_angle;
}

int ScanConfig::footprint_px() const { return int(std::lround(acceptance_angle / pitch())); }

double ScanConfig::step_px() const { return step_degrees() / pitch(); }

int ScanConfig::samples_per_line() const {
  const int f = footprint_px();
  if (width <= f) return 1;
  return int(std::ceil((width - f) / step_px() - kCountSlack)) + 1;
}

int ScanConfig::line_count() const {
  const int f = footprint_px();
  return (height + f - 1) / f;
}

void ScanConfig::validate() const {
  if (width < 1 || height < 1) throw DomainError("scan dimensions must be at least 1x1");
  if (!(acceptance_angle > 0.0) || !(angular_velocity > 0.0) || !(samplerate > 0.0)) {
    throw DomainError("acceptance angle, angular velocity and samplerate must be positive");
  }
  if (!std::isfinite(acceptance_angle) || !std::isfinite(angular_velocity) || !std::isfinite(samplerate)) {
    throw DomainError("scan parameters must be finite");
  }
  if (footprint_px() < 1) throw DomainError("footprint must cover at least one pixel");
  if (step_px() < kMinStepPx) throw DomainError("samplerate exceeds the supported maximum");
}

ScanConfig ScanConfig::at_bound(int width, int height, int footprint, double rate_multiple) {
  ScanConfig config;
  config.width = width;
  config.height = height;
  config.pixel_pitch = 1.0;
  config.acceptance_angle = double(footprint);
  config.angular_velocity = double(footprint);
  config.samplerate = rate_multiple * max_samplerate(config.angular_velocity, config.acceptance_angle);
  return config;
}

Footprint footprint(const ScanConfig& config, int line, int sample_in_line) {
  const int f = config.footprint_px();
  const double start = sample_in_line * config.step_px();
  // A pixel belongs to the footprint when its centre lies in [start, start + f).
  const int col_begin = int(std::ceil(start - 0.5));
  const int col_end = int(std::ceil(start + f - 0.5));
  return Footprint{
      .row_begin = line * f,
      .row_end = std::min(config.height, line * f + f),
      .col_begin = std::clamp(col_begin, 0, config.width),
      .col_end = std::clamp(col_end, 0, config.width),
  };
}

ImageD SampleStream::as_image() const {
  ImageD image(grid_width, grid_height, channels);
  image.pixels() = values;
  return image;
}

SampleStream scan(const ImageD& image, const ScanConfig& config) {
  if (image.empty()) throw InputError("cannot scan an empty image");
  if (image.width() != config.width || image.height() != config.height) {
    throw InputError("image dimensions do not match the scan configuration");
  }
  config.validate();

  const int f = config.footprint_px();
  const int per_line = config.samples_per_line();
  const int lines = config.line_count();

  SampleStream stream;
  stream.grid_width = per_line;
  stream.grid_height = lines;
  stream.channels = image.channels();
  stream.pitch = config.pitch();
  stream.clamp_flyback = config.clamp_flyback;
  stream.step_degrees = config.step_degrees();
  stream.points.reserve(std::size_t(per_line) * lines);
  stream.values.resize(Eigen::Index(per_line) * lines, image.channels());

  const double centre_offset = 0.5 * (f - 1);
  for (int line = 0; line < lines; ++line) {
    for (int k = 0; k < per_line; ++k) {
      const Footprint fp = footprint(config, line, k);
      Eigen::ArrayXd sum = Eigen::ArrayXd::Zero(image.channels());
      for (int r = fp.row_begin; r < fp.row_end; ++r) {
        for (int c = fp.col_begin; c < fp.col_end; ++c) sum += image.pixel(r, c).transpose();
      }
      const double area = double(fp.row_end - fp.row_begin) * (fp.col_end - fp.col_begin);
      const auto index = static_cast<std::uint32_t>(stream.points.size());
      const double col = k * config.step_px() + centre_offset;
      stream.points.push_back(ScanPoint{
          .index = index,
          .row = line * f + centre_offset,
          .col = col,
          .theta = col * config.pitch(),
      });
      stream.values.row(index) = (sum / area).transpose();
    }
  }
  return stream;
}

Eigen::ArrayXXi footprint_coverage(const ScanConfig& config) {
  config.validate();
  Eigen::ArrayXXi counts = Eigen::ArrayXXi::Zero(config.height, config.width);
  for (int line = 0; line < config.line_count(); ++line) {
    for (int k = 0; k < config.samples_per_line(); ++k) {
      const Footprint fp = footprint(config, line, k);
      counts.block(fp.row_begin, fp.col_begin, fp.row_end - fp.row_begin, fp.col_end - fp.col_begin) += 1;
    }
  }
  return counts;
}

ScanDeltas scan_deltas(const SampleStream& stream) {
  if (stream.empty()) throw InputError("scan_deltas requires a non-empty stream");
  const Eigen::Index n = stream.size();
  ScanDeltas deltas{Eigen::ArrayXd(n), Eigen::ArrayXd(n)};
  deltas.theta_rate(0) = std::numeric_limits<double>::quiet_NaN();
  deltas.intensity_change(0) = std::numeric_limits<double>::quiet_NaN();
  const double channels = double(stream.channels);
  for (Eigen::Index i = 1; i < n; ++i) {
    const ScanPoint& prev = stream.points[i - 1];
    const ScanPoint& cur = stream.points[i];
    if (cur.row == prev.row || stream.clamp_flyback) {
      deltas.theta_rate(i) = cur.row == prev.row ? std::abs(cur.theta - prev.theta) : stream.step_degrees;
    } else {
      // Flyback: the full 2-D jump in scan position.
      deltas.theta_rate(i) = std::hypot((cur.row - prev.row) * stream.pitch, cur.theta - prev.theta);
    }
    deltas.intensity_change(i) = (stream.values.row(i) - stream.values.row(i - 1)).abs().sum() / channels;
  }
  return deltas;
}

void write_stream(const std::string& path, const SampleStream& stream) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out.write("SPSC", 4);
  binary::put_u32(out, std::uint32_t(stream.grid_width));
  binary::put_u32(out, std::uint32_t(stream.grid_height));
  binary::put_u32(out, std::uint32_t(stream.channels));
  binary::put_u32(out, std::uint32_t(stream.size()));
  for (Eigen::Index i = 0; i < stream.size(); ++i) {
    const ScanPoint& p = stream.points[i];
    binary::put_u32(out, p.index);
    binary::put_f32(out, float(p.row));
    binary::put_f32(out, float(p.col));
    binary::put_f32(out, float(p.theta));
    for (int c = 0; c < stream.channels; ++c) binary::put_f32(out, float(stream.values(i, c)));
  }
  if (!out) throw InputError("failed writing " + path);
}

SampleStream read_stream(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  char magic[4];
  if (!in.read(magic, 4) || std::string(magic, 4) != "SPSC") throw InputError(path + " is not an SPSC stream");

  SampleStream stream;
  stream.grid_width = int(binary::get_u32(in));
  stream.grid_height = int(binary::get_u32(in));
  stream.channels = int(binary::get_u32(in));
  const std::uint32_t n = binary::get_u32(in);
  if (stream.channels != 1 && stream.channels != 3) throw InputError("unsupported channel count in " + path);
  if (std::uint64_t(stream.grid_width) * stream.grid_height != n) throw InputError("inconsistent stream header");

  stream.points.resize(n);
  stream.values.resize(n, stream.channels);
  for (std::uint32_t i = 0; i < n; ++i) {
    ScanPoint& p = stream.points[i];
    p.index = binary::get_u32(in);
    p.row = binary::get_f32(in);
    p.col = binary::get_f32(in);
    p.theta = binary::get_f32(in);
    if (p.index != i) throw InputError("stream indices must be consecutive from 0");
    for (int c = 0; c < stream.channels; ++c) {
      const float v = binary::get_f32(in);
      if (!std::isfinite(v) || v < 0.0f || v > 1.0f) throw InputError("stream value out of [0,1]");
      stream.values(i, c) = v;
    }
  }

  // Geometry that the file does not carry is recovered from the positions.
  stream.pitch = 1.0;
  stream.step_degrees = 1.0;
  for (const ScanPoint& p : stream.points) {
    if (p.col > 0.0) {
      stream.pitch = p.theta / p.col;
      break;
    }
  }
  if (stream.grid_width > 1) stream.step_degrees = std::abs(stream.points[1].theta - stream.points[0].theta);
  return stream;
}

}  // namespace sauce
