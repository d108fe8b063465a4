#pragma once

#include <Eigen/Core>

#include <cassert>
#include <stdexcept>
#include <string>

namespace sauce {

/// Raised for inputs outside an operation's mathematical domain
/// (non-positive rates, budgets outside [0, N], ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised for malformed or mismatched inputs (bad files, dimension mismatch).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a computation produces non-finite values it cannot recover from.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense multi-channel raster. Pixels are stored one per row of an
/// (height*width) x channels row-major array, so a flattened view of the
/// buffer is pixel-interleaved in raster order.
template <typename Scalar>
class Image {
 public:
  using Pixels = Eigen::Array<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Image() = default;
  Image(int width, int height, int channels = 1, Scalar fill = Scalar(0))
      : width_(width), height_(height), channels_(channels) {
    if (width < 0 || height < 0 || channels < 1) {
      throw InputError("image dimensions must be non-negative with at least one channel");
    }
    pixels_.setConstant(Eigen::Index(width) * height, channels, fill);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  int channels() const { return channels_; }
  Eigen::Index pixel_count() const { return pixels_.rows(); }
  bool empty() const { return pixels_.rows() == 0; }

  Eigen::Index offset(int row, int col) const { return Eigen::Index(row) * width_ + col; }

  Scalar& operator()(int row, int col, int channel = 0) {
    assert(row >= 0 && row < height_ && col >= 0 && col < width_);
    return pixels_(offset(row, col), channel);
  }
  Scalar operator()(int row, int col, int channel = 0) const {
    assert(row >= 0 && row < height_ && col >= 0 && col < width_);
    return pixels_(offset(row, col), channel);
  }

  auto pixel(int row, int col) { return pixels_.row(offset(row, col)); }
  auto pixel(int row, int col) const { return pixels_.row(offset(row, col)); }

  Pixels& pixels() { return pixels_; }
  const Pixels& pixels() const { return pixels_; }

  /// Raster-order, pixel-interleaved feature vector view.
  Eigen::Map<const Vector> flattened() const {
    return Eigen::Map<const Vector>(pixels_.data(), pixels_.size());
  }

  template <typename Other>
  Image<Other> cast() const {
    Image<Other> out(width_, height_, channels_);
    out.pixels() = pixels_.template cast<Other>();
    return out;
  }

  bool same_shape(const Image& other) const {
    return width_ == other.width_ && height_ == other.height_ && channels_ == other.channels_;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  int channels_ = 1;
  Pixels pixels_;
};

using ImageF = Image<float>;
using ImageD = Image<double>;

template <typename Scalar>
Scalar mean_value(const Image<Scalar>& image) {
  return image.empty() ? Scalar(0) : image.pixels().mean();
}

/// Reads a binary PGM (P5, 8 or 16 bit) or PNG (gray, gray+alpha, RGB, RGBA).
/// Values are normalized to [0,1]; alpha is discarded.
ImageD read_image(const std::string& path);

/// Single-channel images only; values are clamped to [0,1] and quantized to 8 bits.
void write_pgm(const std::string& path, const ImageD& image);

/// 1 or 3 channel images; values are clamped to [0,1] and quantized to 8 bits.
void write_png(const std::string& path, const ImageD& image);

/// Dispatches on extension (".png" vs anything else -> PGM).
void write_image(const std::string& path, const ImageD& image);

}  // namespace sauce
