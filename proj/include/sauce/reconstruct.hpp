#pragma once

#include <limits>

#include "sauce/image.hpp"
#include "sauce/sparse_image.hpp"

namespace sauce {

/// Voronoi fill: every pixel takes the value of its Euclidean-nearest kept
/// point, ties going to the lower row, then the lower column.
ImageD nearest_fill(const SparseImage& sparse);

/// Kept points at their positions, zero elsewhere.
ImageD zero_fill(const SparseImage& sparse);

/// Returned by psnr for identical images.
inline constexpr double kPsnrIdentical = std::numeric_limits<double>::infinity();

/// 10 log10(1 / MSE) for images with peak value 1.
template <typename Scalar>
double psnr(const Image<Scalar>& a, const Image<Scalar>& b) {
  if (!a.same_shape(b)) throw InputError("psnr requires images of equal shape");
  if (a.empty()) throw InputError("psnr of empty images");
  const double mse = (a.pixels() - b.pixels()).template cast<double>().square().mean();
  if (mse == 0.0) return kPsnrIdentical;
  return 10.0 * std::log10(1.0 / mse);
}

}  // namespace sauce
