#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>
#include <vector>

#include "sauce/image.hpp"
#include "sauce/rng.hpp"
#include "sauce/scanner.hpp"

namespace sauce::test {

inline ImageD row_image(const std::vector<double>& values) {
  ImageD image(int(values.size()), 1);
  for (std::size_t c = 0; c < values.size(); ++c) image(0, int(c)) = values[c];
  return image;
}

inline ImageD random_image(int width, int height, std::uint64_t seed, int channels = 1) {
  Rng rng(seed);
  ImageD image(width, height, channels);
  for (Eigen::Index i = 0; i < image.pixels().size(); ++i) image.pixels().data()[i] = rng.uniform();
  return image;
}

/// One sample per pixel, in raster order.
inline SampleStream identity_stream(const ImageD& image) {
  return scan(image, ScanConfig::at_bound(image.width(), image.height()));
}

inline SampleStream row_stream(const std::vector<double>& values) { return identity_stream(row_image(values)); }

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& name)
      : path_(std::filesystem::temp_directory_path() / ("sauce_test_" + name)) {
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string operator/(const std::string& leaf) const { return (path_ / leaf).string(); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace sauce::test
