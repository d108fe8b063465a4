#include "sauce/image.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <vector>

namespace sauce {
namespace {

bool has_png_extension(const std::string& path) {
  if (path.size() < 4) return false;
  std::string ext = path.substr(path.size() - 4);
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".png";
}

std::uint8_t quantize(double v) {
  if (!std::isfinite(v)) v = 0.0;
  return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

// Reads the next whitespace-delimited header token, skipping '#' comments.
std::string next_token(std::istream& in) {
  std::string token;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n') {
      }
      continue;
    }
    if (std::isspace(c)) {
      if (!token.empty()) break;
      continue;
    }
    token.push_back(static_cast<char>(c));
  }
  return token;
}

int parse_header_int(std::istream& in, const std::string& path) {
  const std::string token = next_token(in);
  try {
    std::size_t used = 0;
    const int value = std::stoi(token, &used);
    if (used != token.size() || value <= 0) throw std::invalid_argument(token);
    return value;
  } catch (const std::exception&) {
    throw InputError("corrupt PGM header in " + path);
  }
}

ImageD read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  if (next_token(in) != "P5") throw InputError(path + " is not a binary PGM (P5)");
  const int width = parse_header_int(in, path);
  const int height = parse_header_int(in, path);
  const int maxval = parse_header_int(in, path);
  if (maxval > 65535) throw InputError("PGM maxval out of range in " + path);

  const int bytes_per_sample = maxval < 256 ? 1 : 2;
  std::vector<unsigned char> raw(std::size_t(width) * height * bytes_per_sample);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size())) {
    throw InputError("truncated PGM data in " + path);
  }

  ImageD image(width, height, 1);
  for (Eigen::Index i = 0; i < image.pixel_count(); ++i) {
    const unsigned value = bytes_per_sample == 1 ? raw[i] : (unsigned(raw[2 * i]) << 8) | raw[2 * i + 1];
    image.pixels()(i, 0) = double(value) / maxval;
  }
  return image;
}

ImageD read_png(const std::string& path) {
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.c_str())) {
    throw InputError("cannot read PNG " + path + ": " + png.message);
  }
  const bool color = (png.format & PNG_FORMAT_FLAG_COLOR) != 0;
  png.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const int channels = color ? 3 : 1;
  std::vector<png_byte> buffer(PNG_IMAGE_SIZE(png));
  if (!png_image_finish_read(&png, nullptr, buffer.data(), 0, nullptr)) {
    const std::string message = png.message;
    png_image_free(&png);
    throw InputError("corrupt PNG " + path + ": " + message);
  }

  ImageD image(int(png.width), int(png.height), channels);
  Eigen::Map<const Eigen::Array<png_byte, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> bytes(
      buffer.data(), image.pixel_count(), channels);
  image.pixels() = bytes.cast<double>() / 255.0;
  return image;
}

}  // namespace

ImageD read_image(const std::string& path) {
  ImageD image = has_png_extension(path) ? read_png(path) : read_pgm(path);
  if (image.empty()) throw InputError("empty image " + path);
  return image;
}

void write_pgm(const std::string& path, const ImageD& image) {
  if (image.channels() != 1) throw InputError("PGM output requires a single-channel image");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << "P5\n" << image.width() << ' ' << image.height() << "\n255\n";
  std::vector<char> bytes(static_cast<std::size_t>(image.pixel_count()));
  for (Eigen::Index i = 0; i < image.pixel_count(); ++i) {
    bytes[i] = static_cast<char>(quantize(image.pixels()(i, 0)));
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

void write_png(const std::string& path, const ImageD& image) {
  if (image.channels() != 1 && image.channels() != 3) {
    throw InputError("PNG output requires 1 or 3 channels");
  }
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.width());
  png.height = static_cast<png_uint_32>(image.height());
  png.format = image.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;

  std::vector<png_byte> buffer(static_cast<std::size_t>(image.pixels().size()));
  const auto& px = image.pixels();
  for (Eigen::Index i = 0; i < px.rows(); ++i) {
    for (Eigen::Index c = 0; c < px.cols(); ++c) buffer[i * px.cols() + c] = quantize(px(i, c));
  }
  if (!png_image_write_to_file(&png, path.c_str(), 0, buffer.data(), 0, nullptr)) {
    throw InputError("cannot write PNG " + path + ": " + png.message);
  }
}

void write_image(const std::string& path, const ImageD& image) {
  if (has_png_extension(path)) {
    write_png(path, image);
  } else {
    write_pgm(path, image);
  }
}

}  // namespace sauce
