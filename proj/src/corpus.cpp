#include "sauce/corpus.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>

#include "sauce/rng.hpp"

namespace sauce {
namespace {

namespace fs = std::filesystem;

// Segment bits: a b c d e f g (top, top-right, bottom-right, bottom, bottom-left, top-left, middle).
constexpr std::array<unsigned, 10> kDigitSegments = {
    0b1111110, 0b0110000, 0b1101101, 0b1111001, 0b0110011,
    0b1011011, 0b1011111, 0b1110000, 0b1111111, 0b1111011,
};

bool has_segment(int digit, int segment) { return (kDigitSegments[digit] >> (6 - segment)) & 1u; }

void fill_rect(ImageD& image, int r0, int r1, int c0, int c1, double value) {
  r0 = std::max(r0, 0);
  c0 = std::max(c0, 0);
  r1 = std::min(r1, image.height());
  c1 = std::min(c1, image.width());
  for (int r = r0; r < r1; ++r) {
    for (int c = c0; c < c1; ++c) image(r, c) = value;
  }
}

ImageD render_digit(int digit, const GlyphCorpusConfig& config, Rng& rng) {
  const int glyph_w = 8 + int(rng.below(5));   // 8..12
  const int glyph_h = 14 + int(rng.below(5));  // 14..18
  const int stroke = 1 + int(rng.below(2));    // 1..2
  const double background = rng.uniform(0.0, 0.2);
  const double foreground = rng.uniform(0.65, 1.0);
  const int shift_span = 2 * config.max_shift + 1;
  const int x0 = (config.width - glyph_w) / 2 + int(rng.below(shift_span)) - config.max_shift;
  const int y0 = (config.height - glyph_h) / 2 + int(rng.below(shift_span)) - config.max_shift;
  const int mid = y0 + glyph_h / 2;

  ImageD image(config.width, config.height, 1, background);
  const int x1 = x0 + glyph_w;
  const int y1 = y0 + glyph_h;
  if (has_segment(digit, 0)) fill_rect(image, y0, y0 + stroke, x0, x1, foreground);
  if (has_segment(digit, 1)) fill_rect(image, y0, mid + 1, x1 - stroke, x1, foreground);
  if (has_segment(digit, 2)) fill_rect(image, mid, y1, x1 - stroke, x1, foreground);
  if (has_segment(digit, 3)) fill_rect(image, y1 - stroke, y1, x0, x1, foreground);
  if (has_segment(digit, 4)) fill_rect(image, mid, y1, x0, x0 + stroke, foreground);
  if (has_segment(digit, 5)) fill_rect(image, y0, mid + 1, x0, x0 + stroke, foreground);
  if (has_segment(digit, 6)) fill_rect(image, mid - stroke / 2, mid - stroke / 2 + stroke, x0, x1, foreground);

  for (Eigen::Index i = 0; i < image.pixel_count(); ++i) {
    image.pixels()(i, 0) = std::clamp(image.pixels()(i, 0) + config.noise * rng.normal(), 0.0, 1.0);
  }
  return image;
}

void shuffle_dataset(LabeledDataset& dataset, std::uint64_t seed) {
  Rng rng(seed);
  for (std::size_t k = dataset.size(); k > 1; --k) {
    const std::size_t j = rng.below(k);
    std::swap(dataset.images[k - 1], dataset.images[j]);
    std::swap(dataset.labels[k - 1], dataset.labels[j]);
  }
}

bool is_image_file(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext == ".pgm" || ext == ".png";
}

}  // namespace

LabeledDataset make_glyph_corpus(const GlyphCorpusConfig& config) {
  if (config.width < 16 || config.height < 22) throw DomainError("glyph corpus needs at least 16x22 images");
  if (config.per_class < 1) throw DomainError("glyph corpus needs at least one item per class");
  LabeledDataset dataset;
  dataset.class_count = 10;
  Rng rng(config.seed);
  for (int k = 0; k < config.per_class; ++k) {
    for (int digit = 0; digit < 10; ++digit) {
      dataset.images.push_back(render_digit(digit, config, rng));
      dataset.labels.push_back(digit);
    }
  }
  shuffle_dataset(dataset, Rng::mix(config.seed, 1));
  return dataset;
}

LabeledDataset load_dataset_dir(const std::string& path, std::uint64_t seed) {
  if (!fs::is_directory(path)) throw InputError("dataset directory not found: " + path);
  std::vector<fs::path> class_dirs;
  for (const auto& entry : fs::directory_iterator(path)) {
    if (entry.is_directory()) class_dirs.push_back(entry.path());
  }
  std::sort(class_dirs.begin(), class_dirs.end());
  if (class_dirs.size() < 2) throw InputError("dataset needs at least two class directories");

  LabeledDataset dataset;
  dataset.class_count = int(class_dirs.size());
  for (std::size_t label = 0; label < class_dirs.size(); ++label) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(class_dirs[label])) {
      if (entry.is_regular_file() && is_image_file(entry.path())) files.push_back(entry.path());
    }
    if (files.empty()) throw InputError("empty class directory: " + class_dirs[label].string());
    std::sort(files.begin(), files.end());
    for (const auto& file : files) {
      dataset.images.push_back(read_image(file.string()));
      dataset.labels.push_back(int(label));
    }
  }
  dataset.validate();
  shuffle_dataset(dataset, seed);
  return dataset;
}

void write_dataset_dir(const std::string& path, const LabeledDataset& dataset) {
  dataset.validate();
  std::vector<int> counters(static_cast<std::size_t>(dataset.class_count), 0);
  for (int k = 0; k < dataset.class_count; ++k) fs::create_directories(fs::path(path) / ("class_" + std::to_string(k)));
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const int label = dataset.labels[i];
    char name[32];
    std::snprintf(name, sizeof name, "%05d.pgm", counters[label]++);
    write_pgm((fs::path(path) / ("class_" + std::to_string(label)) / name).string(), dataset.images[i]);
  }
}

}  // namespace sauce
