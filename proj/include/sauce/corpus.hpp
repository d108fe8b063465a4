#pragma once

#include <cstdint>
#include <string>

#include "sauce/taskproxy.hpp"

namespace sauce {

/// Seven-segment digit glyphs (10 classes) with random placement, size,
/// stroke width, contrast and additive Gaussian noise.
struct GlyphCorpusConfig {
  int width = 32;
  int height = 32;
  int per_class = 20;
  double noise = 0.03;
  int max_shift = 1;  // pixels either way from the centred position
  std::uint64_t seed = 1;
};

LabeledDataset make_glyph_corpus(const GlyphCorpusConfig& config);

/// One subdirectory per class (sorted by name) holding PGM/PNG images; items
/// are shuffled with `seed` after loading.
LabeledDataset load_dataset_dir(const std::string& path, std::uint64_t seed);

/// Writes class_<k>/<item>.pgm, the layout load_dataset_dir reads.
void write_dataset_dir(const std::string& path, const LabeledDataset& dataset);

}  // namespace sauce
