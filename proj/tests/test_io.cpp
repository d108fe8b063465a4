#include <doctest.h>

#include <fstream>

#include "helpers.hpp"
#include "sauce/corpus.hpp"
#include "sauce/image.hpp"

using namespace sauce;
using sauce::test::TempDir;

TEST_CASE("pgm round trip quantizes to 8 bits") {
  TempDir dir("pgm");
  const ImageD image = sauce::test::random_image(7, 5, 1);
  write_pgm(dir / "a.pgm", image);
  const ImageD back = read_image(dir / "a.pgm");
  CHECK(back.width() == 7);
  CHECK(back.height() == 5);
  CHECK((back.pixels() - image.pixels()).abs().maxCoeff() <= 0.5 / 255 + 1e-12);
}

TEST_CASE("16-bit pgm") {
  TempDir dir("pgm16");
  std::ofstream out(dir / "b.pgm", std::ios::binary);
  out << "P5\n# comment\n2 1\n65535\n";
  const unsigned char bytes[] = {0xff, 0xff, 0x80, 0x00};
  out.write(reinterpret_cast<const char*>(bytes), 4);
  out.close();
  const ImageD image = read_image(dir / "b.pgm");
  CHECK(image(0, 0) == 1.0);
  CHECK(image(0, 1) == doctest::Approx(32768.0 / 65535));
}

TEST_CASE("png round trip, gray and rgb") {
  TempDir dir("png");
  for (int channels : {1, 3}) {
    const ImageD image = sauce::test::random_image(6, 4, 2, channels);
    write_png(dir / "c.png", image);
    const ImageD back = read_image(dir / "c.png");
    CHECK(back.channels() == channels);
    CHECK((back.pixels() - image.pixels()).abs().maxCoeff() <= 0.5 / 255 + 1e-12);
  }
}

TEST_CASE("bad image files") {
  TempDir dir("bad");
  CHECK_THROWS_AS(read_image(dir / "missing.pgm"), InputError);
  std::ofstream(dir / "junk.pgm") << "P2 not binary";
  CHECK_THROWS_AS(read_image(dir / "junk.pgm"), InputError);
  std::ofstream(dir / "short.pgm", std::ios::binary) << "P5\n4 4\n255\nab";
  CHECK_THROWS_AS(read_image(dir / "short.pgm"), InputError);
  std::ofstream(dir / "junk.png", std::ios::binary) << "not a png";
  CHECK_THROWS_AS(read_image(dir / "junk.png"), InputError);
  CHECK_THROWS_AS(write_pgm(dir / "rgb.pgm", ImageD(2, 2, 3)), InputError);
}

TEST_CASE("glyph corpus") {
  GlyphCorpusConfig config;
  config.per_class = 3;
  const LabeledDataset a = make_glyph_corpus(config);
  CHECK(a.size() == 30);
  CHECK(a.class_count == 10);
  CHECK_NOTHROW(a.validate());
  for (int label = 0; label < 10; ++label) CHECK(std::count(a.labels.begin(), a.labels.end(), label) == 3);
  const LabeledDataset b = make_glyph_corpus(config);
  CHECK(a.labels == b.labels);
  CHECK((a.images[5].pixels() == b.images[5].pixels()).all());
  for (const ImageD& image : a.images) {
    CHECK(image.pixels().minCoeff() >= 0.0);
    CHECK(image.pixels().maxCoeff() <= 1.0);
  }
}

TEST_CASE("dataset directory round trip") {
  TempDir dir("dataset");
  GlyphCorpusConfig config;
  config.per_class = 2;
  const LabeledDataset data = make_glyph_corpus(config);
  write_dataset_dir(dir / "d", data);
  const LabeledDataset back = load_dataset_dir(dir / "d", 1);
  CHECK(back.size() == 20);
  CHECK(back.class_count == 10);
  CHECK(load_dataset_dir(dir / "d", 1).labels == back.labels);

  std::filesystem::create_directories(dir.path() / "e" / "a");
  std::filesystem::create_directories(dir.path() / "e" / "b");
  write_pgm(dir / "e/a/x.pgm", ImageD(4, 4));
  CHECK_THROWS_AS(load_dataset_dir(dir / "e", 1), InputError);
  CHECK_THROWS_AS(load_dataset_dir(dir / "missing", 1), InputError);
}
