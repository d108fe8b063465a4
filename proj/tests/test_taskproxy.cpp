#include <doctest.h>

#include "helpers.hpp"
#include "sauce/taskproxy.hpp"

using namespace sauce;

namespace {

LinearClassifier random_model(int classes, int features, Rng& rng) {
  LinearClassifier m;
  m.weights.resize(classes, features);
  m.bias.resize(classes);
  for (auto& w : m.weights.reshaped()) w = rng.normal();
  for (auto& b : m.bias) b = rng.normal();
  return m;
}

// Two separable blobs: class 0 is dark on the left half, class 1 on the right.
LabeledDataset separable_set(int per_class, std::uint64_t seed) {
  Rng rng(seed);
  LabeledDataset d;
  d.class_count = 2;
  for (int k = 0; k < per_class; ++k) {
    for (int label = 0; label < 2; ++label) {
      ImageD image(6, 6);
      for (int r = 0; r < 6; ++r) {
        for (int c = 0; c < 6; ++c) {
          const bool bright = (c < 3) == (label == 1);
          image(r, c) = (bright ? 0.8 : 0.2) + 0.05 * rng.normal();
        }
      }
      d.images.push_back(image);
      d.labels.push_back(label);
    }
  }
  return d;
}

}  // namespace

TEST_CASE("droprate loss") {
  Eigen::Array<bool, Eigen::Dynamic, 1> flags(4);
  flags << true, false, true, false;
  CHECK(droprate_loss(SampleMask::from_flags(flags), 2, 4) == 0.0);
  CHECK(droprate_loss(SampleMask::all(100), 25, 100) == doctest::Approx(0.75));
  CHECK(droprate_loss(SampleMask::none(10), 3, 10) == doctest::Approx(0.3));
}

TEST_CASE("cross-entropy gradient matches finite differences") {
  Rng rng(3);
  const LinearClassifier model = random_model(3, 5, rng);
  Eigen::MatrixXd x(5, 7);
  for (auto& v : x.reshaped()) v = rng.normal();
  const std::vector<int> labels = {0, 1, 2, 2, 1, 0, 1};
  const double l2 = 0.1;
  const LossGradient g = cross_entropy(model, x, labels, l2);
  const double h = 1e-6;
  for (Eigen::Index i = 0; i < model.weights.size(); ++i) {
    LinearClassifier plus = model, minus = model;
    plus.weights.reshaped()(i) += h;
    minus.weights.reshaped()(i) -= h;
    const double fd = (cross_entropy(plus, x, labels, l2).loss - cross_entropy(minus, x, labels, l2).loss) / (2 * h);
    CHECK(g.d_weights.reshaped()(i) == doctest::Approx(fd).epsilon(1e-6));
  }
  for (Eigen::Index i = 0; i < model.bias.size(); ++i) {
    LinearClassifier plus = model, minus = model;
    plus.bias(i) += h;
    minus.bias(i) -= h;
    const double fd = (cross_entropy(plus, x, labels, l2).loss - cross_entropy(minus, x, labels, l2).loss) / (2 * h);
    CHECK(g.d_bias(i) == doctest::Approx(fd).epsilon(1e-6));
  }
  CHECK(cross_entropy_per_item(model, x, labels).mean() ==
        doctest::Approx(cross_entropy(model, x, labels, 0.0).loss));
}

TEST_CASE("training") {
  const LabeledDataset train = separable_set(20, 1);
  TrainConfig config;
  config.epochs = 100;
  const LinearClassifier model = train_classifier(train, config);
  CHECK(evaluate(model, train) == 1.0);

  const LinearClassifier again = train_classifier(train, config);
  CHECK(model.weights == again.weights);
  CHECK(model.bias == again.bias);

  CHECK_THROWS_AS(train_classifier(LabeledDataset{}, config), InputError);
}

TEST_CASE("shuffled labels give chance accuracy") {
  Rng rng(17);
  LabeledDataset train, test;
  train.class_count = test.class_count = 10;
  for (int i = 0; i < 1000; ++i) {
    train.images.push_back(sauce::test::random_image(4, 4, rng.bits()));
    train.labels.push_back(int(rng.below(10)));
  }
  for (int i = 0; i < 2000; ++i) {
    test.images.push_back(sauce::test::random_image(4, 4, rng.bits()));
    test.labels.push_back(int(rng.below(10)));
  }
  TrainConfig config;
  config.epochs = 20;
  const double acc = evaluate(train_classifier(train, config), test);
  CHECK(acc == doctest::Approx(0.1).epsilon(0.3));
}

TEST_CASE("evaluate applies the pipeline and checks dimensions") {
  const LabeledDataset data = separable_set(10, 2);
  TrainConfig config;
  config.epochs = 50;
  const LinearClassifier model = train_classifier(data, config);
  const double identity = evaluate(model, data, [](const ImageD& image, std::size_t) { return image; });
  CHECK(identity == evaluate(model, data));
  const double blank = evaluate(model, data, [](const ImageD& image, std::size_t) {
    return ImageD(image.width(), image.height(), 1, 0.5);
  });
  CHECK(blank == doctest::Approx(0.5));
  LabeledDataset other;
  other.class_count = 2;
  other.images.push_back(ImageD(3, 3));
  other.labels.push_back(0);
  CHECK_THROWS_AS(evaluate(model, other), InputError);
}

TEST_CASE("dataset validation and subsets") {
  LabeledDataset d = separable_set(3, 4);
  CHECK_NOTHROW(d.validate());
  const std::vector<std::size_t> pick = {4, 1};
  const LabeledDataset s = d.subset(pick);
  CHECK(s.size() == 2);
  CHECK(s.labels[0] == d.labels[4]);
  d.labels[0] = 7;
  CHECK_THROWS_AS(d.validate(), InputError);
}
