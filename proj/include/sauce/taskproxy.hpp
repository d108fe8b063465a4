#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sauce/image.hpp"
#include "sauce/sauce.hpp"

namespace sauce {

/// Multinomial logistic regression: logits = weights * x + bias.
struct LinearClassifier {
  Eigen::MatrixXd weights;  // classes x features
  Eigen::VectorXd bias;     // classes

  int class_count() const { return int(weights.rows()); }
  Eigen::Index feature_count() const { return weights.cols(); }
  int predict(const Eigen::Ref<const Eigen::VectorXd>& features) const;
};

struct LabeledDataset {
  std::vector<ImageD> images;
  std::vector<int> labels;
  int class_count = 0;

  std::size_t size() const { return images.size(); }
  bool empty() const { return images.empty(); }
  /// Throws InputError unless labels are in range and images share one shape.
  void validate() const;
  LabeledDataset subset(std::span<const std::size_t> indices) const;
};

/// One column per image, pixel-interleaved raster order.
Eigen::MatrixXd feature_matrix(std::span<const ImageD> images);

struct LossGradient {
  double loss = 0.0;
  Eigen::MatrixXd d_weights;
  Eigen::VectorXd d_bias;
};

/// Mean softmax cross-entropy over the columns of `features`, plus
/// 0.5 * l2 * |weights|^2, with its analytic gradient.
LossGradient cross_entropy(const LinearClassifier& model, const Eigen::MatrixXd& features,
                           std::span<const int> labels, double l2 = 0.0);

/// Per-column cross-entropy without regularization.
Eigen::ArrayXd cross_entropy_per_item(const LinearClassifier& model, const Eigen::MatrixXd& features,
                                      std::span<const int> labels);

struct TrainConfig {
  int epochs = 200;
  double learning_rate = 0.2;
  int batch_size = 32;
  double l2 = 1e-4;
  std::uint64_t seed = 1;
};

/// Mini-batch gradient descent from zero weights; batches are drawn from a
/// seeded shuffle each epoch.
LinearClassifier train_classifier(const Eigen::MatrixXd& features, std::span<const int> labels, int class_count,
                                  const TrainConfig& config);
LinearClassifier train_classifier(const LabeledDataset& train, const TrainConfig& config);

double accuracy(const LinearClassifier& model, const Eigen::MatrixXd& features, std::span<const int> labels);

/// Maps a test image (and its position in the test set, for seeding) to the
/// image the classifier sees.
using ImagePipeline = std::function<ImageD(const ImageD& image, std::size_t item)>;

/// Fraction of test items classified correctly after passing through
/// `pipeline`; an empty pipeline is the identity.
double evaluate(const LinearClassifier& model, const LabeledDataset& test, const ImagePipeline& pipeline = {});

/// |n/N - (1/N) * kept|.
double droprate_loss(const SampleMask& mask, Eigen::Index n, Eigen::Index total);

}  // namespace sauce
