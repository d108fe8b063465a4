#include "sauce/taskproxy.hpp"

#include <cmath>
#include <numeric>

#include "sauce/rng.hpp"

namespace sauce {
namespace {

void check_labels(const LinearClassifier& model, const Eigen::MatrixXd& features, std::span<const int> labels) {
  if (features.cols() != Eigen::Index(labels.size())) throw InputError("feature/label count mismatch");
  if (features.rows() != model.feature_count()) throw InputError("feature dimension does not match classifier");
  for (int label : labels) {
    if (label < 0 || label >= model.class_count()) throw InputError("label out of range");
  }
}

// Column-wise softmax of the logits, shifted by the column max for stability.
Eigen::MatrixXd softmax(const LinearClassifier& model, const Eigen::MatrixXd& features) {
  Eigen::MatrixXd z = (model.weights * features).colwise() + model.bias;
  z.rowwise() -= z.colwise().maxCoeff();
  Eigen::MatrixXd e = z.array().exp().matrix();
  return e.array().rowwise() / e.colwise().sum().array();
}

}  // namespace

int LinearClassifier::predict(const Eigen::Ref<const Eigen::VectorXd>& features) const {
  Eigen::Index best;
  (weights * features + bias).maxCoeff(&best);
  return int(best);
}

void LabeledDataset::validate() const {
  if (class_count < 1) throw InputError("dataset needs at least one class");
  if (labels.size() != images.size()) throw InputError("dataset label count mismatch");
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= class_count) throw InputError("dataset label out of range");
    if (!images[i].same_shape(images.front())) throw InputError("dataset images differ in shape");
  }
}

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> indices) const {
  LabeledDataset out;
  out.class_count = class_count;
  for (std::size_t i : indices) {
    out.images.push_back(images.at(i));
    out.labels.push_back(labels.at(i));
  }
  return out;
}

Eigen::MatrixXd feature_matrix(std::span<const ImageD> images) {
  if (images.empty()) return {};
  Eigen::MatrixXd features(images.front().pixels().size(), Eigen::Index(images.size()));
  for (std::size_t i = 0; i < images.size(); ++i) {
    if (!images[i].same_shape(images.front())) throw InputError("images differ in shape");
    features.col(Eigen::Index(i)) = images[i].flattened();
  }
  return features;
}

LossGradient cross_entropy(const LinearClassifier& model, const Eigen::MatrixXd& features,
                           std::span<const int> labels, double l2) {
  check_labels(model, features, labels);
  const Eigen::Index batch = features.cols();
  Eigen::MatrixXd prob = softmax(model, features);

  LossGradient out;
  for (Eigen::Index j = 0; j < batch; ++j) {
    out.loss -= std::log(std::max(prob(labels[j], j), 1e-300));
    prob(labels[j], j) -= 1.0;
  }
  out.loss = out.loss / double(batch) + 0.5 * l2 * model.weights.squaredNorm();
  out.d_weights = prob * features.transpose() / double(batch) + l2 * model.weights;
  out.d_bias = prob.rowwise().sum() / double(batch);
  return out;
}

Eigen::ArrayXd cross_entropy_per_item(const LinearClassifier& model, const Eigen::MatrixXd& features,
                                      std::span<const int> labels) {
  check_labels(model, features, labels);
  const Eigen::MatrixXd prob = softmax(model, features);
  Eigen::ArrayXd loss(features.cols());
  for (Eigen::Index j = 0; j < features.cols(); ++j) loss(j) = -std::log(std::max(prob(labels[j], j), 1e-300));
  return loss;
}

LinearClassifier train_classifier(const Eigen::MatrixXd& features, std::span<const int> labels, int class_count,
                                  const TrainConfig& config) {
  if (features.cols() == 0) throw InputError("cannot train on an empty dataset");
  if (class_count < 2) throw InputError("classifier needs at least two classes");
  LinearClassifier model{Eigen::MatrixXd::Zero(class_count, features.rows()), Eigen::VectorXd::Zero(class_count)};
  check_labels(model, features, labels);

  const Eigen::Index items = features.cols();
  const Eigen::Index batch = std::max<Eigen::Index>(1, std::min<Eigen::Index>(config.batch_size, items));
  std::vector<Eigen::Index> order(static_cast<std::size_t>(items));
  std::iota(order.begin(), order.end(), Eigen::Index(0));
  Rng rng(config.seed);

  Eigen::MatrixXd batch_features(features.rows(), batch);
  std::vector<int> batch_labels(static_cast<std::size_t>(batch));
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    for (Eigen::Index k = items - 1; k > 0; --k) {
      std::swap(order[k], order[Eigen::Index(rng.below(std::uint64_t(k + 1)))]);
    }
    for (Eigen::Index start = 0; start < items; start += batch) {
      const Eigen::Index count = std::min(batch, items - start);
      batch_features.resize(features.rows(), count);
      batch_labels.resize(static_cast<std::size_t>(count));
      for (Eigen::Index j = 0; j < count; ++j) {
        batch_features.col(j) = features.col(order[start + j]);
        batch_labels[j] = labels[order[start + j]];
      }
      const LossGradient g = cross_entropy(model, batch_features, batch_labels, config.l2);
      model.weights -= config.learning_rate * g.d_weights;
      model.bias -= config.learning_rate * g.d_bias;
    }
  }
  if (!model.weights.allFinite() || !model.bias.allFinite()) throw NumericError("classifier training diverged");
  return model;
}

LinearClassifier train_classifier(const LabeledDataset& train, const TrainConfig& config) {
  if (train.empty()) throw InputError("cannot train on an empty dataset");
  train.validate();
  return train_classifier(feature_matrix(train.images), train.labels, train.class_count, config);
}

double accuracy(const LinearClassifier& model, const Eigen::MatrixXd& features, std::span<const int> labels) {
  check_labels(model, features, labels);
  if (labels.empty()) return 0.0;
  const Eigen::MatrixXd logits = (model.weights * features).colwise() + model.bias;
  std::size_t correct = 0;
  for (Eigen::Index j = 0; j < logits.cols(); ++j) {
    Eigen::Index best;
    logits.col(j).maxCoeff(&best);
    correct += best == labels[j];
  }
  return double(correct) / double(labels.size());
}

double evaluate(const LinearClassifier& model, const LabeledDataset& test, const ImagePipeline& pipeline) {
  if (test.empty()) throw InputError("cannot evaluate on an empty dataset");
  std::vector<ImageD> seen;
  seen.reserve(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) {
    seen.push_back(pipeline ? pipeline(test.images[i], i) : test.images[i]);
  }
  return accuracy(model, feature_matrix(seen), test.labels);
}

double droprate_loss(const SampleMask& mask, Eigen::Index n, Eigen::Index total) {
  if (mask.size() != total) throw InputError("mask length does not match N");
  if (total == 0) return 0.0;
  return std::abs(double(n) / double(total) - double(mask.n) / double(total));
}

}  // namespace sauce
