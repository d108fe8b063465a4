#include "sauce/fit.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include "sauce/nelder_mead.hpp"
#include "sauce/rng.hpp"
#include "sauce/scanner.hpp"

namespace sauce {
namespace {

std::string fixed6(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  // Avoid "-0.000000" so equal values always print identically.
  if (std::string(buf) == "-0.000000") return "0.000000";
  return buf;
}

SamplingOptions fit_sampling(const SamplerParams& params, const FitConfig& config) {
  SamplingOptions options;
  options.params = params;
  options.selection = config.selection;
  options.fill = config.fill;
  options.normalize = config.normalize;
  return options;
}

// Runs fn(i) for i in [0, count) on `workers` threads; rethrows the first failure.
template <typename Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn) {
  workers = std::max(1, std::min<int>(workers, int(count)));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < count;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace

void FitConfig::validate() const {
  if (!(rate_min > 0.0 && rate_min <= rate_max && rate_max < 1.0)) {
    throw DomainError("rate range must satisfy 0 < r_min <= r_max < 1");
  }
  if (!(lambda_drop >= 0.0)) throw DomainError("lambda_drop must be non-negative");
  if (iterations < 4) throw DomainError("a simplex run needs at least 4 evaluations");
  if (restarts < 0) throw DomainError("restart count must be non-negative");
}

DatasetSplit split_dataset(const LabeledDataset& dataset, double train_fraction, std::uint64_t seed) {
  if (dataset.empty()) throw InputError("cannot split an empty dataset");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw DomainError("train fraction must lie in (0, 1)");
  dataset.validate();
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), std::size_t(0));
  Rng rng(seed);
  for (std::size_t k = order.size() - 1; k > 0; --k) std::swap(order[k], order[rng.below(k + 1)]);
  const auto cut = std::clamp<std::size_t>(std::size_t(std::llround(train_fraction * double(order.size()))), 1,
                                           order.size() - 1);
  DatasetSplit split;
  split.train = dataset.subset(std::span(order).first(cut));
  split.validation = dataset.subset(std::span(order).subspan(cut));
  return split;
}

ObjectiveTerms objective_terms(const SamplerParams& params, const DatasetSplit& data, const FitConfig& config) {
  config.validate();
  if (data.train.empty() || data.validation.empty()) throw InputError("objective needs train and validation items");
  const SamplingOptions options = fit_sampling(params, config);
  const SamplerSpec sampler{SamplerKind::Sauce};

  Rng rates(config.seed);
  const std::size_t train_count =
      config.subsample == 0 ? data.train.size() : std::min(config.subsample, data.train.size());
  std::vector<ImageD> train_images;
  train_images.reserve(train_count);
  for (std::size_t j = 0; j < train_count; ++j) {
    const double r = rates.uniform(config.rate_min, config.rate_max);
    train_images.push_back(sample_image(data.train.images[j], sampler, r, options, Rng::mix(config.seed, 2 * j)).image);
  }
  const std::span<const int> train_labels(data.train.labels.data(), train_count);
  const LinearClassifier model =
      train_classifier(feature_matrix(train_images), train_labels, data.train.class_count, config.classifier);

  std::vector<ImageD> eval_images;
  eval_images.reserve(data.validation.size());
  double droprate = 0.0;
  for (std::size_t j = 0; j < data.validation.size(); ++j) {
    const double r = rates.uniform(config.rate_min, config.rate_max);
    SampledImage s = sample_image(data.validation.images[j], sampler, r, options, Rng::mix(config.seed, 2 * j + 1));
    droprate += droprate_loss(s.mask, s.budget, s.mask.size());
    eval_images.push_back(std::move(s.image));
  }

  ObjectiveTerms terms;
  terms.task_loss = cross_entropy_per_item(model, feature_matrix(eval_images), data.validation.labels).mean();
  terms.droprate = droprate / double(data.validation.size());
  terms.total = terms.task_loss + config.lambda_drop * terms.droprate;
  return terms;
}

double objective(const SamplerParams& params, const DatasetSplit& data, const FitConfig& config) {
  return objective_terms(params, data, config).total;
}

FitResult fit_params(const DatasetSplit& data, const FitConfig& config) {
  config.validate();
  using Vector = Eigen::Vector3d;
  FitResult result;
  double best = std::numeric_limits<double>::infinity();
  bool have_best = false;
  int iteration = 0;

  auto evaluate = [&](const Vector& x) {
    const SamplerParams params = SamplerParams::from_vector(x);
    if (!params.finite()) return std::numeric_limits<double>::infinity();
    try {
      return objective(params, data, config);
    } catch (const NumericError&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  auto record = [&](const Vector& x, double value) {
    result.log.push_back({iteration++, value});
    if (iteration == 1) result.initial_objective = value;
    if (std::isfinite(value) && (!have_best || value < best)) {
      best = value;
      have_best = true;
      result.params = SamplerParams::from_vector(x);
    }
  };

  const SamplerParams init;
  NelderMeadOptions options;
  options.max_evaluations = config.iterations;
  const Vector step(0.5, 0.5, 0.5);
  minimize_nelder_mead(evaluate, init.as_vector(), step, options, record);

  Rng rng(Rng::mix(config.seed, 0x5eed));
  for (int k = 0; k < config.restarts; ++k) {
    const Vector start = init.as_vector() + Vector(rng.normal(), rng.normal(), rng.normal());
    minimize_nelder_mead(evaluate, start, step, options, record);
  }
  if (!have_best) throw NumericError("no candidate produced a finite objective");
  result.objective = best;
  return result;
}

void RateCurve::sort() {
  std::stable_sort(points.begin(), points.end(), [](const RatePoint& a, const RatePoint& b) {
    return a.rate < b.rate || (a.rate == b.rate && a.sampler < b.sampler);
  });
}

std::string RateCurve::to_csv() const {
  std::string out = "sampler,rate,metric,achieved_rate\n";
  for (const RatePoint& p : points) {
    out += p.sampler + "," + fixed6(p.rate) + "," + fixed6(p.metric) + "," + fixed6(p.achieved_rate) + "\n";
  }
  return out;
}

const RatePoint* RateCurve::find(const std::string& sampler, double rate) const {
  for (const RatePoint& p : points) {
    if (p.sampler == sampler && std::abs(p.rate - rate) < 1e-12) return &p;
  }
  return nullptr;
}

RateCurve sweep(const DatasetSplit& data, const SamplerParams& params, const SweepConfig& config) {
  if (data.train.empty() || data.validation.empty()) throw InputError("sweep needs train and test items");
  for (double r : config.rates) {
    if (!(r > 0.0 && r <= 1.0)) throw DomainError("sweep rates must lie in (0, 1]");
  }
  SamplingOptions options = config.sampling;
  options.params = params;
  const std::size_t train_count = data.train.size();
  const std::size_t sampler_count = config.samplers.size();
  const LabeledDataset& test = data.validation;

  // Each sampler gets its own classifier, trained on the raw images plus one
  // copy of each image sampled at a scheduled random rate.
  std::vector<LinearClassifier> models(sampler_count);
  std::vector<int> train_labels(data.train.labels);
  train_labels.insert(train_labels.end(), data.train.labels.begin(), data.train.labels.end());
  for (std::size_t s = 0; s < sampler_count; ++s) {
    Rng rng(Rng::mix(config.seed, 1000 + s));
    std::vector<double> rates(train_count);
    for (double& r : rates) r = rng.uniform(config.rate_min, config.rate_max);
    std::vector<ImageD> train_images(2 * train_count);
    std::copy(data.train.images.begin(), data.train.images.end(), train_images.begin());
    const std::uint64_t base = Rng::mix(config.seed, 2000 + s);
    parallel_for(train_count, config.workers, [&](std::size_t j) {
      train_images[train_count + j] =
          sample_image(data.train.images[j], config.samplers[s], rates[j], options, Rng::mix(base, j)).image;
    });
    models[s] = train_classifier(feature_matrix(train_images), train_labels, data.train.class_count, config.classifier);
  }

  RateCurve curve;
  curve.points.resize(sampler_count * config.rates.size());
  parallel_for(curve.points.size(), config.workers, [&](std::size_t cell) {
    const std::size_t s = cell / config.rates.size();
    const double rate = config.rates[cell % config.rates.size()];
    const std::uint64_t base = Rng::mix(config.seed, 3000 + s);
    double achieved = 0.0;
    const double acc = evaluate(models[s], test, [&](const ImageD& image, std::size_t item) {
      SampledImage sampled = sample_image(image, config.samplers[s], rate, options, Rng::mix(base, item));
      achieved += sampled.achieved_rate;
      return std::move(sampled.image);
    });
    curve.points[cell] = RatePoint{config.samplers[s].name(), rate, acc, achieved / double(test.size())};
  });
  const LinearClassifier full = train_classifier(data.train, config.classifier);
  curve.points.push_back(RatePoint{kFullSamplerName, 1.0, evaluate(full, test), 1.0});
  curve.sort();
  return curve;
}

std::vector<AchievedRateRow> achieved_rate_report(const std::vector<ImageD>& images, const SamplerParams& params,
                                                  const std::vector<double>& targets, std::uint64_t seed,
                                                  VarianceMode variance) {
  if (images.empty()) throw InputError("achieved-rate report needs at least one image");
  for (double t : targets) {
    if (!(t > 0.0 && t < 1.0)) throw DomainError("target rates must lie in (0, 1)");
  }
  std::vector<Heatmap> maps;
  maps.reserve(images.size());
  for (const ImageD& image : images) {
    maps.push_back(heatmap(scan(image, ScanConfig::at_bound(image.width(), image.height())), params, variance));
    if (maps.back().size() < 2) throw DomainError("achieved-rate report needs at least two samples per image");
  }

  std::vector<AchievedRateRow> rows;
  for (std::size_t t = 0; t < targets.size(); ++t) {
    AchievedRateRow row;
    row.target = targets[t];
    for (std::size_t i = 0; i < maps.size(); ++i) {
      const Eigen::Index total = maps[i].size();
      const Eigen::Index n = std::clamp<Eigen::Index>(Eigen::Index(std::llround(targets[t] * double(total))), 1, total - 1);
      const std::uint64_t s = Rng::mix(Rng::mix(seed, t), i);
      const double normalized = bernoulli_mask(keep_probability(maps[i], n, total), s).kept_fraction();
      const double raw = bernoulli_mask(maps[i].p, Rng::mix(s, 1)).kept_fraction();
      row.achieved_normalized += normalized;
      row.achieved_unnormalized += raw;
      row.deviation_normalized += std::abs(normalized - targets[t]);
      row.deviation_unnormalized += std::abs(raw - targets[t]);
    }
    const double count = double(maps.size());
    row.achieved_normalized /= count;
    row.achieved_unnormalized /= count;
    row.deviation_normalized /= count;
    row.deviation_unnormalized /= count;
    rows.push_back(row);
  }
  return rows;
}

std::string achieved_rate_csv(const std::vector<AchievedRateRow>& rows) {
  std::string out =
      "target_rate,achieved_normalized,achieved_unnormalized,deviation_normalized,deviation_unnormalized\n";
  for (const AchievedRateRow& r : rows) {
    out += fixed6(r.target) + "," + fixed6(r.achieved_normalized) + "," + fixed6(r.achieved_unnormalized) + "," +
           fixed6(r.deviation_normalized) + "," + fixed6(r.deviation_unnormalized) + "\n";
  }
  return out;
}

std::string fit_log_csv(const std::vector<FitLogEntry>& log) {
  std::string out = "iteration,objective\n";
  for (const FitLogEntry& e : log) out += std::to_string(e.iteration) + "," + fixed6(e.objective) + "\n";
  return out;
}

}  // namespace sauce
