#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sauce/pipeline.hpp"
#include "sauce/sauce.hpp"
#include "sauce/taskproxy.hpp"

namespace sauce {

struct FitConfig {
  double rate_min = 0.05;
  double rate_max = 0.95;
  double lambda_drop = 1.0;
  int iterations = 40;  // objective evaluations per simplex run
  int restarts = 3;
  std::uint64_t seed = 1;
  SelectionMode selection = SelectionMode::Bernoulli;
  FillMode fill = FillMode::Nearest;
  bool normalize = true;  // samplerate shift before selection
  std::size_t subsample = 0;  // training items used to retrain the classifier per candidate; 0 = all
  TrainConfig classifier;

  void validate() const;
};

struct DatasetSplit {
  LabeledDataset train;
  LabeledDataset validation;
};

/// Seeded shuffle, then the first `train_fraction` of items go to train.
DatasetSplit split_dataset(const LabeledDataset& dataset, double train_fraction, std::uint64_t seed);

struct ObjectiveTerms {
  double task_loss = 0.0;  // mean validation cross-entropy on sampled inputs
  double droprate = 0.0;   // mean droprate loss over validation items
  double total = 0.0;      // task_loss + lambda_drop * droprate
};

/// Retrains the classifier on SAUCE-sampled training images, each at a target
/// rate drawn uniformly from [rate_min, rate_max], then scores sampled
/// validation images. All randomness derives from config.seed.
ObjectiveTerms objective_terms(const SamplerParams& params, const DatasetSplit& data, const FitConfig& config);
double objective(const SamplerParams& params, const DatasetSplit& data, const FitConfig& config);

struct FitLogEntry {
  int iteration = 0;
  double objective = 0.0;
};

struct FitResult {
  SamplerParams params;
  double objective = 0.0;
  double initial_objective = 0.0;
  std::vector<FitLogEntry> log;
};

/// Nelder-Mead from (alpha, beta, gamma) = (1, 1, 0), then from `restarts`
/// seeded random starts; returns the best candidate seen.
FitResult fit_params(const DatasetSplit& data, const FitConfig& config);

struct RatePoint {
  std::string sampler;
  double rate = 0.0;
  double metric = 0.0;
  double achieved_rate = 0.0;
};

struct RateCurve {
  std::vector<RatePoint> points;

  /// Ascending by rate, then by sampler name.
  void sort();
  /// Header `sampler,rate,metric,achieved_rate`, 6-decimal fixed point.
  std::string to_csv() const;
  const RatePoint* find(const std::string& sampler, double rate) const;
};

inline const std::vector<double> kDefaultRates = {0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.5, 0.75, 1.0};

struct SweepConfig {
  std::vector<double> rates = kDefaultRates;
  std::vector<SamplerSpec> samplers;
  SamplingOptions sampling;  // params are taken from the sweep argument
  TrainConfig classifier;
  double rate_min = 0.05;  // rate schedule for the training augmentations
  double rate_max = 0.95;
  std::uint64_t seed = 1;
  int workers = 1;
};

/// Name of the reference row recorded at rate 1.
inline constexpr const char* kFullSamplerName = "full";

/// Trains one classifier per sampler on the raw training images plus each
/// training image sampled at a scheduled random rate, then records test
/// accuracy for every (sampler, rate) cell. The "full" reference row comes
/// from a classifier trained and tested on raw images only.
RateCurve sweep(const DatasetSplit& data, const SamplerParams& params, const SweepConfig& config);

struct AchievedRateRow {
  double target = 0.0;
  double achieved_normalized = 0.0;
  double achieved_unnormalized = 0.0;
  double deviation_normalized = 0.0;  // mean per-image |achieved - target|
  double deviation_unnormalized = 0.0;
};

/// Bernoulli selection over every image at each target rate, with and
/// without the samplerate normalization. Targets must lie in (0, 1).
std::vector<AchievedRateRow> achieved_rate_report(const std::vector<ImageD>& images, const SamplerParams& params,
                                                  const std::vector<double>& targets, std::uint64_t seed,
                                                  VarianceMode variance = VarianceMode::TwoPass);

std::string achieved_rate_csv(const std::vector<AchievedRateRow>& rows);
std::string fit_log_csv(const std::vector<FitLogEntry>& log);

}  // namespace sauce
