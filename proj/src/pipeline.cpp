#include "sauce/pipeline.hpp"

#include <cmath>
#include <sstream>

#include "sauce/baselines.hpp"
#include "sauce/reconstruct.hpp"
#include "sauce/scanner.hpp"
#include "sauce/twostage.hpp"

namespace sauce {
namespace {

std::string format_number(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

}  // namespace

std::string SamplerSpec::name() const {
  switch (kind) {
    case SamplerKind::Sauce: return "sauce";
    case SamplerKind::Uniform: return "uniform";
    case SamplerKind::Random: return "random";
    case SamplerKind::LevelCrossing: return "lc";
    case SamplerKind::Mar: return rho == kDefaultMarRandomFraction ? "mar" : "mar:rho=" + format_number(rho);
    case SamplerKind::TwoStage: return "twostage:f=" + std::to_string(downscale);
  }
  return "unknown";
}

SamplerSpec SamplerSpec::parse(const std::string& text) {
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string option = colon == std::string::npos ? "" : text.substr(colon + 1);
  SamplerSpec spec;
  auto option_value = [&](const std::string& key) -> std::string {
    if (option.empty()) return {};
    if (option.rfind(key + "=", 0) != 0) throw InputError("unknown sampler option '" + option + "'");
    return option.substr(key.size() + 1);
  };
  try {
    if (head == "sauce") {
      spec.kind = SamplerKind::Sauce;
    } else if (head == "uniform") {
      spec.kind = SamplerKind::Uniform;
    } else if (head == "random") {
      spec.kind = SamplerKind::Random;
    } else if (head == "lc") {
      spec.kind = SamplerKind::LevelCrossing;
    } else if (head == "mar") {
      spec.kind = SamplerKind::Mar;
      if (const std::string v = option_value("rho"); !v.empty()) spec.rho = std::stod(v);
    } else if (head == "twostage") {
      spec.kind = SamplerKind::TwoStage;
      if (const std::string v = option_value("f"); !v.empty()) spec.downscale = std::stoi(v);
    } else {
      throw InputError("unknown sampler '" + text + "'");
    }
  } catch (const std::logic_error&) {
    throw InputError("malformed sampler option in '" + text + "'");
  }
  if (!option.empty() && spec.kind != SamplerKind::Mar && spec.kind != SamplerKind::TwoStage) {
    throw InputError("sampler '" + head + "' takes no options");
  }
  return spec;
}

Eigen::Index budget_for_rate(double rate, Eigen::Index total) {
  if (!(rate > 0.0 && rate <= 1.0)) throw DomainError("samplerate must lie in (0, 1]");
  return std::clamp<Eigen::Index>(Eigen::Index(std::llround(rate * double(total))), 1, total);
}

SampleMask select_samples(const Heatmap& hmap, Eigen::Index n, const SamplingOptions& options, std::uint64_t seed) {
  const Eigen::Index total = hmap.size();
  if (n < 0 || n > total) throw DomainError("budget must satisfy 0 <= n <= N");
  const bool interior = n > 0 && n < total;
  if (options.selection == SelectionMode::TopK) {
    return (options.normalize && interior) ? threshold(normalize(hmap, n, total), n) : threshold(hmap, n);
  }
  if (!interior) return n == 0 ? SampleMask::none(total) : SampleMask::all(total);
  return bernoulli_mask(options.normalize ? keep_probability(hmap, n, total) : hmap.p, seed);
}

ImageD fill(const SparseImage& sparse, FillMode mode) {
  if (mode == FillMode::Zero || sparse.empty()) return zero_fill(sparse);
  return nearest_fill(sparse);
}

SampledImage sample_image(const ImageD& image, const SamplerSpec& sampler, double rate,
                          const SamplingOptions& options, std::uint64_t seed) {
  return sample_stream(scan(image, ScanConfig::at_bound(image.width(), image.height())), sampler, rate, options, seed);
}

SampledImage sample_stream(const SampleStream& stream, const SamplerSpec& sampler, double rate,
                           const SamplingOptions& options, std::uint64_t seed) {
  if (stream.empty()) throw InputError("cannot sample an empty stream");
  const Eigen::Index total = stream.size();
  SampledImage out;
  out.budget = budget_for_rate(rate, total);

  if (sampler.kind == SamplerKind::Sauce) out.heatmap = heatmap(stream, options.params, options.variance);
  if (out.budget == total) {
    out.mask = SampleMask::all(total);
  } else {
    switch (sampler.kind) {
      case SamplerKind::Sauce:
        out.mask = select_samples(*out.heatmap, out.budget, options, seed);
        break;
      case SamplerKind::Uniform: out.mask = uniform_mask(total, out.budget); break;
      case SamplerKind::Random: out.mask = random_mask(total, out.budget, seed); break;
      case SamplerKind::LevelCrossing: out.mask = level_crossing_at_rate(stream, out.budget).mask; break;
      case SamplerKind::Mar: out.mask = mar_mask(stream, out.budget, sampler.rho, seed); break;
      case SamplerKind::TwoStage: {
        // The rate axis counts both passes; whatever the first pass does not
        // use goes to the second.
        const ImageD image = stream.as_image();
        TwoStageConfig config{sampler.downscale, 0, options.params, true};
        const auto first_samples = ScanConfig::at_bound(image.width(), image.height(), sampler.downscale).sample_count();
        config.second_pass_budget = std::clamp<Eigen::Index>(out.budget - first_samples, 0, total);
        const TwoStageResult result = two_stage_mask(image, config);
        out.mask = result.mask;
        out.heatmap = result.upsampled;
        out.first_pass_samples = result.first_pass_samples;
        out.sparse = two_stage_samples(image, result, config);
        out.achieved_rate = result.effective_rate;
        out.image = fill(out.sparse, options.fill);
        return out;
      }
    }
  }
  out.sparse = apply_mask(stream, out.mask);
  out.achieved_rate = out.mask.kept_fraction();
  out.image = fill(out.sparse, options.fill);
  return out;
}

}  // namespace sauce
