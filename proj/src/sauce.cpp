#include "sauce/sauce.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "sauce/binary_io.hpp"
#include "sauce/rng.hpp"
#include "sauce/running_variance.hpp"

namespace sauce {

void SparseImage::validate() const {
  if (values.rows() != size() || values.cols() != channels) throw InputError("sparse image value shape mismatch");
  std::vector<char> seen(std::size_t(width) * height, 0);
  for (const GridPosition& pos : positions) {
    if (pos.row < 0 || pos.row >= height || pos.col < 0 || pos.col >= width) {
      throw InputError("sparse point outside the image");
    }
    char& flag = seen[std::size_t(pos.row) * width + pos.col];
    if (flag) throw InputError("duplicate sparse point");
    flag = 1;
  }
}

ImageD Heatmap::as_image() const {
  ImageD image(grid_width, grid_height, 1);
  image.pixels().col(0) = p;
  return image;
}

Heatmap heatmap(const SampleStream& stream, const SamplerParams& params, VarianceMode mode) {
  if (stream.empty()) throw InputError("heatmap requires a non-empty stream");
  const ScanDeltas deltas = scan_deltas(stream);
  const Eigen::Index n = stream.size();

  Heatmap hmap;
  hmap.grid_width = stream.grid_width;
  hmap.grid_height = stream.grid_height;
  hmap.d_values = Eigen::ArrayXd::Zero(n);
  hmap.p.resize(n);
  for (Eigen::Index i = 1; i < n; ++i) {
    hmap.d_values(i) = distance(deltas.theta_rate(i), deltas.intensity_change(i), params);
  }
  if (!hmap.d_values.allFinite()) throw NumericError("non-finite distance values");

  hmap.p(0) = 1.0;
  if (mode == VarianceMode::TwoPass) {
    double var = 0.0;
    if (n > 1) {
      const auto tail = hmap.d_values.tail(n - 1);
      var = (tail - tail.mean()).square().mean();
    }
    hmap.sigma_sq = std::max(var, kVarianceFloor);
    for (Eigen::Index i = 1; i < n; ++i) hmap.p(i) = probability(hmap.d_values(i), hmap.sigma_sq);
  } else {
    RunningVariance<double> running;
    hmap.sigma_sq = kVarianceFloor;
    for (Eigen::Index i = 1; i < n; ++i) {
      running.push(hmap.d_values(i));
      hmap.sigma_sq = std::max(running.population_variance(), kVarianceFloor);
      hmap.p(i) = probability(hmap.d_values(i), hmap.sigma_sq);
    }
  }
  return hmap;
}

double samplerate_logit(Eigen::Index n, Eigen::Index total) {
  if (n <= 0 || n >= total) throw DomainError("samplerate logit requires 0 < n < N");
  return std::log(double(n) / double(total - n));
}

Eigen::ArrayXd rescale01(const Eigen::ArrayXd& values) {
  if (values.size() == 0) return values;
  const double lo = values.minCoeff();
  const double hi = values.maxCoeff();
  if (!(hi > lo)) return Eigen::ArrayXd::Constant(values.size(), 0.5);
  return (values - lo) / (hi - lo);
}

Heatmap normalize(const Heatmap& hmap, Eigen::Index n, Eigen::Index total) {
  if (hmap.size() != total) throw InputError("heatmap length does not match N");
  const double shift = samplerate_logit(n, total);
  Heatmap out = hmap;
  out.p = rescale01(hmap.p + shift);
  return out;
}

SampleMask SampleMask::from_flags(Eigen::Array<bool, Eigen::Dynamic, 1> flags) {
  SampleMask mask;
  mask.n = flags.count();
  mask.keep = std::move(flags);
  return mask;
}

SampleMask SampleMask::none(Eigen::Index total) {
  return from_flags(Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(total, false));
}

SampleMask SampleMask::all(Eigen::Index total) {
  return from_flags(Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(total, true));
}

SampleMask top_k(const Eigen::ArrayXd& scores, Eigen::Index n) {
  const Eigen::Index total = scores.size();
  if (n < 0 || n > total) throw DomainError("budget must satisfy 0 <= n <= N");
  std::vector<Eigen::Index> order(static_cast<std::size_t>(total));
  std::iota(order.begin(), order.end(), Eigen::Index(0));
  // Strict total order: higher score first, then lower index.
  auto before = [&](Eigen::Index a, Eigen::Index b) {
    return scores(a) > scores(b) || (scores(a) == scores(b) && a < b);
  };
  if (n > 0 && n < total) std::nth_element(order.begin(), order.begin() + (n - 1), order.end(), before);

  SampleMask mask = SampleMask::none(total);
  for (Eigen::Index k = 0; k < n; ++k) mask.keep(order[k]) = true;
  mask.n = n;
  return mask;
}

SampleMask threshold(const Heatmap& hmap, Eigen::Index n) { return top_k(hmap.p, n); }

Eigen::ArrayXd keep_probability(const Heatmap& hmap, Eigen::Index n, Eigen::Index total) {
  if (hmap.size() != total) throw InputError("heatmap length does not match N");
  const Eigen::ArrayXd logits = hmap.p + samplerate_logit(n, total);
  return 1.0 / (1.0 + (-logits).exp());
}

SampleMask bernoulli_mask(const Eigen::ArrayXd& probabilities, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::Array<bool, Eigen::Dynamic, 1> flags(probabilities.size());
  for (Eigen::Index i = 0; i < probabilities.size(); ++i) flags(i) = rng.bernoulli(probabilities(i));
  return SampleMask::from_flags(std::move(flags));
}

SparseImage apply_mask(const SampleStream& stream, const SampleMask& mask) {
  if (mask.size() != stream.size()) throw InputError("mask length does not match stream length");
  SparseImage sparse;
  sparse.width = stream.grid_width;
  sparse.height = stream.grid_height;
  sparse.channels = stream.channels;
  sparse.positions.reserve(static_cast<std::size_t>(mask.n));
  sparse.values.resize(mask.n, stream.channels);
  for (Eigen::Index i = 0; i < stream.size(); ++i) {
    if (!mask.keep(i)) continue;
    sparse.values.row(sparse.size()) = stream.values.row(i);
    sparse.positions.push_back({int(i / stream.grid_width), int(i % stream.grid_width)});
  }
  return sparse;
}

void write_mask(const std::string& path, const SampleMask& mask) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  binary::put_u32(out, std::uint32_t(mask.size()));
  binary::put_u32(out, std::uint32_t(mask.n));
  std::vector<char> bytes(static_cast<std::size_t>((mask.size() + 7) / 8), 0);
  for (Eigen::Index i = 0; i < mask.size(); ++i) {
    if (mask.keep(i)) bytes[i / 8] = char(bytes[i / 8] | (1 << (i % 8)));
  }
  out.write(bytes.data(), std::streamsize(bytes.size()));
}

SampleMask read_mask(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  const std::uint32_t total = binary::get_u32(in);
  const std::uint32_t n = binary::get_u32(in);
  std::vector<char> bytes((total + 7) / 8);
  if (!in.read(bytes.data(), std::streamsize(bytes.size()))) throw InputError("truncated mask file " + path);
  Eigen::Array<bool, Eigen::Dynamic, 1> flags(total);
  for (std::uint32_t i = 0; i < total; ++i) flags(i) = (bytes[i / 8] >> (i % 8)) & 1;
  SampleMask mask = SampleMask::from_flags(std::move(flags));
  if (mask.n != Eigen::Index(n)) throw InputError("mask kept count disagrees with its bits");
  return mask;
}

void write_heatmap_pgm(const std::string& path, const Heatmap& hmap) { write_pgm(path, hmap.as_image()); }

std::string params_to_json(const SamplerParams& params) {
  nlohmann::ordered_json j;
  j["alpha"] = params.alpha;
  j["beta"] = params.beta;
  j["gamma"] = params.gamma;
  return j.dump(2) + "\n";
}

SamplerParams params_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    SamplerParams params{j.at("alpha").get<double>(), j.at("beta").get<double>(), j.at("gamma").get<double>()};
    if (!params.finite()) throw InputError("sampler parameters must be finite");
    return params;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("invalid sampler parameter JSON: ") + e.what());
  }
}

void write_params(const std::string& path, const SamplerParams& params) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  out << params_to_json(params);
}

SamplerParams read_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return params_from_json(buffer.str());
}

}  // namespace sauce
