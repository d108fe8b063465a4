#include "sauce/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "sauce/corpus.hpp"
#include "sauce/fit.hpp"
#include "sauce/pipeline.hpp"
#include "sauce/reconstruct.hpp"
#include "sauce/rng.hpp"
#include "sauce/scanner.hpp"
#include "sauce/twostage.hpp"

namespace sauce {
namespace {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

constexpr std::uint64_t kDefaultSeed = 1;

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << text;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::string image_extension(int channels) { return channels == 3 ? ".png" : ".pgm"; }

// Every option of `cmd` with its effective value, in declaration order.
ordered_json resolved_flags(const CLI::App& cmd) {
  ordered_json flags = ordered_json::object();
  for (const CLI::Option* opt : cmd.get_options()) {
    const std::string name = opt->get_name();
    if (name == "--help") continue;
    const bool is_flag = opt->get_expected_min() == 0;
    std::string value;
    if (opt->count() > 0) {
      value = is_flag ? "true" : opt->as<std::string>();
    } else {
      value = is_flag ? "false" : opt->get_default_str();
    }
    flags[name] = value;
  }
  return flags;
}

void write_manifest(const std::string& path, const std::vector<std::string>& args, const CLI::App& cmd,
                    std::uint64_t seed, const std::vector<std::string>& inputs,
                    const std::vector<std::string>& outputs) {
  ordered_json m;
  m["schema_version"] = kManifestSchemaVersion;
  m["tool"] = "sauce";
  m["tool_version"] = kToolVersion;
  m["command"] = cmd.get_name();
  m["args"] = args;
  m["seed"] = seed;
  m["flags"] = resolved_flags(cmd);
  ordered_json in = ordered_json::array();
  for (const auto& path : inputs) {
    if (!path.empty()) in.push_back(path);
  }
  m["inputs"] = in;
  m["outputs"] = outputs;
  write_text(path, m.dump(2) + "\n");
}

SelectionMode parse_selection(const std::string& s) {
  return s == "bernoulli" ? SelectionMode::Bernoulli : SelectionMode::TopK;
}
FillMode parse_fill(const std::string& s) { return s == "zero" ? FillMode::Zero : FillMode::Nearest; }
VarianceMode parse_variance(const std::string& s) {
  return s == "streaming" ? VarianceMode::Streaming : VarianceMode::TwoPass;
}

struct Options {
  std::uint64_t seed = kDefaultSeed;
  // scan
  std::string input;
  std::string output;
  int footprint = 1;
  double sr_mult = 1.0;
  bool clamp_flyback = false;
  double acceptance_angle = 0.0;
  double angular_velocity = 0.0;
  double samplerate = 0.0;
  double pixel_pitch = 0.0;
  // sampling
  std::string sampler = "sauce";
  double rate = 0.25;
  std::string params_path;
  std::string selection = "topk";
  std::string fit_selection = "bernoulli";
  std::string variance = "twopass";
  std::string fill = "nearest";
  bool no_normalize = false;
  // fit / sweep / report
  std::string log_path;
  double lambda_drop = 1.0;
  int iterations = 40;
  int restarts = 3;
  std::size_t subsample = 0;
  double rate_min = 0.05;
  double rate_max = 0.95;
  int epochs = TrainConfig{}.epochs;
  double learning_rate = TrainConfig{}.learning_rate;
  double train_fraction = 0.8;
  std::vector<double> rates = kDefaultRates;
  std::vector<std::string> samplers = {"sauce", "uniform", "random", "lc", "mar", "twostage:f=2"};
  std::vector<double> targets = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  int workers = 1;
  // corpus
  int per_class = 20;
  int size = 32;
  double noise = 0.03;
};

SamplerParams load_params_or_default(const std::string& path) {
  return path.empty() ? SamplerParams{} : read_params(path);
}

TrainConfig train_config(const Options& o) {
  TrainConfig config;
  config.epochs = o.epochs;
  config.learning_rate = o.learning_rate;
  config.seed = Rng::mix(o.seed, 77);
  return config;
}

int cmd_scan(const Options& o, const std::vector<std::string>& args, const CLI::App& cmd, std::ostream& out) {
  const ImageD image = read_image(o.input);
  ScanConfig config = ScanConfig::at_bound(image.width(), image.height(), o.footprint, o.sr_mult);
  if (o.acceptance_angle > 0.0) config.acceptance_angle = o.acceptance_angle;
  if (o.angular_velocity > 0.0) config.angular_velocity = o.angular_velocity;
  if (o.samplerate > 0.0) config.samplerate = o.samplerate;
  if (o.pixel_pitch > 0.0) config.pixel_pitch = o.pixel_pitch;
  config.clamp_flyback = o.clamp_flyback;
  const SampleStream stream = scan(image, config);
  write_stream(o.output, stream);
  write_manifest(o.output + ".manifest.json", args, cmd, o.seed, {o.input}, {o.output});
  out << "scanned " << stream.size() << " samples (" << stream.grid_width << "x" << stream.grid_height
      << "), footprint " << config.footprint_px() << " px, step " << config.step_px() << " px\n";
  return kExitSuccess;
}

int cmd_sample(const Options& o, const std::vector<std::string>& args, const CLI::App& cmd, std::ostream& out) {
  SampleStream stream = read_stream(o.input);
  stream.clamp_flyback = o.clamp_flyback;
  const SamplerSpec sampler = SamplerSpec::parse(o.sampler);
  SamplingOptions options;
  options.params = load_params_or_default(o.params_path);
  options.selection = parse_selection(o.selection);
  options.fill = parse_fill(o.fill);
  options.variance = parse_variance(o.variance);
  options.normalize = !o.no_normalize;

  const SampledImage result = sample_stream(stream, sampler, o.rate, options, o.seed);
  const std::string ext = image_extension(stream.channels);
  std::vector<std::string> outputs = {o.output + ".mask", o.output + ".recon" + ext, o.output + ".kept" + ext,
                                      o.output + ".csv"};
  write_mask(outputs[0], result.mask);
  write_image(outputs[1], result.image);
  write_image(outputs[2], zero_fill(result.sparse));
  if (result.heatmap) {
    outputs.push_back(o.output + ".heatmap.pgm");
    write_heatmap_pgm(outputs.back(), *result.heatmap);
  }
  if (sampler.kind == SamplerKind::TwoStage && result.first_pass_samples > 0) {
    outputs.push_back(o.output + ".first.mask");
    write_mask(outputs.back(), SampleMask::all(result.first_pass_samples));
  }

  RateCurve row;
  row.points.push_back({sampler.name(), o.rate, psnr(result.image, stream.as_image()), result.achieved_rate});
  write_text(outputs[3], row.to_csv());
  write_manifest(o.output + ".manifest.json", args, cmd, o.seed, {o.input, o.params_path}, outputs);
  out << row.to_csv();
  return kExitSuccess;
}

LabeledDataset load_dataset(const Options& o) {
  LabeledDataset dataset = load_dataset_dir(o.input, o.seed);
  if (dataset.size() < 2) throw InputError("dataset needs at least two images");
  return dataset;
}

int cmd_fit(const Options& o, const std::vector<std::string>& args, const CLI::App& cmd, std::ostream& out) {
  const DatasetSplit split = split_dataset(load_dataset(o), o.train_fraction, o.seed);
  FitConfig config;
  config.rate_min = o.rate_min;
  config.rate_max = o.rate_max;
  config.lambda_drop = o.lambda_drop;
  config.iterations = o.iterations;
  config.restarts = o.restarts;
  config.seed = o.seed;
  config.selection = parse_selection(o.fit_selection);
  config.fill = parse_fill(o.fill);
  config.subsample = o.subsample;
  config.classifier = train_config(o);
  const FitResult result = fit_params(split, config);

  const std::string log_path = o.log_path.empty() ? o.output + ".log.csv" : o.log_path;
  write_params(o.output, result.params);
  write_text(log_path, fit_log_csv(result.log));
  write_manifest(o.output + ".manifest.json", args, cmd, o.seed, {o.input}, {o.output, log_path});
  out << params_to_json(result.params) << "objective " << result.objective << " (initial "
      << result.initial_objective << ")\n";
  return kExitSuccess;
}

int cmd_sweep(const Options& o, const std::vector<std::string>& args, const CLI::App& cmd, std::ostream& out) {
  const DatasetSplit split = split_dataset(load_dataset(o), o.train_fraction, o.seed);
  SweepConfig config;
  config.rates = o.rates;
  for (const auto& s : o.samplers) config.samplers.push_back(SamplerSpec::parse(s));
  config.sampling.selection = parse_selection(o.selection);
  config.sampling.fill = parse_fill(o.fill);
  config.classifier = train_config(o);
  config.rate_min = o.rate_min;
  config.rate_max = o.rate_max;
  config.seed = o.seed;
  config.workers = o.workers;
  const RateCurve curve = sweep(split, load_params_or_default(o.params_path), config);
  write_text(o.output, curve.to_csv());
  write_manifest(o.output + ".manifest.json", args, cmd, o.seed, {o.input, o.params_path}, {o.output});
  out << curve.to_csv();
  return kExitSuccess;
}

int cmd_report(const Options& o, const std::vector<std::string>& args, const CLI::App& cmd, std::ostream& out) {
  const LabeledDataset dataset = load_dataset(o);
  const auto rows =
      achieved_rate_report(dataset.images, load_params_or_default(o.params_path), o.targets, o.seed,
                           parse_variance(o.variance));
  write_text(o.output, achieved_rate_csv(rows));
  write_manifest(o.output + ".manifest.json", args, cmd, o.seed, {o.input, o.params_path}, {o.output});
  out << achieved_rate_csv(rows);
  return kExitSuccess;
}

int cmd_corpus(const Options& o, const std::vector<std::string>& args, const CLI::App& cmd, std::ostream& out) {
  GlyphCorpusConfig config;
  config.width = o.size;
  config.height = o.size;
  config.per_class = o.per_class;
  config.noise = o.noise;
  config.seed = o.seed;
  const LabeledDataset dataset = make_glyph_corpus(config);
  write_dataset_dir(o.output, dataset);
  write_manifest((fs::path(o.output) / "manifest.json").string(), args, cmd, o.seed, {}, {o.output});
  out << "wrote " << dataset.size() << " images to " << o.output << "\n";
  return kExitSuccess;
}

void add_seed(CLI::App* cmd, Options& o) {
  cmd->add_option("--seed", o.seed, "Random seed")->envname("SAUCE_SEED")->capture_default_str();
}

void add_sampling_flags(CLI::App* cmd, Options& o, std::string& selection) {
  cmd->add_option("--selection", selection, "SAUCE selection: topk or bernoulli")
      ->check(CLI::IsMember({"topk", "bernoulli"}))
      ->capture_default_str();
  cmd->add_option("--fill", o.fill, "Reconstruction: nearest or zero")
      ->check(CLI::IsMember({"nearest", "zero"}))
      ->capture_default_str();
}

void add_training_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--epochs", o.epochs, "Classifier training epochs")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--lr", o.learning_rate, "Classifier learning rate")->check(CLI::PositiveNumber)->capture_default_str();
  cmd->add_option("--rate-min", o.rate_min, "Lowest scheduled training rate")->capture_default_str();
  cmd->add_option("--rate-max", o.rate_max, "Highest scheduled training rate")->capture_default_str();
  cmd->add_option("--train-fraction", o.train_fraction, "Train share of the dataset split")->capture_default_str();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Scanning single-pixel camera simulator and adaptive sampler"};
  app.require_subcommand(1);
  Options o;

  auto* scan_cmd = app.add_subcommand("scan", "Raster-scan an image into an SPSC stream");
  scan_cmd->add_option("image", o.input, "PGM or PNG image")->required();
  scan_cmd->add_option("-o,--output", o.output, "Stream file")->required();
  scan_cmd->add_option("--footprint", o.footprint, "Footprint width in pixels")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  scan_cmd->add_option("--sr-mult", o.sr_mult, "Samplerate as a multiple of the no-overlap bound")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  scan_cmd->add_option("--acceptance-angle", o.acceptance_angle, "Acceptance angle, degrees (overrides --footprint)");
  scan_cmd->add_option("--angular-velocity", o.angular_velocity, "Angular velocity, degrees/s");
  scan_cmd->add_option("--samplerate", o.samplerate, "Samplerate, Hz (overrides --sr-mult)");
  scan_cmd->add_option("--pixel-pitch", o.pixel_pitch, "Degrees per source pixel");
  scan_cmd->add_flag("--clamp-flyback", o.clamp_flyback, "Use the in-row step as the flyback scan rate");
  add_seed(scan_cmd, o);

  auto* sample_cmd = app.add_subcommand("sample", "Select samples from a stream");
  sample_cmd->add_option("stream", o.input, "SPSC stream file")->required();
  sample_cmd->add_option("-o,--output", o.output, "Output path prefix")->required();
  sample_cmd->add_option("--sampler", o.sampler, "sauce, uniform, random, lc, mar[:rho=R], twostage[:f=F]")
      ->capture_default_str();
  sample_cmd->add_option("--rate", o.rate, "Target samplerate in (0, 1]")->capture_default_str();
  sample_cmd->add_option("--params", o.params_path, "SamplerParams JSON (default alpha=1 beta=1 gamma=0)");
  sample_cmd->add_option("--variance", o.variance, "twopass or streaming")
      ->check(CLI::IsMember({"twopass", "streaming"}))
      ->capture_default_str();
  sample_cmd->add_flag("--no-normalize", o.no_normalize, "Skip the samplerate normalization");
  sample_cmd->add_flag("--clamp-flyback", o.clamp_flyback, "Use the in-row step as the flyback scan rate");
  add_sampling_flags(sample_cmd, o, o.selection);
  add_seed(sample_cmd, o);

  auto* fit_cmd = app.add_subcommand("fit", "Fit sampler parameters against the proxy classifier");
  fit_cmd->add_option("dataset", o.input, "Dataset directory (one subdirectory per class)")->required();
  fit_cmd->add_option("-o,--output", o.output, "SamplerParams JSON")->required();
  fit_cmd->add_option("--log", o.log_path, "Fit log CSV (default <output>.log.csv)");
  fit_cmd->add_option("--lambda-drop", o.lambda_drop, "Droprate loss weight")->capture_default_str();
  fit_cmd->add_option("--iterations", o.iterations, "Objective evaluations per simplex run")->capture_default_str();
  fit_cmd->add_option("--restarts", o.restarts, "Random restarts")->capture_default_str();
  fit_cmd->add_option("--subsample", o.subsample, "Training items per candidate (0 = all)")->capture_default_str();
  add_sampling_flags(fit_cmd, o, o.fit_selection);
  add_training_flags(fit_cmd, o);
  add_seed(fit_cmd, o);

  auto* sweep_cmd = app.add_subcommand("sweep", "Accuracy against samplerate for several samplers");
  sweep_cmd->add_option("dataset", o.input, "Dataset directory")->required();
  sweep_cmd->add_option("-o,--output", o.output, "Curve CSV")->required();
  sweep_cmd->add_option("--params", o.params_path, "SamplerParams JSON");
  sweep_cmd->add_option("--rates", o.rates, "Comma-separated rates in (0, 1]")->delimiter(',')->capture_default_str();
  sweep_cmd->add_option("--samplers", o.samplers, "Comma-separated samplers")->delimiter(',')->capture_default_str();
  sweep_cmd->add_option("--workers", o.workers, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
  add_sampling_flags(sweep_cmd, o, o.selection);
  add_training_flags(sweep_cmd, o);
  add_seed(sweep_cmd, o);

  auto* report_cmd = app.add_subcommand("report", "Achieved vs target samplerate under Bernoulli selection");
  report_cmd->add_option("dataset", o.input, "Dataset directory")->required();
  report_cmd->add_option("-o,--output", o.output, "Report CSV")->required();
  report_cmd->add_option("--params", o.params_path, "SamplerParams JSON");
  report_cmd->add_option("--targets", o.targets, "Comma-separated target rates in (0, 1)")
      ->delimiter(',')
      ->capture_default_str();
  report_cmd->add_option("--variance", o.variance, "twopass or streaming")
      ->check(CLI::IsMember({"twopass", "streaming"}))
      ->capture_default_str();
  add_seed(report_cmd, o);

  auto* corpus_cmd = app.add_subcommand("corpus", "Write the synthetic 10-class glyph dataset");
  corpus_cmd->add_option("output", o.output, "Output directory")->required();
  corpus_cmd->add_option("--per-class", o.per_class, "Images per class")->check(CLI::PositiveNumber)->capture_default_str();
  corpus_cmd->add_option("--size", o.size, "Image width and height")->capture_default_str();
  corpus_cmd->add_option("--noise", o.noise, "Gaussian noise standard deviation")->capture_default_str();
  add_seed(corpus_cmd, o);

  std::string manifest_path;
  auto* rerun_cmd = app.add_subcommand("rerun", "Re-execute a command from its manifest");
  rerun_cmd->add_option("manifest", manifest_path, "Manifest JSON")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitSuccess;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (rerun_cmd->parsed()) {
      const auto manifest = nlohmann::json::parse(read_text(manifest_path));
      if (manifest.at("schema_version").get<int>() != kManifestSchemaVersion) {
        throw InputError("unsupported manifest schema version");
      }
      return run_cli(manifest.at("args").get<std::vector<std::string>>(), out, err);
    }

    CLI::App* cmd = app.get_subcommands().front();
    // Record the seed explicitly so the manifest replays without the environment.
    std::vector<std::string> canonical = args;
    if (std::find(args.begin(), args.end(), "--seed") == args.end()) {
      canonical.push_back("--seed");
      canonical.push_back(std::to_string(o.seed));
    }
    if (cmd == scan_cmd) return cmd_scan(o, canonical, *cmd, out);
    if (cmd == sample_cmd) return cmd_sample(o, canonical, *cmd, out);
    if (cmd == fit_cmd) return cmd_fit(o, canonical, *cmd, out);
    if (cmd == sweep_cmd) return cmd_sweep(o, canonical, *cmd, out);
    if (cmd == report_cmd) return cmd_report(o, canonical, *cmd, out);
    if (cmd == corpus_cmd) return cmd_corpus(o, canonical, *cmd, out);
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "internal failure: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitUsage;
}

}  // namespace sauce
