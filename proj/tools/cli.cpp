#include "cli.hpp"

#include <chrono>
#include <functional>
#include <iostream>

#include <CLI11.hpp>

#include "manifest.hpp"
#include "vnkf/error.hpp"
#include "vnkf/eval.hpp"
#include "vnkf/ingest.hpp"
#include "vnkf/parallel.hpp"
#include "vnkf/segmentation.hpp"
#include "vnkf/simmatrix.hpp"

namespace vnkf::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::invalid_argument:
    case Errc::parse_error:
    case Errc::schema_violation:
      return kExitUsage;
    case Errc::io_failure:
    case Errc::empty_directory:
    case Errc::empty_sequence:
    case Errc::corrupt_cache:
      return kExitIo;
    case Errc::decoder_not_found:
    case Errc::decode_failure:
    case Errc::empty_video:
    case Errc::unreadable_image:
      return kExitDecode;
    default:
      return kExitInternal;
  }
}

class StageTimer {
 public:
  double lap_ms() {
    const auto now = std::chrono::steady_clock::now();
    const double ms = std::chrono::duration<double, std::milli>(now - last_).count();
    last_ = now;
    return ms;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

// Flags shared by the subcommands. Values land in `parsed`; resolve() layers
// the explicitly given ones over the defaults or a loaded manifest.
struct Flags {
  RunConfig parsed;
  std::size_t max_frames = 0;
  std::size_t max_shots = 0;
  std::string manifest;
  std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> appliers;

  Flags() { parsed.threads = default_thread_count(); }

  template <typename T>
  void add(CLI::App* app, const std::string& name, T& field, const std::string& help,
           std::function<void(RunConfig&)> apply) {
    appliers.emplace_back(app->add_option(name, field, help)->capture_default_str(), std::move(apply));
  }

  void add_common(CLI::App* app) {
    add(app, "--seed", parsed.seed, "Seed for stochastic entropy probes",
        [this](RunConfig& c) { c.seed = parsed.seed; });
    add(app, "--threads", parsed.threads, "Worker threads (results do not depend on it)",
        [this](RunConfig& c) { c.threads = parsed.threads; });
  }

  void add_sampling(CLI::App* app) {
    add(app, "--fps", parsed.fps, "Sampling rate in frames per second",
        [this](RunConfig& c) { c.fps = parsed.fps; });
    add(app, "--max-frames", max_frames, "Cap on sampled frames (0 = none)",
        [this](RunConfig& c) { c.max_frames = max_frames ? std::optional(max_frames) : std::nullopt; });
    appliers.emplace_back(app->add_flag("--exclude-dc", parsed.exclude_dc, "Leave the DC term out of the hash"),
                          [this](RunConfig& c) { c.exclude_dc = parsed.exclude_dc; });
  }

  void add_search(CLI::App* app) {
    add(app, "--beam", parsed.beam, "Beam size", [this](RunConfig& c) { c.beam = parsed.beam; });
    appliers.emplace_back(
        app->add_option("--entropy", parsed.entropy, "Entropy backend")
            ->check(CLI::IsMember({"auto", "exact", "taylor-dense", "taylor-stochastic"}))
            ->capture_default_str(),
        [this](RunConfig& c) { c.entropy = parsed.entropy; });
    add(app, "--taylor-c", parsed.taylor_c, "Taylor truncation index",
        [this](RunConfig& c) { c.taylor_c = parsed.taylor_c; });
    add(app, "--probes", parsed.probes, "Stochastic trace probes",
        [this](RunConfig& c) { c.probes = parsed.probes; });
    add(app, "--stop-window", parsed.stop_window, "Stop rule reference window",
        [this](RunConfig& c) { c.stop_window = parsed.stop_window; });
    add(app, "--stop-alpha", parsed.stop_alpha, "Stop rule relative threshold",
        [this](RunConfig& c) { c.stop_alpha = parsed.stop_alpha; });
    add(app, "--max-shots", max_shots, "Fixed shot count (0 = stop rule decides)",
        [this](RunConfig& c) { c.max_shots = max_shots ? std::optional(max_shots) : std::nullopt; });
    app->add_option("--manifest", manifest, "Take the run configuration from a manifest.json");
  }

  RunConfig resolve() const {
    RunConfig cfg;
    cfg.threads = default_thread_count();
    if (!manifest.empty()) cfg = load_manifest_config(manifest, cfg);
    for (const auto& [option, apply] : appliers) {
      if (option->count() > 0) apply(cfg);
    }
    cfg.sampling().validate();
    if (cfg.threads == 0) throw Error(Errc::invalid_argument, "--threads must be >= 1");
    return cfg;
  }
};

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw Error(Errc::io_failure, "cannot create " + dir.string());
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_failure, "cannot open " + path.string());
  out << text;
  if (!out) throw Error(Errc::io_failure, "write failed: " + path.string());
}

void report_diagnostics(const SearchResult& result, std::ostream& err) {
  for (std::size_t shots : result.monotonicity_violations) {
    err << "vnkf: warning: best total entropy rose at " << shots << " shots\n";
  }
}

// Either --input or --from-cache supplies the matrix.
SimilarityMatrix load_matrix(const std::string& input, const std::string& from_cache, const RunConfig& cfg,
                             std::vector<SampledFrame>* frames_out = nullptr) {
  if (!from_cache.empty()) return load_cache(from_cache);
  if (input.empty()) throw Error(Errc::invalid_argument, "one of --input or --from-cache is required");
  auto frames = sample_input(input, cfg.sampling());
  PHashOptions hash_options;
  hash_options.exclude_dc = cfg.exclude_dc;
  auto matrix = build_similarity_matrix(std::span<const SampledFrame>(frames), hash_options, cfg.threads);
  if (frames_out) *frames_out = std::move(frames);
  return matrix;
}

int cmd_extract(const Flags& flags, const std::string& input, const fs::path& out_dir, std::ostream& out,
                std::ostream& err) {
  const RunConfig cfg = flags.resolve();
  RunManifest manifest;
  manifest.config = cfg;
  manifest.input_path = input;
  StageTimer timer;

  const auto frames = sample_input(input, cfg.sampling());
  manifest.timings_ms["ingest"] = timer.lap_ms();
  manifest.frame_count = frames.size();
  manifest.input_digest = frames_digest(frames);

  PHashOptions hash_options;
  hash_options.exclude_dc = cfg.exclude_dc;
  const auto matrix = build_similarity_matrix(std::span<const SampledFrame>(frames), hash_options, cfg.threads);
  manifest.timings_ms["similarity"] = timer.lap_ms();

  const SearchConfig search = cfg.search(frames.size());
  manifest.resolved_entropy = std::string(to_string(search.entropy.method));
  const SearchResult result = beam_search_segment(matrix, search);
  manifest.timings_ms["segmentation"] = timer.lap_ms();
  report_diagnostics(result, err);

  ensure_directory(out_dir);
  const auto keys = key_frames(result.segmentation);
  for (std::size_t index : keys) {
    write_gray_image(frames[index].image, out_dir / ("kf_" + std::to_string(index) + ".png"));
  }
  const std::string seg_json = segmentation_json(result.segmentation, result.total_entropy);
  write_text(out_dir / "segmentation.json", seg_json);
  emit_curve(result.curve, out_dir / "entropy_curve.csv");
  manifest.timings_ms["write"] = timer.lap_ms();

  manifest.result = {{"shots", result.segmentation.shot_count()},
                     {"knee_shots", result.knee_shots ? json(*result.knee_shots) : json(nullptr)},
                     {"total_entropy", result.total_entropy}};
  write_text(out_dir / "manifest.json", manifest_to_json(manifest).dump(2) + "\n");

  err << "vnkf: " << keys.size() << " key frames from " << frames.size() << " sampled frames ("
      << manifest.resolved_entropy << " entropy)\n";
  out << seg_json;
  return kExitOk;
}

int cmd_simmat(const Flags& flags, const std::string& input, const std::string& from_cache,
               const fs::path& out_dir, const std::string& format, std::ostream& out) {
  const RunConfig cfg = flags.resolve();
  const SimilarityMatrix matrix = load_matrix(input, from_cache, cfg);
  ensure_directory(out_dir);
  const fs::path image_path = out_dir / ("similarity." + format);
  render_grayscale(matrix, image_path);
  const fs::path cache_path = out_dir / "similarity.vnsm";
  std::error_code ec;
  if (from_cache.empty() || !fs::equivalent(from_cache, cache_path, ec)) save_cache(matrix, cache_path);
  out << json{{"n", matrix.size()}, {"image", image_path.string()}, {"cache", cache_path.string()}}.dump() << "\n";
  return kExitOk;
}

int cmd_curve(const Flags& flags, const std::string& input, const std::string& from_cache,
              const fs::path& out_dir, std::ostream& out, std::ostream& err) {
  const RunConfig cfg = flags.resolve();
  const SimilarityMatrix matrix = load_matrix(input, from_cache, cfg);
  const SearchResult result = beam_search_segment(matrix, cfg.search(matrix.size()));
  report_diagnostics(result, err);
  ensure_directory(out_dir);
  const fs::path csv = out_dir / "entropy_curve.csv";
  emit_curve(result.curve, csv);
  out << json{{"rows", result.curve.size()},
              {"knee_shots", result.knee_shots ? json(*result.knee_shots) : json(nullptr)},
              {"curve", csv.string()}}
             .dump()
      << "\n";
  return kExitOk;
}

int cmd_eval(const std::string& gt_path, const std::string& pred_path, std::ostream& out) {
  const MatchResult result = score_external(pred_path, gt_path);
  out << to_json(result).dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Key-frame extraction by entropy-minimizing shot segmentation", "vnkf"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  Flags extract_flags, simmat_flags, curve_flags;
  std::string input, from_cache, out_dir, format = "png", gt_path, pred_path;
  std::uint64_t eval_seed = 0;

  auto* extract = app.add_subcommand("extract", "Segment into shots and write key frames");
  extract->add_option("--input", input, "Video file or image directory")->required();
  extract->add_option("--out", out_dir, "Output directory")->required();
  extract_flags.add_common(extract);
  extract_flags.add_sampling(extract);
  extract_flags.add_search(extract);

  auto* simmat = app.add_subcommand("simmat", "Render the similarity matrix and write its cache");
  simmat->add_option("--input", input, "Video file or image directory");
  simmat->add_option("--from-cache", from_cache, "Load the matrix from a .vnsm cache");
  simmat->add_option("--out", out_dir, "Output directory")->required();
  simmat->add_option("--format", format, "Image format")->check(CLI::IsMember({"png", "pgm"}))->capture_default_str();
  simmat_flags.add_common(simmat);
  simmat_flags.add_sampling(simmat);

  auto* curve = app.add_subcommand("curve", "Write the entropy curve of the beam search");
  curve->add_option("--input", input, "Video file or image directory");
  curve->add_option("--from-cache", from_cache, "Load the matrix from a .vnsm cache");
  curve->add_option("--out", out_dir, "Output directory")->required();
  curve_flags.add_common(curve);
  curve_flags.add_sampling(curve);
  curve_flags.add_search(curve);

  auto* eval = app.add_subcommand("eval", "Score predicted key frames against ground truth");
  eval->add_option("--gt", gt_path, "Ground-truth JSON")->required();
  eval->add_option("--pred", pred_path, "Predicted key frames JSON")->required();
  eval->add_option("--seed", eval_seed, "Accepted for uniformity; scoring is deterministic");

  std::vector<const char*> argv{"vnkf"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "vnkf: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (extract->parsed()) return cmd_extract(extract_flags, input, out_dir, out, err);
    if (simmat->parsed()) return cmd_simmat(simmat_flags, input, from_cache, out_dir, format, out);
    if (curve->parsed()) return cmd_curve(curve_flags, input, from_cache, out_dir, out, err);
    if (eval->parsed()) return cmd_eval(gt_path, pred_path, out);
  } catch (const Error& e) {
    err << "vnkf: error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "vnkf: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace vnkf::cli
