#include "manifest.hpp"

#include <cstdio>
#include <fstream>

#include "vnkf/error.hpp"

namespace vnkf::cli {

using nlohmann::json;

SamplingConfig RunConfig::sampling() const {
  SamplingConfig s;
  s.fps = fps;
  s.max_frames = max_frames;
  return s;
}

EntropyMethod RunConfig::resolve_method(std::size_t frame_count) const {
  if (entropy == "auto") {
    return frame_count < kAutoStochasticFrames ? EntropyMethod::exact : EntropyMethod::taylor_stochastic;
  }
  return parse_entropy_method(entropy);
}

SearchConfig RunConfig::search(std::size_t frame_count) const {
  SearchConfig s;
  s.beam_size = beam;
  s.stop_rule.window = stop_window;
  s.stop_rule.rel_threshold = stop_alpha;
  s.max_shots = max_shots;
  s.entropy.method = resolve_method(frame_count);
  s.entropy.taylor_terms = taylor_c;
  s.entropy.probes = probes;
  s.entropy.seed = seed;
  s.threads = threads;
  return s;
}

json config_to_json(const RunConfig& cfg) {
  json j;
  j["fps"] = cfg.fps;
  j["max_frames"] = cfg.max_frames ? json(*cfg.max_frames) : json(nullptr);
  j["beam"] = cfg.beam;
  j["entropy"] = cfg.entropy;
  j["taylor_c"] = cfg.taylor_c;
  j["probes"] = cfg.probes;
  j["seed"] = cfg.seed;
  j["stop_window"] = cfg.stop_window;
  j["stop_alpha"] = cfg.stop_alpha;
  j["max_shots"] = cfg.max_shots ? json(*cfg.max_shots) : json(nullptr);
  j["exclude_dc"] = cfg.exclude_dc;
  j["threads"] = cfg.threads;
  return j;
}

RunConfig config_from_json(const json& j, RunConfig base) {
  try {
    if (j.contains("fps")) base.fps = j.at("fps").get<double>();
    if (j.contains("max_frames")) {
      const auto& v = j.at("max_frames");
      base.max_frames = v.is_null() ? std::nullopt : std::optional(v.get<std::size_t>());
    }
    if (j.contains("beam")) base.beam = j.at("beam").get<std::size_t>();
    if (j.contains("entropy")) base.entropy = j.at("entropy").get<std::string>();
    if (j.contains("taylor_c")) base.taylor_c = j.at("taylor_c").get<int>();
    if (j.contains("probes")) base.probes = j.at("probes").get<int>();
    if (j.contains("seed")) base.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("stop_window")) base.stop_window = j.at("stop_window").get<std::size_t>();
    if (j.contains("stop_alpha")) base.stop_alpha = j.at("stop_alpha").get<double>();
    if (j.contains("max_shots")) {
      const auto& v = j.at("max_shots");
      base.max_shots = v.is_null() ? std::nullopt : std::optional(v.get<std::size_t>());
    }
    if (j.contains("exclude_dc")) base.exclude_dc = j.at("exclude_dc").get<bool>();
    if (j.contains("threads")) base.threads = j.at("threads").get<unsigned>();
  } catch (const json::exception& e) {
    throw Error(Errc::schema_violation, std::string("manifest config: ") + e.what());
  }
  return base;
}

json manifest_to_json(const RunManifest& m) {
  char digest[32];
  std::snprintf(digest, sizeof digest, "fnv1a64:%016llx", static_cast<unsigned long long>(m.input_digest));
  json j;
  j["tool"] = "vnkf";
  j["version"] = kToolVersion;
  j["config"] = config_to_json(m.config);
  j["config"]["resolved_entropy"] = m.resolved_entropy;
  j["input"] = {{"path", m.input_path}, {"frames", m.frame_count}, {"digest", digest}};
  j["timings_ms"] = m.timings_ms;
  j["result"] = m.result;
  return j;
}

RunConfig load_manifest_config(const std::filesystem::path& path, const RunConfig& base) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_failure, "cannot open manifest " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(Errc::parse_error, path.string() + ": " + e.what());
  }
  if (!j.is_object() || !j.contains("config") || !j.at("config").is_object()) {
    throw Error(Errc::schema_violation, path.string() + ": missing config object");
  }
  return config_from_json(j.at("config"), base);
}

}  // namespace vnkf::cli
