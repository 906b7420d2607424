#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include <json.hpp>

#include "vnkf/entropy.hpp"
#include "vnkf/ingest.hpp"
#include "vnkf/segmentation.hpp"

namespace vnkf::cli {

inline constexpr const char* kToolVersion = "0.1.0";

// Frame counts at or above this use the stochastic backend when the entropy
// method is "auto".
inline constexpr std::size_t kAutoStochasticFrames = 512;

// Everything that influences the outputs of a run.
struct RunConfig {
  double fps = 2.0;
  std::optional<std::size_t> max_frames;
  std::size_t beam = 5;
  std::string entropy = "auto";
  int taylor_c = 64;
  int probes = 32;
  std::uint64_t seed = 0;
  std::size_t stop_window = 5;
  double stop_alpha = 0.1;
  std::optional<std::size_t> max_shots;
  bool exclude_dc = false;
  unsigned threads = 1;

  SamplingConfig sampling() const;
  EntropyMethod resolve_method(std::size_t frame_count) const;
  SearchConfig search(std::size_t frame_count) const;
};

nlohmann::json config_to_json(const RunConfig& cfg);
// Reads the fields present in j over a copy of base.
RunConfig config_from_json(const nlohmann::json& j, RunConfig base);

struct RunManifest {
  RunConfig config;
  std::string resolved_entropy;
  std::string input_path;
  std::size_t frame_count = 0;
  std::uint64_t input_digest = 0;
  std::map<std::string, double> timings_ms;
  nlohmann::json result;
};

nlohmann::json manifest_to_json(const RunManifest& m);
// Config section of a manifest written by manifest_to_json.
RunConfig load_manifest_config(const std::filesystem::path& path, const RunConfig& base);

}  // namespace vnkf::cli
