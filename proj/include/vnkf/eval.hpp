#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace vnkf {

// Reference annotation on sampled-frame indices.
struct GroundTruth {
  std::size_t n = 0;
  std::vector<std::size_t> shot_boundaries;  // 0 ... n, strictly increasing
  std::vector<std::size_t> key_frames;       // one per shot, inside that shot

  std::size_t shot_count() const noexcept {
    return shot_boundaries.empty() ? 0 : shot_boundaries.size() - 1;
  }
  // Shot containing frame, or shot_count() if out of range.
  std::size_t shot_of(std::size_t frame) const;
  // Throws Error{schema_violation} with a field-level message.
  void validate() const;
};

enum class MatchStatus { match, repeat };

struct ShotAssignment {
  std::size_t frame = 0;
  std::size_t shot = 0;
  MatchStatus status = MatchStatus::match;
};

struct MatchResult {
  std::size_t matched = 0;       // N_et
  std::size_t repeated = 0;      // N_ee
  std::size_t ground_truth = 0;  // N_gt
  double recall = 0.0;           // R = N_et / N_gt
  double redundancy = 0.0;       // P = N_ee / (N_ee + N_et), 0 when nothing was extracted
  std::vector<ShotAssignment> assignments;
};

// Extracted frames are processed in ascending order; the first one landing
// in a ground-truth shot matches it, later ones in that shot are repeats.
// Throws Error{index_out_of_range}.
MatchResult match_keyframes(std::span<const std::size_t> extracted, const GroundTruth& gt);

// {"n": int, "shot_boundaries": [...], "key_frames": [...]}
GroundTruth parse_ground_truth(const nlohmann::json& j);
// Throws Error{io_failure | parse_error | schema_violation}.
GroundTruth load_ground_truth(const std::filesystem::path& path);

// {"key_frames": [...]}; segmentation output files qualify.
std::vector<std::size_t> load_predicted(const std::filesystem::path& path);

MatchResult score_external(const std::filesystem::path& predicted_path, const std::filesystem::path& gt_path);

nlohmann::json to_json(const MatchResult& result);

}  // namespace vnkf
