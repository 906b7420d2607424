#include "vnkf/eval.hpp"

#include <algorithm>
#include <fstream>

#include "vnkf/error.hpp"

namespace vnkf {

using nlohmann::json;

std::size_t GroundTruth::shot_of(std::size_t frame) const {
  if (frame >= n) return shot_count();
  auto it = std::upper_bound(shot_boundaries.begin(), shot_boundaries.end(), frame);
  return static_cast<std::size_t>(it - shot_boundaries.begin()) - 1;
}

void GroundTruth::validate() const {
  if (shot_boundaries.size() < 2) throw Error(Errc::schema_violation, "shot_boundaries: need at least [0, n]");
  if (shot_boundaries.front() != 0) throw Error(Errc::schema_violation, "shot_boundaries[0]: must be 0");
  if (shot_boundaries.back() != n) {
    throw Error(Errc::schema_violation, "shot_boundaries: last entry must equal n = " + std::to_string(n));
  }
  for (std::size_t i = 1; i < shot_boundaries.size(); ++i) {
    if (shot_boundaries[i] <= shot_boundaries[i - 1]) {
      throw Error(Errc::schema_violation, "shot_boundaries[" + std::to_string(i) + "]: not strictly increasing");
    }
  }
  if (key_frames.size() != shot_count()) {
    throw Error(Errc::schema_violation, "key_frames: expected " + std::to_string(shot_count()) +
                                            " entries (one per shot), got " + std::to_string(key_frames.size()));
  }
  for (std::size_t i = 0; i < key_frames.size(); ++i) {
    if (key_frames[i] < shot_boundaries[i] || key_frames[i] >= shot_boundaries[i + 1]) {
      throw Error(Errc::schema_violation, "key_frames[" + std::to_string(i) + "]: frame " +
                                              std::to_string(key_frames[i]) + " lies outside shot " +
                                              std::to_string(i));
    }
  }
}

MatchResult match_keyframes(std::span<const std::size_t> extracted, const GroundTruth& gt) {
  std::vector<std::size_t> frames(extracted.begin(), extracted.end());
  std::sort(frames.begin(), frames.end());

  MatchResult result;
  result.ground_truth = gt.shot_count();
  std::vector<bool> seen(gt.shot_count(), false);
  for (std::size_t frame : frames) {
    const std::size_t shot = gt.shot_of(frame);
    if (shot >= gt.shot_count()) {
      throw Error(Errc::index_out_of_range, "extracted frame " + std::to_string(frame) +
                                                " outside [0, " + std::to_string(gt.n) + ")");
    }
    if (seen[shot]) {
      ++result.repeated;
      result.assignments.push_back({frame, shot, MatchStatus::repeat});
    } else {
      seen[shot] = true;
      ++result.matched;
      result.assignments.push_back({frame, shot, MatchStatus::match});
    }
  }
  result.recall = result.ground_truth ? static_cast<double>(result.matched) / result.ground_truth : 0.0;
  const std::size_t extracted_count = result.matched + result.repeated;
  result.redundancy = extracted_count ? static_cast<double>(result.repeated) / extracted_count : 0.0;
  return result;
}

namespace {

std::vector<std::size_t> index_array(const json& j, const char* field) {
  if (!j.contains(field)) throw Error(Errc::schema_violation, std::string(field) + ": missing");
  const auto& arr = j.at(field);
  if (!arr.is_array()) throw Error(Errc::schema_violation, std::string(field) + ": must be an array");
  std::vector<std::size_t> out;
  out.reserve(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_number_unsigned()) {
      throw Error(Errc::schema_violation,
                  std::string(field) + "[" + std::to_string(i) + "]: must be a non-negative integer");
    }
    out.push_back(arr[i].get<std::size_t>());
  }
  return out;
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io_failure, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(Errc::parse_error, path.string() + ": " + e.what());
  }
}

}  // namespace

GroundTruth parse_ground_truth(const json& j) {
  if (!j.is_object()) throw Error(Errc::schema_violation, "ground truth must be a JSON object");
  if (!j.contains("n") || !j.at("n").is_number_unsigned()) {
    throw Error(Errc::schema_violation, "n: must be a non-negative integer");
  }
  GroundTruth gt;
  gt.n = j.at("n").get<std::size_t>();
  gt.shot_boundaries = index_array(j, "shot_boundaries");
  gt.key_frames = index_array(j, "key_frames");
  gt.validate();
  return gt;
}

GroundTruth load_ground_truth(const std::filesystem::path& path) {
  try {
    return parse_ground_truth(read_json(path));
  } catch (const Error& e) {
    if (e.code() == Errc::schema_violation) throw Error(Errc::schema_violation, path.string() + ": " + e.what());
    throw;
  }
}

std::vector<std::size_t> load_predicted(const std::filesystem::path& path) {
  const json j = read_json(path);
  if (!j.is_object()) throw Error(Errc::schema_violation, path.string() + ": must be a JSON object");
  return index_array(j, "key_frames");
}

MatchResult score_external(const std::filesystem::path& predicted_path, const std::filesystem::path& gt_path) {
  const GroundTruth gt = load_ground_truth(gt_path);
  const auto predicted = load_predicted(predicted_path);
  return match_keyframes(predicted, gt);
}

json to_json(const MatchResult& result) {
  json assignments = json::array();
  for (const auto& a : result.assignments) {
    assignments.push_back(
        {{"frame", a.frame}, {"shot", a.shot}, {"status", a.status == MatchStatus::match ? "match" : "repeat"}});
  }
  return {{"R", result.recall},
          {"P", result.redundancy},
          {"N_et", result.matched},
          {"N_ee", result.repeated},
          {"N_gt", result.ground_truth},
          {"assignments", assignments}};
}

}  // namespace vnkf
