#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "vnkf/entropy.hpp"
#include "vnkf/simmatrix.hpp"

namespace vnkf {

// Shot boundaries with end sentinel N: shot i covers [boundaries[i], boundaries[i+1]).
struct Segmentation {
  std::vector<std::size_t> boundaries;

  std::size_t shot_count() const noexcept { return boundaries.empty() ? 0 : boundaries.size() - 1; }
  // Throws Error{invalid_argument} unless boundaries start at 0, end at
  // frame_count and strictly increase.
  void validate(std::size_t frame_count) const;

  friend bool operator==(const Segmentation&, const Segmentation&) = default;
};

struct StopRule {
  std::size_t window = 5;
  double rel_threshold = 0.1;

  void validate() const;
};

struct SearchConfig {
  std::size_t beam_size = 5;
  StopRule stop_rule;
  // When set, search runs to exactly this many shots (capped at N) and the
  // stop rule only reports where the knee would have been.
  std::optional<std::size_t> max_shots;
  EntropyConfig entropy;
  unsigned threads = 1;
  bool use_cache = true;

  void validate() const;
};

struct CurvePoint {
  std::size_t shots = 0;
  double total_entropy = 0.0;

  friend bool operator==(const CurvePoint&, const CurvePoint&) = default;
};
using EntropyCurve = std::vector<CurvePoint>;

// Memoized segment entropies keyed by (begin, end). Safe for concurrent use.
class EntropyCache {
 public:
  std::optional<double> find(std::size_t begin, std::size_t end) const;
  void insert(std::size_t begin, std::size_t end, double value);
  std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::map<std::pair<std::size_t, std::size_t>, double> values_;
};

// Entropy of the trace-normalized principal submatrix over [begin, end).
// Stochastic runs derive the probe seed from (cfg.seed, begin, end) so the
// value does not depend on evaluation order. Throws Error{invalid_range}.
double segment_entropy(const SimilarityMatrix& m, std::size_t begin, std::size_t end,
                       const EntropyConfig& cfg, EntropyCache* cache = nullptr);

struct SearchResult {
  Segmentation segmentation;
  double total_entropy = 0.0;
  EntropyCurve curve;
  // Shot count where the stop rule fired, if it did.
  std::optional<std::size_t> knee_shots;
  // Curve steps where the best total rose by more than 1e-9.
  std::vector<std::size_t> monotonicity_violations;
};

// Beam search over boundary sets, one boundary added per iteration; the K
// lowest total-entropy candidates survive, ties broken by lexicographic
// boundary order.
SearchResult beam_search_segment(const SimilarityMatrix& m, const SearchConfig& cfg);

// True when the latest drop is <= 0 (1e-12 absorbs rounding) or below rel_threshold times the mean of
// the first min(window, available) drops.
bool detect_stop(const EntropyCurve& curve, const StopRule& rule);

// First sampled frame of each shot.
std::vector<std::size_t> key_frames(const Segmentation& seg);

// "num_shots,total_entropy" header plus one row per point, %.12g values.
std::string curve_csv(const EntropyCurve& curve);
void emit_curve(const EntropyCurve& curve, const std::filesystem::path& path);

// {"boundaries": [...], "key_frames": [...], "total_entropy": x}
std::string segmentation_json(const Segmentation& seg, double total_entropy);

}  // namespace vnkf
