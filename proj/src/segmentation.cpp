#include "vnkf/segmentation.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <unordered_map>

#include <json.hpp>

#include "vnkf/error.hpp"
#include "vnkf/parallel.hpp"

namespace vnkf {

void Segmentation::validate(std::size_t frame_count) const {
  if (boundaries.size() < 2 || boundaries.front() != 0 || boundaries.back() != frame_count) {
    throw Error(Errc::invalid_argument, "segmentation must start at 0 and end at the frame count");
  }
  if (std::adjacent_find(boundaries.begin(), boundaries.end(), std::greater_equal<>()) != boundaries.end()) {
    throw Error(Errc::invalid_argument, "segmentation boundaries must strictly increase");
  }
}

void StopRule::validate() const {
  if (window < 1) throw Error(Errc::invalid_argument, "stop window must be >= 1");
  if (!(rel_threshold > 0.0 && rel_threshold < 1.0)) {
    throw Error(Errc::invalid_argument, "stop threshold must lie in (0, 1)");
  }
}

void SearchConfig::validate() const {
  if (beam_size < 1) throw Error(Errc::invalid_argument, "beam size must be >= 1");
  if (max_shots && *max_shots < 1) throw Error(Errc::invalid_argument, "max shots must be >= 1");
  stop_rule.validate();
  entropy.validate();
}

std::optional<double> EntropyCache::find(std::size_t begin, std::size_t end) const {
  std::lock_guard lock(mutex_);
  auto it = values_.find({begin, end});
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

void EntropyCache::insert(std::size_t begin, std::size_t end, double value) {
  std::lock_guard lock(mutex_);
  values_.emplace(std::pair{begin, end}, value);
}

std::size_t EntropyCache::size() const {
  std::lock_guard lock(mutex_);
  return values_.size();
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double compute_segment_entropy(const SimilarityMatrix& m, std::size_t begin, std::size_t end,
                               const EntropyConfig& cfg) {
  EntropyConfig local = cfg;
  if (cfg.method == EntropyMethod::taylor_stochastic) {
    local.seed = splitmix64(splitmix64(cfg.seed ^ splitmix64(begin)) ^ end);
  }
  return von_neumann_entropy(normalize(m.block(begin, end)), local);
}

struct Candidate {
  std::vector<std::size_t> boundaries;
  double total = 0.0;
};

constexpr double kFlatDrop = 1e-12;

bool better(const Candidate& a, const Candidate& b) {
  if (a.total != b.total) return a.total < b.total;
  return a.boundaries < b.boundaries;
}

}  // namespace

double segment_entropy(const SimilarityMatrix& m, std::size_t begin, std::size_t end,
                       const EntropyConfig& cfg, EntropyCache* cache) {
  if (begin >= end || end > m.size()) {
    throw Error(Errc::invalid_range, "segment [" + std::to_string(begin) + ", " + std::to_string(end) +
                                         ") outside [0, " + std::to_string(m.size()) + ")");
  }
  if (cache) {
    if (auto hit = cache->find(begin, end)) return *hit;
  }
  const double value = compute_segment_entropy(m, begin, end, cfg);
  if (cache) cache->insert(begin, end, value);
  return value;
}

SearchResult beam_search_segment(const SimilarityMatrix& m, const SearchConfig& cfg) {
  cfg.validate();
  const std::size_t n = m.size();
  if (n == 0) throw Error(Errc::empty_sequence, "cannot segment an empty sequence");
  const std::size_t target = cfg.max_shots ? std::min(*cfg.max_shots, n) : n;

  EntropyCache cache;
  EntropyCache* cache_ptr = cfg.use_cache ? &cache : nullptr;

  // Segment entropies needed this iteration are computed up front (in
  // parallel) so scoring only reads the cache.
  auto prefetch = [&](const std::vector<Candidate>& candidates) {
    if (!cache_ptr) return;
    std::vector<std::pair<std::size_t, std::size_t>> missing;
    for (const auto& cand : candidates) {
      for (std::size_t s = 0; s + 1 < cand.boundaries.size(); ++s) {
        const auto key = std::pair{cand.boundaries[s], cand.boundaries[s + 1]};
        if (!cache.find(key.first, key.second)) missing.push_back(key);
      }
    }
    std::sort(missing.begin(), missing.end());
    missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
    std::vector<double> values(missing.size());
    parallel_for(missing.size(), cfg.threads, [&](std::size_t i) {
      values[i] = compute_segment_entropy(m, missing[i].first, missing[i].second, cfg.entropy);
    });
    for (std::size_t i = 0; i < missing.size(); ++i) cache.insert(missing[i].first, missing[i].second, values[i]);
  };
  auto score = [&](std::vector<Candidate>& candidates) {
    prefetch(candidates);
    parallel_for(candidates.size(), cfg.threads, [&](std::size_t i) {
      auto& cand = candidates[i];
      double total = 0.0;
      for (std::size_t s = 0; s + 1 < cand.boundaries.size(); ++s) {
        total += segment_entropy(m, cand.boundaries[s], cand.boundaries[s + 1], cfg.entropy, cache_ptr);
      }
      cand.total = total;
    });
  };

  std::vector<Candidate> beam{{{0, n}, 0.0}};
  score(beam);

  SearchResult result;
  result.curve.push_back({1, beam.front().total});
  std::vector<Candidate> best_per_step{beam.front()};

  while (beam.front().boundaries.size() - 1 < target) {
    std::vector<Candidate> expanded;
    for (const auto& cand : beam) {
      const auto& b = cand.boundaries;
      for (std::size_t s = 0; s + 1 < b.size(); ++s) {
        for (std::size_t id = b[s] + 1; id < b[s + 1]; ++id) {
          Candidate next;
          next.boundaries.reserve(b.size() + 1);
          next.boundaries.insert(next.boundaries.end(), b.begin(), b.begin() + static_cast<std::ptrdiff_t>(s) + 1);
          next.boundaries.push_back(id);
          next.boundaries.insert(next.boundaries.end(), b.begin() + static_cast<std::ptrdiff_t>(s) + 1, b.end());
          expanded.push_back(std::move(next));
        }
      }
    }
    // The same boundary set can be reached from several parents.
    std::sort(expanded.begin(), expanded.end(),
              [](const Candidate& a, const Candidate& b) { return a.boundaries < b.boundaries; });
    expanded.erase(std::unique(expanded.begin(), expanded.end(),
                               [](const Candidate& a, const Candidate& b) { return a.boundaries == b.boundaries; }),
                   expanded.end());
    if (expanded.empty()) break;

    score(expanded);
    const std::size_t keep = std::min(cfg.beam_size, expanded.size());
    std::partial_sort(expanded.begin(), expanded.begin() + static_cast<std::ptrdiff_t>(keep), expanded.end(), better);
    expanded.resize(keep);
    beam = std::move(expanded);

    const std::size_t shots = beam.front().boundaries.size() - 1;
    if (beam.front().total > result.curve.back().total_entropy + 1e-9) {
      result.monotonicity_violations.push_back(shots);
    }
    result.curve.push_back({shots, beam.front().total});
    best_per_step.push_back(beam.front());

    if (!result.knee_shots && detect_stop(result.curve, cfg.stop_rule)) {
      result.knee_shots = shots - 1;
      if (!cfg.max_shots) break;
    }
  }

  // Adaptive mode returns the step before the stop rule fired.
  const Candidate& chosen = (!cfg.max_shots && result.knee_shots) ? best_per_step[*result.knee_shots - 1]
                                                                  : best_per_step.back();
  result.segmentation.boundaries = chosen.boundaries;
  result.total_entropy = chosen.total;
  return result;
}

bool detect_stop(const EntropyCurve& curve, const StopRule& rule) {
  if (curve.size() < 2) return false;
  const std::size_t drops = curve.size() - 1;
  const double latest = curve[drops - 1].total_entropy - curve[drops].total_entropy;
  // Rank-one segments carry about 1e-16 of rounding, which must not count as progress.
  if (latest <= kFlatDrop) return true;
  const std::size_t window = std::min(rule.window, drops);
  double mean = 0.0;
  for (std::size_t i = 0; i < window; ++i) mean += curve[i].total_entropy - curve[i + 1].total_entropy;
  mean /= static_cast<double>(window);
  return latest < rule.rel_threshold * mean;
}

std::vector<std::size_t> key_frames(const Segmentation& seg) {
  if (seg.boundaries.size() < 2) return {};
  return {seg.boundaries.begin(), seg.boundaries.end() - 1};
}

std::string curve_csv(const EntropyCurve& curve) {
  std::string out = "num_shots,total_entropy\n";
  char line[64];
  for (const auto& point : curve) {
    std::snprintf(line, sizeof line, "%zu,%.12g\n", point.shots, point.total_entropy);
    out += line;
  }
  return out;
}

void emit_curve(const EntropyCurve& curve, const std::filesystem::path& path) {
  if (curve.empty()) throw Error(Errc::invalid_argument, "entropy curve is empty");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_failure, "cannot open " + path.string());
  out << curve_csv(curve);
  if (!out) throw Error(Errc::io_failure, "write failed: " + path.string());
}

std::string segmentation_json(const Segmentation& seg, double total_entropy) {
  nlohmann::json j;
  j["boundaries"] = seg.boundaries;
  j["key_frames"] = key_frames(seg);
  j["total_entropy"] = total_entropy;
  return j.dump(2) + "\n";
}

}  // namespace vnkf
