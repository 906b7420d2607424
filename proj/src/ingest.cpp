#include "vnkf/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "subprocess.hpp"
#include "vnkf/error.hpp"

namespace vnkf {

namespace fs = std::filesystem;

void SamplingConfig::validate() const {
  if (!(fps > 0.0) || !std::isfinite(fps)) {
    throw Error(Errc::invalid_argument, "fps must be positive");
  }
  if (max_frames && *max_frames == 0) {
    throw Error(Errc::invalid_argument, "max_frames must be positive");
  }
}

std::uint8_t luma709(std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept {
  const double y = 0.2126 * r + 0.7152 * g + 0.0722 * b;
  return static_cast<std::uint8_t>(std::clamp(std::lround(y), 0L, 255L));
}

GrayImage to_grayscale(const RgbImage& rgb) {
  GrayImage gray(rgb.width, rgb.height);
  for (std::size_t i = 0; i < gray.pixels.size(); ++i) {
    const auto* px = &rgb.pixels[i * 3];
    gray.pixels[i] = luma709(px[0], px[1], px[2]);
  }
  return gray;
}

std::vector<std::size_t> nearest_frame_schedule(std::size_t native_count, double native_fps,
                                                double target_fps,
                                                std::optional<std::size_t> max_frames) {
  std::vector<std::size_t> schedule;
  if (native_count == 0) return schedule;
  const double ratio = native_fps / target_fps;
  for (std::size_t k = 0;; ++k) {
    if (max_frames && schedule.size() >= *max_frames) break;
    // Position of the target instant measured in native frames.
    const double pos = static_cast<double>(k) * ratio;
    if (pos >= static_cast<double>(native_count)) break;
    // Nearest index, ties (pos = i + 0.5) resolved to i.
    auto index = static_cast<std::size_t>(std::max(0.0, std::ceil(pos - 0.5 - 1e-9)));
    schedule.push_back(std::min(index, native_count - 1));
  }
  return schedule;
}

DecoderCommands DecoderCommands::from_environment() {
  DecoderCommands commands;
  if (const char* probe = std::getenv("VNKF_FFPROBE"); probe && *probe) commands.probe = probe;
  if (const char* decode = std::getenv("VNKF_FFMPEG"); decode && *decode) commands.decode = decode;
  return commands;
}

namespace {

struct StreamInfo {
  int width = 0;
  int height = 0;
  double fps = 0.0;
};

StreamInfo parse_probe(const std::string& text, const fs::path& video) {
  // Expected: "W,H,NUM/DEN" possibly followed by a newline.
  StreamInfo info;
  std::string line = text.substr(0, text.find('\n'));
  std::istringstream in(line);
  std::string w, h, rate;
  if (!std::getline(in, w, ',') || !std::getline(in, h, ',') || !std::getline(in, rate)) {
    throw Error(Errc::decode_failure, video.string() + ": unexpected probe output '" + line + "'");
  }
  auto to_int = [&](const std::string& s) {
    int value = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size() || value <= 0) {
      throw Error(Errc::decode_failure, video.string() + ": bad probe field '" + s + "'");
    }
    return value;
  };
  info.width = to_int(w);
  info.height = to_int(h);
  if (auto slash = rate.find('/'); slash != std::string::npos) {
    double num = std::strtod(rate.substr(0, slash).c_str(), nullptr);
    double den = std::strtod(rate.substr(slash + 1).c_str(), nullptr);
    info.fps = den > 0 ? num / den : 0.0;
  } else {
    info.fps = std::strtod(rate.c_str(), nullptr);
  }
  if (!(info.fps > 0.0)) {
    throw Error(Errc::decode_failure, video.string() + ": bad frame rate '" + rate + "'");
  }
  return info;
}

std::string resolve_or_throw(const std::string& name) {
  auto resolved = detail::find_executable(name);
  if (!resolved) throw Error(Errc::decoder_not_found, name + " not found");
  return *resolved;
}

}  // namespace

std::vector<SampledFrame> sample_from_decoder(const fs::path& video_path, const SamplingConfig& cfg,
                                              const DecoderCommands& commands) {
  cfg.validate();
  if (!fs::exists(video_path)) throw Error(Errc::io_failure, "no such file: " + video_path.string());
  const std::string probe_exe = resolve_or_throw(commands.probe);
  const std::string decode_exe = resolve_or_throw(commands.decode);

  StreamInfo info;
  {
    detail::Subprocess probe({probe_exe, "-v", "error", "-select_streams", "v:0", "-show_entries",
                              "stream=width,height,avg_frame_rate", "-of", "csv=p=0",
                              video_path.string()});
    std::string text = probe.read_all();
    if (probe.wait() != 0) throw Error(Errc::decode_failure, video_path.string() + ": probe failed");
    info = parse_probe(text, video_path);
  }

  detail::Subprocess decoder({decode_exe, "-v", "error", "-nostdin", "-i", video_path.string(),
                              "-map", "0:v:0", "-f", "rawvideo", "-pix_fmt", "gray", "-"});
  const double ratio = info.fps / cfg.fps;
  std::vector<SampledFrame> frames;
  GrayImage current(info.width, info.height);
  std::size_t native_index = 0;
  std::size_t k = 0;
  auto full = [&] { return cfg.max_frames && frames.size() >= *cfg.max_frames; };
  auto emit = [&](const GrayImage& image) {
    frames.push_back({frames.size(), static_cast<double>(k) / cfg.fps, image});
    ++k;
  };
  auto target_index = [&](std::size_t target) {
    const double pos = static_cast<double>(target) * ratio;
    return std::pair{pos, static_cast<std::size_t>(std::max(0.0, std::ceil(pos - 0.5 - 1e-9)))};
  };

  // Streaming form of nearest_frame_schedule: native frames arrive in order
  // and only the most recent one is kept.
  while (!full()) {
    std::size_t got = decoder.read_exact(current.pixels);
    if (got == 0) break;
    if (got != current.pixels.size()) {
      decoder.wait();
      throw Error(Errc::decode_failure, video_path.string() + ": truncated frame");
    }
    while (!full() && target_index(k).second == native_index) emit(current);
    ++native_index;
  }
  const bool stopped_early = full();
  const int status = decoder.wait();
  if (!stopped_early && status != 0) {
    throw Error(Errc::decode_failure, video_path.string() + ": decoder exited with status " +
                                          std::to_string(status));
  }
  if (native_index == 0) throw Error(Errc::empty_video, video_path.string());
  // Targets whose nearest native index lies past the end still fall inside
  // the clip; they map to the final frame.
  while (!full() && target_index(k).first < static_cast<double>(native_index)) emit(current);
  return frames;
}

std::vector<SampledFrame> sample_from_directory(const fs::path& dir_path, const SamplingConfig& cfg) {
  cfg.validate();
  std::error_code ec;
  if (!fs::is_directory(dir_path, ec)) {
    throw Error(Errc::io_failure, "not a directory: " + dir_path.string());
  }
  std::vector<std::string> names;
  for (const auto& entry : fs::directory_iterator(dir_path, ec)) {
    if (!entry.is_regular_file()) continue;
    std::string ext = entry.path().extension().string();
    for (auto& ch : ext) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    if (ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".pgm") {
      names.push_back(entry.path().filename().string());
    }
  }
  if (ec) throw Error(Errc::io_failure, dir_path.string() + ": " + ec.message());
  if (names.empty()) throw Error(Errc::empty_directory, dir_path.string());
  // std::string ordering is byte-wise.
  std::sort(names.begin(), names.end());
  if (cfg.max_frames && names.size() > *cfg.max_frames) names.resize(*cfg.max_frames);

  std::vector<SampledFrame> frames;
  frames.reserve(names.size());
  for (const auto& name : names) {
    const std::size_t index = frames.size();
    frames.push_back({index, static_cast<double>(index) / cfg.fps, read_gray_image(dir_path / name)});
  }
  return frames;
}

std::vector<SampledFrame> sample_input(const fs::path& input, const SamplingConfig& cfg) {
  std::error_code ec;
  if (!fs::exists(input, ec)) throw Error(Errc::io_failure, "no such input: " + input.string());
  if (fs::is_directory(input, ec)) return sample_from_directory(input, cfg);
  return sample_from_decoder(input, cfg);
}

std::uint64_t frames_digest(const std::vector<SampledFrame>& frames) noexcept {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  auto mix = [&](std::uint8_t byte) {
    hash ^= byte;
    hash *= 0x100000001b3ULL;
  };
  auto mix_u32 = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) mix(static_cast<std::uint8_t>(v >> (8 * i)));
  };
  for (const auto& f : frames) {
    mix_u32(static_cast<std::uint32_t>(f.image.width));
    mix_u32(static_cast<std::uint32_t>(f.image.height));
    for (auto p : f.image.pixels) mix(p);
  }
  return hash;
}

}  // namespace vnkf
