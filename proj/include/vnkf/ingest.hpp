#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vnkf/image.hpp"

namespace vnkf {

struct SamplingConfig {
  double fps = 2.0;
  std::optional<std::size_t> max_frames;

  // Throws Error{invalid_argument} unless fps > 0 and max_frames (if set) > 0.
  void validate() const;
};

struct SampledFrame {
  std::size_t index = 0;
  double source_timestamp = 0.0;
  GrayImage image;
};

// BT.709 luma, rounded to nearest.
std::uint8_t luma709(std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept;

GrayImage to_grayscale(const RgbImage& rgb);

// Native frame index nearest to each target instant k / target_fps, ties
// toward the earlier frame. Targets run while k / target_fps is strictly
// before the end of the source (native_count / native_fps).
std::vector<std::size_t> nearest_frame_schedule(std::size_t native_count, double native_fps,
                                                double target_fps,
                                                std::optional<std::size_t> max_frames = {});

// Executables used for probing and decoding. VNKF_FFPROBE and VNKF_FFMPEG
// override the defaults ("ffprobe" / "ffmpeg" looked up on PATH).
struct DecoderCommands {
  std::string probe = "ffprobe";
  std::string decode = "ffmpeg";

  static DecoderCommands from_environment();
};

// Decodes a video through an external decoder process. The probe command is
// run as
//   <probe> -v error -select_streams v:0
//           -show_entries stream=width,height,avg_frame_rate -of csv=p=0 <path>
// and must print "W,H,NUM/DEN". The decoder is then run as
//   <decode> -v error -nostdin -i <path> -map 0:v:0 -f rawvideo -pix_fmt gray -
// and must stream W*H byte frames at the native rate on stdout.
// Throws Error{decoder_not_found | decode_failure | empty_video | io_failure}.
std::vector<SampledFrame> sample_from_decoder(const std::filesystem::path& video_path,
                                              const SamplingConfig& cfg,
                                              const DecoderCommands& commands =
                                                  DecoderCommands::from_environment());

// Loads every PNG/JPEG/PGM file in dir_path in byte-wise filename order.
// Throws Error{empty_directory | unreadable_image | io_failure}.
std::vector<SampledFrame> sample_from_directory(const std::filesystem::path& dir_path,
                                                const SamplingConfig& cfg);

// Dispatches on whether input is a directory or a file.
std::vector<SampledFrame> sample_input(const std::filesystem::path& input,
                                       const SamplingConfig& cfg);

// FNV-1a over dimensions and pixels of every frame.
std::uint64_t frames_digest(const std::vector<SampledFrame>& frames) noexcept;

}  // namespace vnkf
