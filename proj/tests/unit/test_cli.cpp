#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "synthetic.hpp"
#include "vnkf/simmatrix.hpp"

using namespace vnkf;
using namespace vnkf::testing;
using nlohmann::json;

namespace {

struct Outcome {
  int code = -1;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  Outcome o;
  o.code = cli::run(args, out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::string> lines_of(const std::string& text) {
  std::istringstream in(text);
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) lines.push_back(line);
  return lines;
}

std::size_t count_keyframe_images(const fs::path& dir) {
  std::size_t count = 0;
  for (const auto& e : fs::directory_iterator(dir)) count += e.path().filename().string().starts_with("kf_");
  return count;
}

}  // namespace

TEST_CASE("extract on a two-shot directory") {
  TempDir dir;
  const ShotVideo video = shot_video(2, 1);
  write_frames(dir / "clip", video.frames);
  const Outcome o = run_cli({"extract", "--input", (dir / "clip").string(), "--fps", "2", "--beam", "5",
                             "--entropy", "exact", "--out", (dir / "run1").string()});
  INFO(o.err);
  REQUIRE(o.code == 0);
  const json seg = json::parse(slurp(dir / "run1" / "segmentation.json"));
  CHECK(seg["boundaries"] == json(video.boundaries));
  CHECK(seg["key_frames"] == json({0, video.boundaries[1]}));
  CHECK(json::parse(o.out) == seg);
  CHECK(count_keyframe_images(dir / "run1") == 2);
  CHECK(read_gray_image(dir / "run1" / "kf_0.png") == video.frames[0]);
  CHECK(fs::exists(dir / "run1" / ("kf_" + std::to_string(video.boundaries[1]) + ".png")));
  CHECK(lines_of(slurp(dir / "run1" / "entropy_curve.csv"))[0] == "num_shots,total_entropy");

  const json manifest = json::parse(slurp(dir / "run1" / "manifest.json"));
  CHECK(manifest["config"]["fps"] == 2.0);
  CHECK(manifest["config"]["beam"] == 5);
  CHECK(manifest["config"]["resolved_entropy"] == "exact");
  CHECK(manifest["input"]["frames"] == video.frames.size());
  CHECK(manifest["input"]["digest"].get<std::string>().starts_with("fnv1a64:"));
  CHECK(manifest["result"]["shots"] == 2);
  CHECK(manifest.contains("timings_ms"));
  CHECK(manifest["version"] == "0.1.0");
}

TEST_CASE("extract with a fixed shot count") {
  TempDir dir;
  const ShotVideo video = shot_video(15, 2);
  write_frames(dir / "clip", video.frames);
  const Outcome o = run_cli({"extract", "--input", (dir / "clip").string(), "--max-shots", "15", "--threads", "2",
                             "--out", (dir / "run").string()});
  INFO(o.err);
  REQUIRE(o.code == 0);
  CHECK(count_keyframe_images(dir / "run") == 15);
  CHECK(json::parse(o.out)["boundaries"] == json(video.boundaries));
}

TEST_CASE("extract error exits") {
  TempDir dir;
  const Outcome missing = run_cli({"extract", "--input", (dir / "nope").string(), "--out", (dir / "o").string()});
  CHECK(missing.code == 3);
  CHECK(missing.err.find((dir / "nope").string()) != std::string::npos);
  CHECK(std::count(missing.err.begin(), missing.err.end(), '\n') == 1);

  CHECK(run_cli({"extract", "--out", "x"}).code == 2);
  CHECK(run_cli({"extract", "--input", "x", "--out", "y", "--bogus"}).code == 2);
  CHECK(run_cli({"extract", "--input", "x", "--out", "y", "--entropy", "fast"}).code == 2);
  CHECK(run_cli({"extract", "--input", "x", "--out", "y", "--fps", "0"}).code == 2);
  CHECK(run_cli({}).code == 2);

  fs::create_directories(dir / "bad");
  std::ofstream(dir / "bad" / "a.png") << "broken";
  CHECK(run_cli({"extract", "--input", (dir / "bad").string(), "--out", (dir / "o").string()}).code == 4);

  ::setenv("VNKF_FFPROBE", "vnkf-no-such-probe", 1);
  std::ofstream(dir / "clip.mp4") << "data";
  CHECK(run_cli({"extract", "--input", (dir / "clip.mp4").string(), "--out", (dir / "o").string()}).code == 4);
  ::unsetenv("VNKF_FFPROBE");
}

TEST_CASE("extract from a decoded video") {
  TempDir dir;
  ::setenv("VNKF_FFPROBE", VNKF_FAKE_DECODER, 1);
  ::setenv("VNKF_FFMPEG", VNKF_FAKE_DECODER, 1);
  std::ofstream(dir / "v.txt") << "16 16 25 1 100\n";
  const Outcome o = run_cli({"extract", "--input", (dir / "v.txt").string(), "--out", (dir / "run").string()});
  ::unsetenv("VNKF_FFPROBE");
  ::unsetenv("VNKF_FFMPEG");
  INFO(o.err);
  CHECK(o.code == 0);
  CHECK(json::parse(slurp(dir / "run" / "manifest.json"))["input"]["frames"] == 8);
}

TEST_CASE("simmat") {
  TempDir dir;
  SUBCASE("identical frames render black") {
    const GrayImage img = block_pattern(3);
    write_frames(dir / "clip", {img, img, img, img});
    REQUIRE(run_cli({"simmat", "--input", (dir / "clip").string(), "--out", (dir / "o").string()}).code == 0);
    const GrayImage rendered = read_gray_image(dir / "o" / "similarity.png");
    CHECK(rendered.width == 4);
    CHECK(std::all_of(rendered.pixels.begin(), rendered.pixels.end(), [](auto p) { return p == 0; }));
  }
  SUBCASE("cache rerun gives identical bytes") {
    write_frames(dir / "clip", shot_video(3, 4).frames);
    for (const char* fmt : {"png", "pgm"}) {
      REQUIRE(run_cli({"simmat", "--input", (dir / "clip").string(), "--format", fmt, "--out", (dir / "a").string()})
                  .code == 0);
      REQUIRE(run_cli({"simmat", "--from-cache", (dir / "a" / "similarity.vnsm").string(), "--format", fmt, "--out",
                       (dir / "b").string()})
                  .code == 0);
      const std::string name = std::string("similarity.") + fmt;
      CHECK(slurp(dir / "a" / name) == slurp(dir / "b" / name));
      CHECK(slurp(dir / "a" / "similarity.vnsm") == slurp(dir / "b" / "similarity.vnsm"));
    }
    REQUIRE(run_cli({"simmat", "--from-cache", (dir / "a" / "similarity.vnsm").string(), "--out",
                     (dir / "a").string()})
                .code == 0);
  }
  SUBCASE("one frame gives a 1 x 1 image") {
    write_frames(dir / "clip", {block_pattern(5)});
    REQUIRE(run_cli({"simmat", "--input", (dir / "clip").string(), "--format", "pgm", "--out", (dir / "o").string()})
                .code == 0);
    const GrayImage rendered = read_gray_image(dir / "o" / "similarity.pgm");
    CHECK(rendered.width == 1);
    CHECK(rendered.height == 1);
    CHECK(rendered.pixels[0] == 0);
  }
  SUBCASE("errors") {
    CHECK(run_cli({"simmat", "--out", (dir / "o").string()}).code == 2);
    CHECK(run_cli({"simmat", "--input", "x", "--out", (dir / "o").string(), "--format", "bmp"}).code == 2);
    std::ofstream(dir / "junk.vnsm") << "VNSMjunk";
    CHECK(run_cli({"simmat", "--from-cache", (dir / "junk.vnsm").string(), "--out", (dir / "o").string()}).code == 3);
  }
}

TEST_CASE("curve") {
  TempDir dir;
  SUBCASE("ten-shot fixture knees at ten") {
    const ShotVideo video = shot_video(10, 6);
    write_frames(dir / "clip", video.frames);
    const Outcome o = run_cli({"curve", "--input", (dir / "clip").string(), "--out", (dir / "o").string()});
    INFO(o.err);
    REQUIRE(o.code == 0);
    const json j = json::parse(o.out);
    REQUIRE(j["knee_shots"].is_number());
    const auto knee = j["knee_shots"].get<long>();
    CHECK(knee >= 9);
    CHECK(knee <= 11);
    const auto rows = lines_of(slurp(dir / "o" / "entropy_curve.csv"));
    CHECK(rows.size() == j["rows"].get<std::size_t>() + 1);
  }
  SUBCASE("max shots 3") {
    write_frames(dir / "clip", shot_video(5, 7).frames);
    REQUIRE(run_cli({"curve", "--input", (dir / "clip").string(), "--max-shots", "3", "--out", (dir / "o").string()})
                .code == 0);
    const auto rows = lines_of(slurp(dir / "o" / "entropy_curve.csv"));
    REQUIRE(rows.size() == 4);
    CHECK(rows[1].starts_with("1,"));
    CHECK(rows[3].starts_with("3,"));
  }
  SUBCASE("empty input") {
    fs::create_directories(dir / "empty");
    CHECK(run_cli({"curve", "--input", (dir / "empty").string(), "--out", (dir / "o").string()}).code == 3);
  }
}

TEST_CASE("eval") {
  TempDir dir;
  std::ofstream(dir / "gt.json") << R"({"n": 150, "shot_boundaries": [0,10,20,30,40,50,60,70,80,90,100,110,120,130,140,150],
                                       "key_frames": [0,10,20,30,40,50,60,70,80,90,100,110,120,130,140]})";
  SUBCASE("perfect prediction") {
    std::ofstream(dir / "p.json") << R"({"key_frames": [0,10,20,30,40,50,60,70,80,90,100,110,120,130,140]})";
    const Outcome o = run_cli({"eval", "--gt", (dir / "gt.json").string(), "--pred", (dir / "p.json").string()});
    REQUIRE(o.code == 0);
    const json j = json::parse(o.out);
    CHECK(j["R"] == 1.0);
    CHECK(j["P"] == 0.0);
  }
  SUBCASE("15 shots, 14 matched, one repeat") {
    std::ofstream(dir / "p.json") << R"({"key_frames": [1,11,21,31,41,51,61,71,81,91,101,111,121,131,135]})";
    const Outcome o = run_cli({"eval", "--gt", (dir / "gt.json").string(), "--pred", (dir / "p.json").string(),
                               "--seed", "9"});
    REQUIRE(o.code == 0);
    const json j = json::parse(o.out);
    CHECK(std::abs(j["R"].get<double>() - 0.933) <= 0.001);
    CHECK(std::abs(j["P"].get<double>() - 0.067) <= 0.001);
  }
  SUBCASE("malformed and invalid inputs") {
    std::ofstream(dir / "p.json") << "{\"key_frames\": [";
    CHECK(run_cli({"eval", "--gt", (dir / "gt.json").string(), "--pred", (dir / "p.json").string()}).code == 2);
    std::ofstream(dir / "bad_gt.json") << R"({"n": 10, "shot_boundaries": [0,4,4,10], "key_frames": [0,4,5]})";
    std::ofstream(dir / "q.json") << R"({"key_frames": [0]})";
    const Outcome o = run_cli({"eval", "--gt", (dir / "bad_gt.json").string(), "--pred", (dir / "q.json").string()});
    CHECK(o.code == 2);
    CHECK(o.err.find("shot_boundaries") != std::string::npos);
  }
}

TEST_CASE("extract is reproducible across runs, threads and manifests") {
  TempDir dir;
  write_frames(dir / "clip", shot_video(6, 8).frames);
  const std::string clip = (dir / "clip").string();
  const char* files[] = {"segmentation.json", "entropy_curve.csv"};

  for (const char* entropy : {"exact", "taylor-stochastic"}) {
    const std::string base = (dir / (std::string("base_") + entropy)).string();
    REQUIRE(run_cli({"extract", "--input", clip, "--entropy", entropy, "--seed", "5", "--threads", "1", "--out", base})
                .code == 0);
    for (const char* threads : {"1", "3", "8"}) {
      const std::string other = (dir / (std::string("t") + threads + entropy)).string();
      REQUIRE(run_cli({"extract", "--input", clip, "--entropy", entropy, "--seed", "5", "--threads", threads, "--out",
                       other})
                  .code == 0);
      for (const char* f : files) CHECK(slurp(fs::path(base) / f) == slurp(fs::path(other) / f));
    }
    const std::string replay = (dir / (std::string("replay_") + entropy)).string();
    REQUIRE(run_cli({"extract", "--input", clip, "--manifest", (fs::path(base) / "manifest.json").string(), "--threads",
                     "4", "--out", replay})
                .code == 0);
    for (const char* f : files) CHECK(slurp(fs::path(base) / f) == slurp(fs::path(replay) / f));
  }
}

TEST_CASE("manifest values are overridden by explicit flags") {
  TempDir dir;
  write_frames(dir / "clip", shot_video(4, 9).frames);
  REQUIRE(run_cli({"extract", "--input", (dir / "clip").string(), "--beam", "3", "--out", (dir / "a").string()}).code ==
          0);
  REQUIRE(run_cli({"extract", "--input", (dir / "clip").string(), "--manifest", (dir / "a" / "manifest.json").string(),
                   "--max-shots", "2", "--out", (dir / "b").string()})
              .code == 0);
  const json m = json::parse(slurp(dir / "b" / "manifest.json"));
  CHECK(m["config"]["beam"] == 3);
  CHECK(m["config"]["max_shots"] == 2);
  CHECK(count_keyframe_images(dir / "b") == 2);
}
