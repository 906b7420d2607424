#pragma once

// Fixtures shared by the unit and acceptance suites.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vnkf/image.hpp"
#include "vnkf/phash.hpp"
#include "vnkf/simmatrix.hpp"

namespace vnkf::testing {

namespace fs = std::filesystem;

class TempDir {
 public:
  explicit TempDir(const std::string& tag = "vnkf") {
    static std::uint64_t counter = 0;
    std::random_device rd;
    path_ = fs::temp_directory_path() /
            (tag + "_" + std::to_string(rd()) + "_" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& name) const { return path_ / name; }

 private:
  fs::path path_;
};

// Coarse random block pattern: a grid x grid mosaic of random levels in
// [40, 215], so brightness noise does not clip.
inline GrayImage block_pattern(std::uint64_t seed, int width = 64, int height = 48, int grid = 4) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> level(40, 215);
  std::vector<int> cells(static_cast<std::size_t>(grid) * grid);
  for (auto& c : cells) c = level(rng);
  GrayImage img(width, height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const int cx = x * grid / width;
      const int cy = y * grid / height;
      img.at(x, y) = static_cast<std::uint8_t>(cells[static_cast<std::size_t>(cy) * grid + cx]);
    }
  }
  return img;
}

inline GrayImage add_noise(const GrayImage& src, int amplitude, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> noise(-amplitude, amplitude);
  GrayImage out = src;
  for (auto& p : out.pixels) p = static_cast<std::uint8_t>(std::clamp(p + noise(rng), 0, 255));
  return out;
}

inline GrayImage random_raster(std::mt19937_64& rng, int width, int height, int lo = 0, int hi = 255) {
  std::uniform_int_distribution<int> level(lo, hi);
  GrayImage img(width, height);
  for (auto& p : img.pixels) p = static_cast<std::uint8_t>(level(rng));
  return img;
}

// Smallest distance between a low-frequency DCT coefficient and the block
// mean, i.e. how far the frame is from flipping any hash bit.
inline double hash_margin(const GrayImage& img) {
  const DctBlock c = dct2d(resize_area(img, kDctSize, kDctSize));
  const Eigen::Matrix<double, 8, 8> low = c.topLeftCorner<8, 8>();
  return (low.array() - low.mean()).abs().minCoeff();
}

// Block pattern whose hash survives mild pixel noise.
inline GrayImage robust_pattern(std::uint64_t seed, double margin = 8.0) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    GrayImage img = block_pattern(seed * 7777 + attempt, 64, 48, 8);
    if (hash_margin(img) >= margin) return img;
  }
}

struct ShotVideo {
  std::vector<GrayImage> frames;
  std::vector<std::size_t> boundaries;  // with sentinel
};

// k visually distinct shots of constant patterns plus mild noise. Shot
// lengths cycle through `lengths`.
inline ShotVideo shot_video(std::size_t shots, std::uint64_t seed, std::vector<std::size_t> lengths = {6, 4, 5, 7},
                            int noise = 3) {
  ShotVideo video;
  std::mt19937_64 rng(seed * 7919 + 17);
  video.boundaries.push_back(0);
  for (std::size_t s = 0; s < shots; ++s) {
    const GrayImage base = robust_pattern(seed * 1000 + s + 1);
    const std::size_t len = lengths[s % lengths.size()];
    for (std::size_t f = 0; f < len; ++f) video.frames.push_back(add_noise(base, noise, rng));
    video.boundaries.push_back(video.frames.size());
  }
  return video;
}

inline void write_frames(const fs::path& dir, const std::vector<GrayImage>& frames) {
  fs::create_directories(dir);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%05zu.png", i);
    write_gray_image(frames[i], dir / name);
  }
}

// Similarity matrix from random hashes drawn around a few prototypes, so it
// has block-ish structure and is a valid hash-derived matrix.
inline SimilarityMatrix random_similarity(std::size_t n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> proto_count(1, 4);
  std::vector<std::uint64_t> protos(static_cast<std::size_t>(proto_count(rng)));
  for (auto& p : protos) p = rng();
  std::uniform_int_distribution<std::size_t> pick(0, protos.size() - 1);
  std::uniform_int_distribution<int> flips(0, 12);
  std::uniform_int_distribution<int> bit(0, 63);
  std::vector<HashMatrix> hashes;
  for (std::size_t i = 0; i < n; ++i) {
    std::uint64_t h = protos[pick(rng)];
    for (int f = flips(rng); f > 0; --f) h ^= std::uint64_t{1} << bit(rng);
    hashes.emplace_back(h);
  }
  return build_similarity_matrix(std::span<const HashMatrix>(hashes));
}

inline Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = normal(rng);
  return m;
}

// Normalized B B^T with B n x rank Gaussian; rank = n gives a generic
// full-rank density.
inline Eigen::MatrixXd random_density(Eigen::Index n, Eigen::Index rank, std::mt19937_64& rng) {
  const Eigen::MatrixXd b = gaussian_matrix(n, rank, rng);
  Eigen::MatrixXd a = b * b.transpose();
  a = 0.5 * (a + a.transpose());
  return a / a.trace();
}

inline Eigen::MatrixXd random_orthogonal(Eigen::Index n, std::mt19937_64& rng) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(gaussian_matrix(n, n, rng));
  Eigen::MatrixXd q = qr.householderQ();
  return q;
}

// Q diag(u) Q^T with u uniform on [0, 1].
inline Eigen::MatrixXd random_unit_spectrum(Eigen::Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Eigen::VectorXd d(n);
  for (Eigen::Index i = 0; i < n; ++i) d[i] = u(rng);
  const Eigen::MatrixXd q = random_orthogonal(n, rng);
  Eigen::MatrixXd a = q * d.asDiagonal() * q.transpose();
  return 0.5 * (a + a.transpose());
}

}  // namespace vnkf::testing
