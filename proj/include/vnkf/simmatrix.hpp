#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "vnkf/image.hpp"
#include "vnkf/ingest.hpp"
#include "vnkf/phash.hpp"

namespace vnkf {

// Symmetric N x N matrix of frame similarities. Entries are stored as their
// numerator k of k/64, which makes the quantization, symmetry and unit
// diagonal hold by construction.
class SimilarityMatrix {
 public:
  SimilarityMatrix() = default;
  // Unit diagonal, zero elsewhere.
  explicit SimilarityMatrix(std::size_t n);

  // Throws Error{invalid_argument} if numerators are not a valid matrix.
  static SimilarityMatrix from_numerators(std::size_t n, std::vector<std::uint8_t> numerators);

  std::size_t size() const noexcept { return n_; }
  int numerator(std::size_t i, std::size_t j) const { return numerators_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return numerator(i, j) / 64.0; }

  // Sets both (i, j) and (j, i); i == j must keep 64.
  void set_numerator(std::size_t i, std::size_t j, int k);

  Eigen::MatrixXd dense() const;
  // Principal submatrix over sampled indices [begin, end).
  Eigen::MatrixXd block(std::size_t begin, std::size_t end) const;

  friend bool operator==(const SimilarityMatrix&, const SimilarityMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint8_t> numerators_;
};

// Only pairs i < j are hashed and compared; the lower triangle is mirrored.
// Throws Error{empty_sequence}.
SimilarityMatrix build_similarity_matrix(std::span<const HashMatrix> hashes, unsigned threads = 1);

std::vector<HashMatrix> hash_frames(std::span<const SampledFrame> frames, const PHashOptions& options = {},
                                    unsigned threads = 1);

SimilarityMatrix build_similarity_matrix(std::span<const SampledFrame> frames,
                                         const PHashOptions& options = {}, unsigned threads = 1);

// Pixel = round(255 * (1 - S)): identical frames are black.
GrayImage render_image(const SimilarityMatrix& m);
void render_grayscale(const SimilarityMatrix& m, const std::filesystem::path& out);

// Binary cache: "VNSM", version byte, u32 n, n(n+1)/2 upper-triangle
// numerator bytes (row-major, i <= j), CRC-32 of everything before it.
// Integers are little-endian.
void save_cache(const SimilarityMatrix& m, const std::filesystem::path& path);
// Throws Error{io_failure | corrupt_cache}.
SimilarityMatrix load_cache(const std::filesystem::path& path);

}  // namespace vnkf
