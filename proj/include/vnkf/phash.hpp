#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "vnkf/image.hpp"

namespace vnkf {

// 8x8 perceptual fingerprint packed into one word. Bit (row, col) lives at
// position 8*row + col counted from the most significant bit, so the hex form
// reads row-major with (0,0) first.
class HashMatrix {
 public:
  constexpr HashMatrix() = default;
  constexpr explicit HashMatrix(std::uint64_t word) : word_(word) {}

  constexpr std::uint64_t word() const noexcept { return word_; }

  constexpr bool bit(int row, int col) const noexcept {
    return (word_ >> (63 - (8 * row + col))) & 1U;
  }
  constexpr void set_bit(int row, int col, bool value) noexcept {
    const std::uint64_t mask = std::uint64_t{1} << (63 - (8 * row + col));
    word_ = value ? (word_ | mask) : (word_ & ~mask);
  }

  // 16 lowercase hex characters.
  std::string to_hex() const;
  // Throws Error{parse_error}.
  static HashMatrix from_hex(std::string_view hex);

  friend constexpr bool operator==(HashMatrix, HashMatrix) = default;

 private:
  std::uint64_t word_ = 0;
};

inline constexpr int kHashBits = 64;
inline constexpr int kDctSize = 32;

using DctBlock = Eigen::Matrix<double, kDctSize, kDctSize, Eigen::RowMajor>;

// Orthonormal type-II 2-D DCT and its inverse. Throws
// Error{wrong_dimensions} unless the input is 32x32.
DctBlock dct2d(const Eigen::MatrixXd& block);
Eigen::MatrixXd idct2d(const Eigen::MatrixXd& coefficients);

// Area-averaging resize: each output pixel is the mean of the source area it
// covers, with fractional coverage at cell edges.
Eigen::MatrixXd resize_area(const GrayImage& image, int out_width, int out_height);

struct PHashOptions {
  // Drop the DC term from the mean and force bit (0,0) to zero, as many
  // common pHash implementations do. Off by default.
  bool exclude_dc = false;
};

// Resize to 32x32, DCT, keep the upper-left 8x8 block and set each bit where
// the coefficient is >= the block mean. Throws Error{empty_raster}.
HashMatrix perceptual_hash(const GrayImage& frame, const PHashOptions& options = {});

int hamming(HashMatrix a, HashMatrix b) noexcept;

// 1 - D/64.
double similarity(HashMatrix a, HashMatrix b) noexcept;

}  // namespace vnkf
