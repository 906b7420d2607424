#include "vnkf/phash.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "vnkf/error.hpp"

namespace vnkf {

std::string HashMatrix::to_hex() const {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 0; i < 16; ++i) out[i] = digits[(word_ >> (60 - 4 * i)) & 0xF];
  return out;
}

HashMatrix HashMatrix::from_hex(std::string_view hex) {
  if (hex.size() != 16) throw Error(Errc::parse_error, "hash must be 16 hex characters");
  std::uint64_t word = 0;
  for (char c : hex) {
    int v;
    if (c >= '0' && c <= '9') v = c - '0';
    else if (c >= 'a' && c <= 'f') v = c - 'a' + 10;
    else throw Error(Errc::parse_error, "hash must be lowercase hex");
    word = (word << 4) | static_cast<std::uint64_t>(v);
  }
  return HashMatrix(word);
}

namespace {

const DctBlock& dct_basis() {
  // basis(u, x) = a(u) cos(pi (2x + 1) u / 2N)
  static const DctBlock basis = [] {
    DctBlock m;
    const double n = kDctSize;
    for (int u = 0; u < kDctSize; ++u) {
      const double scale = u == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
      for (int x = 0; x < kDctSize; ++x) {
        m(u, x) = scale * std::cos(std::numbers::pi * (2.0 * x + 1.0) * u / (2.0 * n));
      }
    }
    return m;
  }();
  return basis;
}

void require_block(const Eigen::MatrixXd& m) {
  if (m.rows() != kDctSize || m.cols() != kDctSize) {
    throw Error(Errc::wrong_dimensions, "expected 32x32, got " + std::to_string(m.rows()) + "x" +
                                            std::to_string(m.cols()));
  }
}

}  // namespace

DctBlock dct2d(const Eigen::MatrixXd& block) {
  require_block(block);
  const auto& c = dct_basis();
  return c * block * c.transpose();
}

Eigen::MatrixXd idct2d(const Eigen::MatrixXd& coefficients) {
  require_block(coefficients);
  const auto& c = dct_basis();
  return c.transpose() * coefficients * c;
}

Eigen::MatrixXd resize_area(const GrayImage& image, int out_width, int out_height) {
  if (image.empty()) throw Error(Errc::empty_raster, "cannot resize an empty raster");
  if (out_width <= 0 || out_height <= 0) throw Error(Errc::invalid_argument, "bad resize target");

  // Per-axis coverage weights: weight(o, s) = overlap of output cell o with
  // source pixel s, in source units.
  auto axis_weights = [](int src, int dst) {
    std::vector<std::vector<std::pair<int, double>>> w(dst);
    const double scale = static_cast<double>(src) / dst;
    for (int o = 0; o < dst; ++o) {
      const double lo = o * scale;
      const double hi = (o + 1) * scale;
      for (int s = static_cast<int>(std::floor(lo)); s < std::min(src, static_cast<int>(std::ceil(hi))); ++s) {
        const double overlap = std::min(hi, s + 1.0) - std::max(lo, static_cast<double>(s));
        if (overlap > 0) w[o].emplace_back(s, overlap / scale);
      }
    }
    return w;
  };
  const auto wx = axis_weights(image.width, out_width);
  const auto wy = axis_weights(image.height, out_height);

  // Separable: rows first, then columns.
  Eigen::MatrixXd horizontal(image.height, out_width);
  for (int y = 0; y < image.height; ++y) {
    for (int ox = 0; ox < out_width; ++ox) {
      double acc = 0.0;
      for (auto [sx, w] : wx[ox]) acc += w * image.at(sx, y);
      horizontal(y, ox) = acc;
    }
  }
  Eigen::MatrixXd out(out_height, out_width);
  for (int oy = 0; oy < out_height; ++oy) {
    for (int ox = 0; ox < out_width; ++ox) {
      double acc = 0.0;
      for (auto [sy, w] : wy[oy]) acc += w * horizontal(sy, ox);
      out(oy, ox) = acc;
    }
  }
  return out;
}

HashMatrix perceptual_hash(const GrayImage& frame, const PHashOptions& options) {
  if (frame.empty()) throw Error(Errc::empty_raster, "cannot hash an empty raster");
  const DctBlock coeffs = dct2d(resize_area(frame, kDctSize, kDctSize));
  const Eigen::Matrix<double, 8, 8> low = coeffs.topLeftCorner<8, 8>();

  double mean;
  if (options.exclude_dc) {
    mean = (low.sum() - low(0, 0)) / 63.0;
  } else {
    mean = low.mean();
  }
  HashMatrix hash;
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) hash.set_bit(i, j, low(i, j) >= mean);
  }
  if (options.exclude_dc) hash.set_bit(0, 0, false);
  return hash;
}

int hamming(HashMatrix a, HashMatrix b) noexcept {
  return std::popcount(a.word() ^ b.word());
}

double similarity(HashMatrix a, HashMatrix b) noexcept {
  return 1.0 - hamming(a, b) / 64.0;
}

}  // namespace vnkf
