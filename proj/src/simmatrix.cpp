#include "vnkf/simmatrix.hpp"

#include <cmath>
#include <fstream>
#include <iterator>
#include <zlib.h>

#include "vnkf/error.hpp"
#include "vnkf/parallel.hpp"

namespace vnkf {

namespace {

constexpr char kMagic[4] = {'V', 'N', 'S', 'M'};
constexpr std::uint8_t kCacheVersion = 1;

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint32_t get_u32(const std::uint8_t* p) {
  return std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) | (std::uint32_t{p[2]} << 16) |
         (std::uint32_t{p[3]} << 24);
}

std::uint32_t crc32_of(const std::uint8_t* data, std::size_t size) {
  uLong crc = ::crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks.
  while (size > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(size, 1U << 30));
    crc = ::crc32(crc, data, chunk);
    data += chunk;
    size -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

}  // namespace

SimilarityMatrix::SimilarityMatrix(std::size_t n) : n_(n), numerators_(n * n, 0) {
  for (std::size_t i = 0; i < n; ++i) numerators_[i * n + i] = 64;
}

SimilarityMatrix SimilarityMatrix::from_numerators(std::size_t n, std::vector<std::uint8_t> numerators) {
  if (numerators.size() != n * n) throw Error(Errc::invalid_argument, "numerator count must be n*n");
  for (std::size_t i = 0; i < n; ++i) {
    if (numerators[i * n + i] != 64) throw Error(Errc::invalid_argument, "diagonal must be 1");
    for (std::size_t j = i + 1; j < n; ++j) {
      if (numerators[i * n + j] > 64 || numerators[i * n + j] != numerators[j * n + i]) {
        throw Error(Errc::invalid_argument, "matrix must be symmetric with entries in [0, 64]");
      }
    }
  }
  SimilarityMatrix m;
  m.n_ = n;
  m.numerators_ = std::move(numerators);
  return m;
}

void SimilarityMatrix::set_numerator(std::size_t i, std::size_t j, int k) {
  if (i >= n_ || j >= n_) throw Error(Errc::index_out_of_range, "similarity index");
  if (k < 0 || k > 64 || (i == j && k != 64)) throw Error(Errc::invalid_argument, "similarity numerator");
  numerators_[i * n_ + j] = static_cast<std::uint8_t>(k);
  numerators_[j * n_ + i] = static_cast<std::uint8_t>(k);
}

Eigen::MatrixXd SimilarityMatrix::dense() const { return block(0, n_); }

Eigen::MatrixXd SimilarityMatrix::block(std::size_t begin, std::size_t end) const {
  if (begin > end || end > n_) throw Error(Errc::invalid_range, "block range");
  const auto len = static_cast<Eigen::Index>(end - begin);
  Eigen::MatrixXd out(len, len);
  for (Eigen::Index i = 0; i < len; ++i) {
    for (Eigen::Index j = 0; j < len; ++j) out(i, j) = (*this)(begin + i, begin + j);
  }
  return out;
}

SimilarityMatrix build_similarity_matrix(std::span<const HashMatrix> hashes, unsigned threads) {
  const std::size_t n = hashes.size();
  if (n == 0) throw Error(Errc::empty_sequence, "no frames to compare");
  std::vector<std::uint8_t> numerators(n * n, 64);
  // Row i fills the upper triangle j > i and its mirror; rows are disjoint.
  parallel_for(n, threads, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto k = static_cast<std::uint8_t>(64 - hamming(hashes[i], hashes[j]));
      numerators[i * n + j] = k;
      numerators[j * n + i] = k;
    }
  });
  return SimilarityMatrix::from_numerators(n, std::move(numerators));
}

std::vector<HashMatrix> hash_frames(std::span<const SampledFrame> frames, const PHashOptions& options,
                                    unsigned threads) {
  std::vector<HashMatrix> hashes(frames.size());
  parallel_for(frames.size(), threads,
               [&](std::size_t i) { hashes[i] = perceptual_hash(frames[i].image, options); });
  return hashes;
}

SimilarityMatrix build_similarity_matrix(std::span<const SampledFrame> frames, const PHashOptions& options,
                                         unsigned threads) {
  if (frames.empty()) throw Error(Errc::empty_sequence, "no frames to compare");
  const auto hashes = hash_frames(frames, options, threads);
  return build_similarity_matrix(std::span<const HashMatrix>(hashes), threads);
}

GrayImage render_image(const SimilarityMatrix& m) {
  const auto n = static_cast<int>(m.size());
  GrayImage image(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      // 255 * (64 - k) / 64, rounded half up.
      const int k = m.numerator(i, j);
      image.at(j, i) = static_cast<std::uint8_t>((255 * (64 - k) + 32) / 64);
    }
  }
  return image;
}

void render_grayscale(const SimilarityMatrix& m, const std::filesystem::path& out) {
  if (m.size() == 0) throw Error(Errc::invalid_argument, "cannot render an empty matrix");
  write_gray_image(render_image(m), out);
}

void save_cache(const SimilarityMatrix& m, const std::filesystem::path& path) {
  const std::size_t n = m.size();
  if (n > 0xFFFFFFFFULL) throw Error(Errc::invalid_argument, "matrix too large for cache");
  std::vector<std::uint8_t> bytes(std::begin(kMagic), std::end(kMagic));
  bytes.push_back(kCacheVersion);
  put_u32(bytes, static_cast<std::uint32_t>(n));
  bytes.reserve(bytes.size() + n * (n + 1) / 2 + 4);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) bytes.push_back(static_cast<std::uint8_t>(m.numerator(i, j)));
  }
  put_u32(bytes, crc32_of(bytes.data(), bytes.size()));

  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_failure, "cannot open " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::io_failure, "write failed: " + path.string());
}

SimilarityMatrix load_cache(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_failure, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  constexpr std::size_t header = 4 + 1 + 4;
  if (bytes.size() < header + 4) throw Error(Errc::corrupt_cache, path.string() + ": truncated");
  if (!std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin())) {
    throw Error(Errc::corrupt_cache, path.string() + ": bad magic");
  }
  if (bytes[4] != kCacheVersion) throw Error(Errc::corrupt_cache, path.string() + ": unsupported version");
  const std::size_t n = get_u32(&bytes[5]);
  const std::size_t entries = n * (n + 1) / 2;
  if (bytes.size() != header + entries + 4) throw Error(Errc::corrupt_cache, path.string() + ": bad length");
  const std::size_t body = header + entries;
  if (get_u32(&bytes[body]) != crc32_of(bytes.data(), body)) {
    throw Error(Errc::corrupt_cache, path.string() + ": checksum mismatch");
  }

  std::vector<std::uint8_t> numerators(n * n);
  std::size_t pos = header;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      numerators[i * n + j] = bytes[pos];
      numerators[j * n + i] = bytes[pos];
      ++pos;
    }
  }
  try {
    return SimilarityMatrix::from_numerators(n, std::move(numerators));
  } catch (const Error& e) {
    throw Error(Errc::corrupt_cache, path.string() + ": " + e.what());
  }
}

}  // namespace vnkf
