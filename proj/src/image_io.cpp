#include <fstream>
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "vnkf/error.hpp"
#include "vnkf/image.hpp"
#include "vnkf/ingest.hpp"

namespace vnkf {

namespace {

std::string lower_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  for (auto& ch : ext) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return ext;
}

}  // namespace

GrayImage read_gray_image(const std::filesystem::path& path) {
  cv::Mat mat;
  try {
    mat = cv::imread(path.string(), cv::IMREAD_UNCHANGED | cv::IMREAD_IGNORE_ORIENTATION);
  } catch (const cv::Exception& e) {
    throw Error(Errc::unreadable_image, path.string() + ": " + e.what());
  }
  if (mat.empty()) throw Error(Errc::unreadable_image, path.string());

  if (mat.depth() == CV_16U) mat.convertTo(mat, CV_8U, 1.0 / 257.0);
  if (mat.depth() != CV_8U) throw Error(Errc::unreadable_image, path.string() + ": unsupported depth");

  const int channels = mat.channels();
  if (channels == 1) {
    GrayImage gray(mat.cols, mat.rows);
    for (int y = 0; y < mat.rows; ++y) {
      const auto* row = mat.ptr<std::uint8_t>(y);
      std::copy(row, row + mat.cols, gray.pixels.begin() + static_cast<std::ptrdiff_t>(y) * mat.cols);
    }
    return gray;
  }
  if (channels != 3 && channels != 4) {
    throw Error(Errc::unreadable_image, path.string() + ": unsupported channel count");
  }
  // OpenCV decodes to BGR(A).
  RgbImage rgb(mat.cols, mat.rows);
  for (int y = 0; y < mat.rows; ++y) {
    const auto* row = mat.ptr<std::uint8_t>(y);
    for (int x = 0; x < mat.cols; ++x) {
      const auto* px = row + static_cast<std::ptrdiff_t>(x) * channels;
      auto* out = &rgb.pixels[(static_cast<std::size_t>(y) * mat.cols + x) * 3];
      out[0] = px[2];
      out[1] = px[1];
      out[2] = px[0];
    }
  }
  return to_grayscale(rgb);
}

void write_gray_image(const GrayImage& image, const std::filesystem::path& path) {
  if (image.empty()) throw Error(Errc::io_failure, path.string() + ": empty image");
  if (lower_extension(path) == ".pgm") {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(Errc::io_failure, "cannot open " + path.string());
    out << "P5\n" << image.width << ' ' << image.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(image.pixels.data()),
              static_cast<std::streamsize>(image.pixels.size()));
    if (!out) throw Error(Errc::io_failure, "write failed: " + path.string());
    return;
  }
  cv::Mat mat(image.height, image.width, CV_8UC1, const_cast<std::uint8_t*>(image.pixels.data()));
  std::vector<std::uint8_t> encoded;
  try {
    if (!cv::imencode(".png", mat, encoded)) throw Error(Errc::io_failure, "png encode failed");
  } catch (const cv::Exception& e) {
    throw Error(Errc::io_failure, path.string() + ": " + e.what());
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io_failure, "cannot open " + path.string());
  out.write(reinterpret_cast<const char*>(encoded.data()), static_cast<std::streamsize>(encoded.size()));
  if (!out) throw Error(Errc::io_failure, "write failed: " + path.string());
}

}  // namespace vnkf
