#include "vnkf/error.hpp"

namespace vnkf {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_argument: return "invalid-argument";
    case Errc::decoder_not_found: return "decoder-not-found";
    case Errc::decode_failure: return "decode-failure";
    case Errc::empty_video: return "empty-video";
    case Errc::empty_directory: return "empty-directory";
    case Errc::unreadable_image: return "unreadable-image";
    case Errc::wrong_dimensions: return "wrong-dimensions";
    case Errc::empty_raster: return "empty-raster";
    case Errc::empty_sequence: return "empty-sequence";
    case Errc::io_failure: return "io-failure";
    case Errc::corrupt_cache: return "corrupt-cache";
    case Errc::domain_error: return "domain-error";
    case Errc::eigen_failure: return "eigendecomposition-failure";
    case Errc::invalid_range: return "invalid-range";
    case Errc::index_out_of_range: return "index-out-of-range";
    case Errc::parse_error: return "parse-error";
    case Errc::schema_violation: return "schema-violation";
  }
  return "unknown";
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

}  // namespace vnkf
