#pragma once

#include <stdexcept>
#include <string>

namespace vnkf {

enum class Errc {
  invalid_argument,
  decoder_not_found,
  decode_failure,
  empty_video,
  empty_directory,
  unreadable_image,
  wrong_dimensions,
  empty_raster,
  empty_sequence,
  io_failure,
  corrupt_cache,
  domain_error,
  eigen_failure,
  invalid_range,
  index_out_of_range,
  parse_error,
  schema_violation,
};

const char* to_string(Errc code) noexcept;

// Every failure raised by the library carries one of the codes above so
// callers (the CLI in particular) can map error classes to exit codes.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace vnkf
