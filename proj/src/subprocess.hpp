#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <sys/types.h>
#include <vector>

namespace vnkf::detail {

// Resolves an executable the way execvp would. Empty when not found.
std::optional<std::string> find_executable(const std::string& name);

// Child process with its stdout connected to a pipe. stderr is inherited.
class Subprocess {
 public:
  explicit Subprocess(const std::vector<std::string>& argv);
  ~Subprocess();

  Subprocess(const Subprocess&) = delete;
  Subprocess& operator=(const Subprocess&) = delete;

  // Fills out completely unless EOF comes first; returns bytes read.
  std::size_t read_exact(std::span<std::uint8_t> out);
  std::string read_all();

  // Closes the pipe and reaps the child. Returns the exit status, or -1 if
  // the child died from a signal.
  int wait();

 private:
  pid_t pid_ = -1;
  int fd_ = -1;
  std::optional<int> status_;
};

}  // namespace vnkf::detail
