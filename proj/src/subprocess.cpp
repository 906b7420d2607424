#include "subprocess.hpp"

#include <cerrno>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include "vnkf/error.hpp"

extern char** environ;

namespace vnkf::detail {

std::optional<std::string> find_executable(const std::string& name) {
  namespace fs = std::filesystem;
  if (name.empty()) return std::nullopt;
  if (name.find('/') != std::string::npos) {
    if (::access(name.c_str(), X_OK) == 0 && !fs::is_directory(name)) return name;
    return std::nullopt;
  }
  const char* path_env = std::getenv("PATH");
  std::string path = path_env ? path_env : "/usr/bin:/bin";
  std::size_t start = 0;
  while (start <= path.size()) {
    std::size_t end = path.find(':', start);
    if (end == std::string::npos) end = path.size();
    std::string dir = path.substr(start, end - start);
    if (dir.empty()) dir = ".";
    std::string candidate = dir + "/" + name;
    if (::access(candidate.c_str(), X_OK) == 0 && !fs::is_directory(candidate)) return candidate;
    start = end + 1;
  }
  return std::nullopt;
}

Subprocess::Subprocess(const std::vector<std::string>& argv) {
  int fds[2];
  if (::pipe(fds) != 0) {
    throw Error(Errc::io_failure, std::string("pipe: ") + std::strerror(errno));
  }
  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_addclose(&actions, fds[0]);
  posix_spawn_file_actions_adddup2(&actions, fds[1], STDOUT_FILENO);
  posix_spawn_file_actions_addclose(&actions, fds[1]);

  std::vector<char*> args;
  args.reserve(argv.size() + 1);
  for (const auto& a : argv) args.push_back(const_cast<char*>(a.c_str()));
  args.push_back(nullptr);

  int rc = ::posix_spawnp(&pid_, args[0], &actions, nullptr, args.data(), environ);
  posix_spawn_file_actions_destroy(&actions);
  ::close(fds[1]);
  if (rc != 0) {
    ::close(fds[0]);
    throw Error(Errc::decoder_not_found, argv[0] + ": " + std::strerror(rc));
  }
  fd_ = fds[0];
}

Subprocess::~Subprocess() {
  if (pid_ > 0 && !status_) {
    // Do not block on a child that may still be writing.
    ::kill(pid_, SIGTERM);
    wait();
  }
}

std::size_t Subprocess::read_exact(std::span<std::uint8_t> out) {
  std::size_t got = 0;
  while (got < out.size()) {
    ssize_t n = ::read(fd_, out.data() + got, out.size() - got);
    if (n == 0) break;
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(Errc::io_failure, std::string("read from decoder: ") + std::strerror(errno));
    }
    got += static_cast<std::size_t>(n);
  }
  return got;
}

std::string Subprocess::read_all() {
  std::string text;
  std::uint8_t buf[4096];
  for (;;) {
    std::size_t n = read_exact(buf);
    text.append(reinterpret_cast<const char*>(buf), n);
    if (n < sizeof buf) break;
  }
  return text;
}

int Subprocess::wait() {
  if (status_) return *status_;
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
  int raw = 0;
  while (::waitpid(pid_, &raw, 0) < 0) {
    if (errno != EINTR) {
      status_ = -1;
      return -1;
    }
  }
  status_ = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return *status_;
}

}  // namespace vnkf::detail
