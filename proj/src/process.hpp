// Minimal child-process plumbing for driving the git CLI.

#pragma once

#include <string>
#include <sys/types.h>
#include <vector>

namespace cvalue::process {

struct Result {
  int exit_code = 0;
  std::string out;
  std::string err;
};

/// Runs argv to completion and captures stdout and stderr.
Result run(const std::vector<std::string> &argv);

/// A long-lived child with pipes on stdin and stdout.
class Pipe {
public:
  explicit Pipe(const std::vector<std::string> &argv);
  ~Pipe();
  Pipe(const Pipe &) = delete;
  Pipe &operator=(const Pipe &) = delete;

  void write(const std::string &data);
  std::string read_line();
  std::string read_exact(std::size_t n);

private:
  bool fill();

  pid_t pid_ = -1;
  int in_ = -1;
  int out_ = -1;
  std::string buffer_;
  std::size_t pos_ = 0;
};

}  // namespace cvalue::process
