#pragma once

#include <stdexcept>
#include <string>

namespace bipan {

/// Failure carrying a stable, machine-readable code (e.g. "unknown-node")
/// next to a human-readable detail. The CLI prints both as
/// `error: <code>: <detail>`.
class Error : public std::runtime_error {
 public:
  Error(std::string code, std::string detail)
      : std::runtime_error(code + ": " + detail), code_(std::move(code)), detail_(std::move(detail)) {}

  const std::string& code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string code_;
  std::string detail_;
};

}  // namespace bipan
