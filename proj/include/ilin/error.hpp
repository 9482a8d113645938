#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace ilin {

enum class ErrorKind {
  MalformedEvent,
  NotWellFormed,
  NoPendingMatch,
  IllegalInput,
  BudgetExceeded,
  UnknownObject,
  BadParams,
  UnknownVertex,
  InvalidTask,
  NotOneShot,
  NotTotal,
  NotLinearizable,
  NoResponseFound,
  IllegalProcess,
  UnknownDemo,
  Io,
};

const char* to_string(ErrorKind kind);

/// Library error. `index` carries the offending event index (0-based) when the
/// error is about a particular event of a history.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, std::optional<std::size_t> index = std::nullopt)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind), detail_(what), index_(index) {}

  ErrorKind kind() const noexcept { return kind_; }
  /// Message without the kind prefix.
  const std::string& detail() const noexcept { return detail_; }
  std::optional<std::size_t> index() const noexcept { return index_; }

 private:
  ErrorKind kind_;
  std::string detail_;
  std::optional<std::size_t> index_;
};

}  // namespace ilin
