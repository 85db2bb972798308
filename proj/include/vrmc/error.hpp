/*!
  \file
  \brief Error type shared by all vrmc components.
*/

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace vrmc {

//! Failure categories. The CLI prints these names verbatim.
enum class ErrorKind {
  invalid_argument,
  non_finite_value,
  recursion_limit,
  oracle_disagreement,
  io,
};

constexpr auto to_string(ErrorKind kind) noexcept -> std::string_view {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::non_finite_value: return "non_finite_value";
    case ErrorKind::recursion_limit: return "recursion_limit";
    case ErrorKind::oracle_disagreement: return "oracle_disagreement";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  auto kind() const noexcept -> ErrorKind { return kind_; }

 private:
  ErrorKind kind_;
};

namespace detail {

inline auto require(bool condition, const std::string& message) -> void {
  if (!condition) throw Error(ErrorKind::invalid_argument, message);
}

}  // namespace detail
}  // namespace vrmc
