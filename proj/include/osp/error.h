#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace osp {

struct SourcePos {
  uint32_t line = 0;
  uint32_t column = 0;

  bool valid() const { return line > 0 && column > 0; }
  friend bool operator==(const SourcePos&, const SourcePos&) = default;
};

// Base for every error the runtime raises. A source position is attached
// by the interpreter when the failing statement is known.
class OspError : public std::runtime_error {
 public:
  explicit OspError(const std::string& message) : std::runtime_error(message), message_(message) {}

  const char* what() const noexcept override { return message_.c_str(); }
  const std::string& message() const { return message_; }

  void add_context(const std::string& context) { message_ = context + ": " + message_; }

  const std::optional<SourcePos>& pos() const { return pos_; }
  void set_pos_if_unset(SourcePos pos) {
    if (!pos_ && pos.valid()) pos_ = pos;
  }

  // Set once the engine has emitted an `error` trace event for this failure.
  bool traced = false;

 private:
  std::string message_;
  std::optional<SourcePos> pos_;
};

// Unknown ids, schema violations, dangling endpoints.
class GraphError : public OspError {
 public:
  using OspError::OspError;
};

// Dead ids inside a path, or an invalid derived path.
class PathError : public OspError {
 public:
  using OspError::OspError;
};

// Fatal traversal failures: illegal moves, terminal edges, bad ability bodies.
class TraversalError : public OspError {
 public:
  using OspError::OspError;
};

class BudgetExceeded : public OspError {
 public:
  using OspError::OspError;
};

}  // namespace osp
