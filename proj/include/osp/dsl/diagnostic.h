#pragma once

#include <string>
#include <vector>

#include "osp/error.h"

namespace osp::dsl {

enum class Severity { kError, kWarning };

struct Diagnostic {
  Severity severity = Severity::kError;
  SourcePos pos;
  std::string message;
};

// `<file>:<line>:<col>: error: <message>`
std::string format_diagnostic(const Diagnostic& d, const std::string& file);

// Lexing and parsing stop at the first error.
class DiagnosticError : public OspError {
 public:
  explicit DiagnosticError(Diagnostic d) : OspError(d.message), diagnostic_(std::move(d)) {
    set_pos_if_unset(diagnostic_.pos);
  }
  const Diagnostic& diagnostic() const { return diagnostic_; }

 private:
  Diagnostic diagnostic_;
};

// Failures raised while interpreting statements.
class ScriptError : public OspError {
 public:
  using OspError::OspError;
};

}  // namespace osp::dsl
