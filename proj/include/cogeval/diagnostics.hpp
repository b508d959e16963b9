#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cogeval {

// Raised for malformed configuration (profiles, weight tables, name sets).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised when an evaluation cannot be carried out (e.g. no scorable level).
struct EvalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Raised for unreadable or garbled input files.
struct IngestError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One validation finding. `line` is 1-based when the finding refers to a
// line of an input stream, 0 otherwise.
struct Diagnostic {
  std::string message;
  long line = 0;

  std::string str() const {
    if (line > 0) return "line " + std::to_string(line) + ": " + message;
    return message;
  }
};

inline std::string join_diagnostics(const std::vector<Diagnostic>& diags,
                                    const char* sep = "; ") {
  std::string out;
  for (const Diagnostic& d : diags) {
    if (!out.empty()) out += sep;
    out += d.str();
  }
  return out;
}

}  // namespace cogeval
