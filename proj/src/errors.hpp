#pragma once

#include <stdexcept>
#include <string>

namespace orbistrat {

// Failure categories; each maps 1:1 onto a public status code / CLI exit code.
enum class ErrorKind {
  Parse,                 // malformed input (JSON schema, unknown names)
  Validation,            // a named model invariant failed
  Io,                    // filesystem trouble
  StrategyPrecondition,  // a geodesic constructor was called outside its pre
  Enumeration,           // word/element budget exhausted (suspect input)
  Internal,              // should-not-happen
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace orbistrat
