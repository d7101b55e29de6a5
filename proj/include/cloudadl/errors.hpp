#pragma once

#include <stdexcept>
#include <string>

namespace cloudadl {

enum class RuntimeErrc {
  UnknownBehavior,
  BadArgument,
  TypeError,
  EmptyGroup,
  BadDirective,
  BadPort,
  UnknownInstance,
  UnknownChannel,
  OracleInapplicable,
};

const char* to_string(RuntimeErrc e);

class RuntimeError : public std::runtime_error {
 public:
  RuntimeError(RuntimeErrc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  RuntimeErrc code() const noexcept { return code_; }

 private:
  RuntimeErrc code_;
};

inline const char* to_string(RuntimeErrc e) {
  switch (e) {
    case RuntimeErrc::UnknownBehavior: return "UnknownBehavior";
    case RuntimeErrc::BadArgument: return "BadArgument";
    case RuntimeErrc::TypeError: return "TypeError";
    case RuntimeErrc::EmptyGroup: return "EmptyGroup";
    case RuntimeErrc::BadDirective: return "BadDirective";
    case RuntimeErrc::BadPort: return "BadPort";
    case RuntimeErrc::UnknownInstance: return "UnknownInstance";
    case RuntimeErrc::UnknownChannel: return "UnknownChannel";
    case RuntimeErrc::OracleInapplicable: return "OracleInapplicable";
  }
  return "RuntimeError";
}

}  // namespace cloudadl
