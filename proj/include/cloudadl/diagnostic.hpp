#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cloudadl {

struct SourcePos {
  std::string origin;
  int line = 0;
  int column = 0;

  bool operator==(const SourcePos&) const = default;
};

enum class Severity { Error, Warning };

// Stable diagnostic codes. The string form is what tools print.
namespace code {
inline constexpr const char* Syntax = "E_SYNTAX";
inline constexpr const char* Duplicate = "E_DUPLICATE";
inline constexpr const char* Io = "E_IO";
inline constexpr const char* Unresolved = "E_UNRESOLVED";
inline constexpr const char* TypeMismatch = "E_TYPE_MISMATCH";
inline constexpr const char* Direction = "E_DIRECTION";
inline constexpr const char* Encapsulation = "E_ENCAPSULATION";
inline constexpr const char* DupConnect = "E_DUP_CONNECT";
inline constexpr const char* Behavior = "E_BEHAVIOR";
inline constexpr const char* GateRef = "E_GATE_REF";
inline constexpr const char* Recursion = "E_RECURSION";
inline constexpr const char* ReplPort = "E_REPL_PORT";
inline constexpr const char* ReplDecomposed = "E_REPL_DECOMPOSED";
inline constexpr const char* UnknownBehavior = "E_UNKNOWN_BEHAVIOR";
inline constexpr const char* BadArgument = "E_BAD_ARGUMENT";
}  // namespace code

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string code;
  SourcePos pos;
  std::string message;
};

using Diagnostics = std::vector<Diagnostic>;

inline Diagnostic make_error(std::string code, SourcePos pos, std::string message) {
  return Diagnostic{Severity::Error, std::move(code), std::move(pos), std::move(message)};
}

inline bool has_errors(const Diagnostics& diags) {
  for (const auto& d : diags)
    if (d.severity == Severity::Error) return true;
  return false;
}

// <origin>:<line>:<col>: <CODE>: <message>
inline std::string format(const Diagnostic& d) {
  return d.pos.origin + ":" + std::to_string(d.pos.line) + ":" + std::to_string(d.pos.column) +
         ": " + d.code + ": " + d.message;
}

inline std::ostream& operator<<(std::ostream& os, const Diagnostic& d) { return os << format(d); }

}  // namespace cloudadl
