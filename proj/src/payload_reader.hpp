#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cloudadl/payload.hpp"
#include "lexer.hpp"

namespace cloudadl::detail {

// `$field` inside an automaton emission template.
struct FieldRef {
  std::string field;
  bool operator==(const FieldRef&) const = default;
};

using RawValue = std::variant<Value, FieldRef>;

struct RawPayload {
  std::string type;
  std::vector<std::pair<std::string, RawValue>> fields;
  Token at;
};

// Reads `Type{f=v,...}` from the cursor. Returns nullopt and sets `error` on
// a syntax problem. `allowRefs` enables `$field` values.
std::optional<RawPayload> read_raw_payload(TokenCursor& cur, bool allowRefs, Diagnostic& error,
                                           const std::string& origin);

// Checks a raw literal against its message type: every field present exactly
// once with the right primitive, no unknown fields. FieldRefs are checked
// only for name existence against `refSource` when given.
Diagnostics check_raw_payload(const RawPayload& raw, const ArchitectureModel& model,
                              const std::string& origin, const MessageTypeDef* refSource = nullptr);

// Builds the ordered payload; FieldRefs are resolved against `input`.
Payload instantiate(const RawPayload& raw, const MessageTypeDef& def, const Payload* input);

}  // namespace cloudadl::detail
