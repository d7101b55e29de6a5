#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cloudadl/ast.hpp"
#include "cloudadl/diagnostic.hpp"

namespace cloudadl {

using Value = std::variant<std::int64_t, std::string, bool>;

Primitive primitive_of(const Value& v);
Value default_value(Primitive p);
std::string render(const Value& v);

// A typed record. Fields are kept in the declaration order of the message type.
struct Payload {
  std::string type;
  std::vector<std::pair<std::string, Value>> fields;

  const Value* find(std::string_view field) const;
  bool operator==(const Payload&) const = default;
};

// `Type{field=value,...}` in declaration order; text values quoted and escaped.
std::string render(const Payload& p);

// Record of type `def` whose fields are copied from `from` where name and
// primitive agree, and defaulted otherwise.
Payload project(const Payload& from, const MessageTypeDef& def);

// True when `p` has exactly the fields of `def`, in order, with matching types.
bool conforms(const Payload& p, const MessageTypeDef& def);

struct PayloadParse {
  std::optional<Payload> payload;
  Diagnostics diagnostics;
};

// Parses a complete `Type{f=v,...}` literal and checks it against the model.
// Missing, unknown or mistyped fields are E_TYPE_MISMATCH; unknown types are
// E_UNRESOLVED.
PayloadParse parse_payload(std::string_view text, const ArchitectureModel& model,
                           const SourcePos& at);

}  // namespace cloudadl
