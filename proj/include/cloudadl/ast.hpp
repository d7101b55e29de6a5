#pragma once

// Abstract syntax of architecture models: message types and component types.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cloudadl/diagnostic.hpp"

namespace cloudadl {

enum class Primitive { Integer, Text, Boolean };

const char* to_string(Primitive p);

struct FieldDef {
  std::string name;
  Primitive type = Primitive::Integer;

  bool operator==(const FieldDef&) const = default;
};

struct MessageTypeDef {
  std::string name;
  std::vector<FieldDef> fields;
  SourcePos pos;

  const FieldDef* find_field(std::string_view field) const;
  bool operator==(const MessageTypeDef&) const = default;
};

enum class Direction { In, Out };

struct PortDecl {
  std::string name;
  Direction direction = Direction::In;
  std::string messageType;
  bool replicating = false;
  SourcePos pos;

  bool operator==(const PortDecl&) const = default;
};

struct SubcomponentDecl {
  std::string name;
  std::string typeRef;
  bool replicating = false;
  SourcePos pos;

  bool operator==(const SubcomponentDecl&) const = default;
};

// `port` (own port) or `inst.port`. Longer paths parse but violate encapsulation.
struct Endpoint {
  std::vector<std::string> segments;

  bool is_own() const { return segments.size() == 1; }
  const std::string& port() const { return segments.back(); }
  const std::string& instance() const { return segments.front(); }
  std::string str() const;

  bool operator==(const Endpoint&) const = default;
  auto operator<=>(const Endpoint&) const = default;
};

struct ConnectorDecl {
  Endpoint source;
  Endpoint target;
  SourcePos pos;

  std::string str() const { return source.str() + " -> " + target.str(); }
  bool operator==(const ConnectorDecl&) const = default;
};

struct GateRef {
  Endpoint source;
  Endpoint target;
  SourcePos pos;

  bool refers_to(const ConnectorDecl& c) const {
    return source == c.source && target == c.target;
  }
  bool operator==(const GateRef&) const = default;
};

struct ContextDecl {
  std::string name;
  std::vector<GateRef> opening;
  std::vector<GateRef> closing;
  SourcePos pos;

  bool operator==(const ContextDecl&) const = default;
};

struct Identifier {
  std::string name;
  bool operator==(const Identifier&) const = default;
};

using Literal = std::variant<std::int64_t, std::string, bool, Identifier>;

struct BehaviorArg {
  std::string key;  // empty for positional arguments
  Literal value;

  bool operator==(const BehaviorArg&) const = default;
};

struct BehaviorClause {
  std::string name;
  std::vector<BehaviorArg> args;
  SourcePos pos;

  // First argument with the given key, if any.
  const Literal* find(std::string_view key) const;
  std::vector<const Literal*> find_all(std::string_view key) const;
  bool operator==(const BehaviorClause&) const = default;
};

struct ComponentTypeDef {
  std::string name;
  std::vector<PortDecl> ports;
  std::vector<SubcomponentDecl> subcomponents;
  std::vector<ConnectorDecl> connectors;
  std::vector<ContextDecl> contexts;
  std::optional<BehaviorClause> behavior;
  SourcePos pos;

  bool is_decomposed() const { return !subcomponents.empty(); }
  const PortDecl* find_port(std::string_view port) const;
  const SubcomponentDecl* find_subcomponent(std::string_view sub) const;
  bool operator==(const ComponentTypeDef&) const = default;
};

// Definitions keep declaration order; names are unique per namespace.
struct ArchitectureModel {
  std::vector<MessageTypeDef> messageTypes;
  std::vector<ComponentTypeDef> componentTypes;

  const MessageTypeDef* find_message(std::string_view name) const;
  const ComponentTypeDef* find_component(std::string_view name) const;
  bool empty() const { return messageTypes.empty() && componentTypes.empty(); }
  bool operator==(const ArchitectureModel&) const = default;
};

// Copy with every SourcePos cleared. Structural equality is equality of the
// stripped models.
ArchitectureModel strip_positions(ArchitectureModel model);
bool structurally_equal(const ArchitectureModel& a, const ArchitectureModel& b);

}  // namespace cloudadl
