#pragma once

// Elaborated instance tree with fused end-to-end channels.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cloudadl/ast.hpp"

namespace cloudadl {

enum class InstanceKind { Supervisor, Atomic };
enum class ErrorStrategy { Resume, Restart, Escalate };

const char* to_string(ErrorStrategy s);
std::optional<ErrorStrategy> parse_strategy(std::string_view text);

struct ReplicaGroupSpec {
  std::size_t initialCount = 1;
};

struct InstanceNode {
  std::string path;  // "root", "root/handler", ...
  std::string typeRef;
  InstanceKind kind = InstanceKind::Atomic;
  std::optional<ReplicaGroupSpec> replicaGroup;
  ErrorStrategy errorStrategy = ErrorStrategy::Escalate;
  std::optional<std::size_t> parent;
  std::vector<std::size_t> children;
};

enum class GateKind { Open, Close };

struct GateSpec {
  std::string context;
  GateKind kind = GateKind::Open;

  bool operator==(const GateSpec&) const = default;
  auto operator<=>(const GateSpec&) const = default;
};

// One end of a fused channel: a port of an atomic instance, or a port on the
// root's boundary (`external`).
struct ChannelEnd {
  std::size_t instance = 0;  // index into RuntimeTopology::instances
  std::string port;
  bool external = false;

  bool operator==(const ChannelEnd&) const = default;
};

struct ChannelSpec {
  std::string id;  // full connector chain, e.g. "root.update->root/handler.update"
  ChannelEnd from;
  ChannelEnd to;
  std::string messageType;
  std::vector<GateSpec> gates;  // traversal order
  std::uint32_t latency = 1;
};

struct ExternalPort {
  std::string name;
  Direction direction = Direction::In;
  std::string messageType;
};

struct RuntimeTopology {
  std::vector<InstanceNode> instances;  // preorder; [0] is the root
  std::vector<ChannelSpec> channels;    // sorted by id; index order == id order
  std::vector<ExternalPort> externalPorts;

  std::optional<std::size_t> find_instance(std::string_view path) const;
  std::optional<std::size_t> find_channel(std::string_view id) const;
  // Channels leaving an atomic out-port (or fed by a root in-port when `external`).
  std::vector<std::size_t> channels_from(std::size_t instance, std::string_view port, bool external) const;
  const ExternalPort* find_external(std::string_view name, Direction dir) const;
  std::size_t internal_channel_count() const;
};

}  // namespace cloudadl
