#pragma once

// Deterministic discrete-step simulation of an elaborated topology.
//
// Each step: deferred emissions due now are sent, pending shrinks retried,
// every in-flight message with arriveStep <= step delivered in the total
// order (arriveStep, channel id, seq), every queued message activated in the
// same order, and finally the step counter advances. Channel latency is at
// least one step, so nothing sent during a step is delivered within it.

#include <cstdint>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "cloudadl/ast.hpp"
#include "cloudadl/behavior.hpp"
#include "cloudadl/replica_group.hpp"
#include "cloudadl/tokens.hpp"
#include "cloudadl/topology.hpp"
#include "cloudadl/trace.hpp"

namespace cloudadl {

struct LatencyOverride {
  std::string pattern;  // glob over channel ids
  std::uint32_t steps = 1;
};

struct KernelConfig {
  std::uint64_t seed = 0;
  std::vector<LatencyOverride> latencies;  // later entries win
  std::map<std::string, std::size_t> initialReplicas;
  std::map<std::string, ErrorStrategy> strategies;
  const BehaviorRegistry* registry = nullptr;  // builtins when null
};

// Applies glob overrides to channel latencies in place.
void apply_latencies(RuntimeTopology& topo, const std::vector<LatencyOverride>& overrides);

struct Message {
  std::size_t channel = 0;
  Payload payload;
  TokenSet tokens;
  std::uint64_t seq = 0;
  std::int64_t sendStep = 0;
  std::int64_t arriveStep = 0;
  std::optional<ReplicaId> pinned;
};

struct InstanceRef {
  std::size_t node = 0;
  ReplicaId replica = 0;

  bool operator==(const InstanceRef&) const = default;
  auto operator<=>(const InstanceRef&) const = default;
};

// Tokens handed from one incoming message to everything its activation emits.
struct Outgoing {
  action::Emit emit;
  TokenSet tokens;
};
std::vector<Outgoing> handover(const TokenSet& incoming, std::vector<action::Emit> emissions);

class Kernel {
 public:
  // Throws RuntimeError(UnknownBehavior | BadArgument) when a behavior cannot
  // be created.
  Kernel(std::shared_ptr<const ArchitectureModel> model, RuntimeTopology topology, KernelConfig config = {});
  ~Kernel();
  Kernel(const Kernel&) = delete;
  Kernel& operator=(const Kernel&) = delete;

  /// Puts a message in flight on `channel`; returns its seq. Throws
  /// RuntimeError(TypeError) when the payload does not fit the channel.
  std::uint64_t send(std::size_t channel, const Payload& payload, const TokenSet& tokens = {},
                     std::optional<ReplicaId> pinned = std::nullopt);

  /// External send on every channel fed by a root in-port.
  std::vector<std::uint64_t> inject(std::string_view rootInPort, const Payload& payload);

  /// Emission on behalf of an instance. Index/broadcast need a replicating
  /// port and a valid index, otherwise RuntimeError(BadDirective).
  void emit_directed(InstanceRef from, std::string_view outPort, const Payload& payload, Directive directive,
                     const TokenSet& tokens = {});

  /// Live receivers behind a replicating out-port.
  std::size_t receiver_count(InstanceRef from, std::string_view outPort) const;

  void scale(std::string_view groupPath, std::size_t target);

  /// Injected fault; handled exactly like a Raise from the instance.
  void fault(InstanceRef at, const std::string& kind);

  void step();
  void run(std::int64_t maxSteps);

  bool quiescent() const;
  bool halted() const { return halted_; }
  std::int64_t current_step() const { return step_; }
  std::size_t in_flight() const { return inFlight_.size(); }

  const EventLog& log() const { return log_; }
  // Store results by group path, in delivery order.
  const std::map<std::string, std::vector<Payload>>& store_tables() const { return tables_; }

  const RuntimeTopology& topology() const { return topo_; }
  const ArchitectureModel& model() const { return *model_; }
  std::optional<InstanceRef> find(std::string_view path, ReplicaId replica = 0) const;
  // "root/a" or "root/a[2]" for replicas of a group.
  std::optional<InstanceRef> parse_ref(std::string_view text) const;
  std::string describe(InstanceRef ref) const;
  const ReplicaGroup* group(std::string_view path) const;
  const BehaviorState& state(InstanceRef ref) const;
  const TokenSet& held_tokens(InstanceRef ref) const;
  std::size_t queue_length(InstanceRef ref, std::string_view port) const;
  MintCounters& mint_counters() { return mint_; }

 private:
  struct Replica;
  struct Node;
  struct Deferred;
  using FlightKey = std::tuple<std::int64_t, std::size_t, std::uint64_t>;

  Node& node(std::size_t i) { return *nodes_.at(i); }
  const Node& node(std::size_t i) const { return *nodes_.at(i); }
  Replica& replica(InstanceRef ref);
  const Replica& replica(InstanceRef ref) const;
  Replica make_replica(std::size_t node, ReplicaId id) const;
  ErrorStrategy strategy(std::size_t node) const;

  void deliver(Message msg);
  void activate(InstanceRef ref, const std::string& port, const Message& msg);
  void dispatch(InstanceRef from, const Outgoing& out);
  std::optional<std::string> validate(InstanceRef from, const action::Emit& e) const;
  void supervise(InstanceRef at, const std::string& kind, std::uint64_t seq);
  void restart(std::size_t subtreeNode, std::optional<InstanceRef> only);
  void try_retire(std::size_t node, bool logChange);
  void log_scale(std::size_t node);

  std::shared_ptr<const ArchitectureModel> model_;
  RuntimeTopology topo_;
  KernelConfig config_;
  std::vector<std::unique_ptr<Node>> nodes_;
  std::map<FlightKey, Message> inFlight_;
  std::vector<Deferred> deferred_;
  std::int64_t step_ = 0;
  std::uint64_t seq_ = 0;
  MintCounters mint_;
  EventLog log_;
  std::map<std::string, std::vector<Payload>> tables_;
  bool halted_ = false;
};

}  // namespace cloudadl
