#pragma once

// Contract between the kernel and the behavior of atomic components.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "cloudadl/ast.hpp"
#include "cloudadl/payload.hpp"

namespace cloudadl {

struct Directive {
  enum class Kind { Default, Index, Broadcast };
  Kind kind = Kind::Default;
  std::size_t index = 0;

  static Directive to_index(std::size_t i) { return {Kind::Index, i}; }
  static Directive broadcast() { return {Kind::Broadcast, 0}; }
  bool operator==(const Directive&) const = default;
};

std::string render(const Directive& d);

// Behavior state is a small generic record; behaviors choose which parts they use.
struct BehaviorState {
  std::string control;
  std::int64_t counter = 0;
  std::vector<Payload> buffer;

  bool operator==(const BehaviorState&) const = default;
};

namespace action {
struct Emit {
  std::string port;
  Payload payload;
  Directive directive;
  std::uint32_t after = 0;  // extra steps before the send happens
  bool operator==(const Emit&) const = default;
};
struct SetState {
  BehaviorState state;
  bool operator==(const SetState&) const = default;
};
struct Raise {
  std::string kind;
  bool operator==(const Raise&) const = default;
};
// Appends to the kernel-owned result table of the instance's group.
struct Record {
  Payload payload;
  bool operator==(const Record&) const = default;
};
}  // namespace action

using Action = std::variant<action::Emit, action::SetState, action::Raise, action::Record>;

struct PortView {
  std::string name;
  Direction direction = Direction::In;
  const MessageTypeDef* type = nullptr;
  bool replicating = false;
};

// The only view of the world a behavior gets: its own ports.
class Interface {
 public:
  Interface() = default;
  Interface(const ComponentTypeDef& type, const ArchitectureModel& model);

  const PortView* find(std::string_view name) const;
  std::vector<const PortView*> inputs() const;
  std::vector<const PortView*> outputs() const;
  const std::vector<PortView>& ports() const { return ports_; }

 private:
  std::vector<PortView> ports_;
};

struct Stimulus {
  std::string port;
  Payload payload;
  std::int64_t step = 0;
  std::map<std::string, std::size_t> receivers;  // replicating out-port -> receiver count
};

class Behavior {
 public:
  virtual ~Behavior() = default;

  virtual BehaviorState initial_state() const { return {}; }
  // Must depend only on its arguments; `random` is the instance's own stream.
  virtual std::vector<Action> handle(const BehaviorState& state, const Stimulus& in,
                                     std::mt19937_64& random) const = 0;
  // True when the behavior uses directives or receiver counts.
  virtual bool replication_dependent() const { return false; }
};

struct BehaviorEnv {
  const ArchitectureModel* model = nullptr;
  std::filesystem::path baseDir;  // for sidecar files named in arguments
};

// Behaviors may keep pointers into the Interface they were created with.
using BehaviorFactory =
    std::function<std::shared_ptr<const Behavior>(const BehaviorClause&, const Interface&, const BehaviorEnv&)>;

class BehaviorRegistry {
 public:
  void add(std::string name, BehaviorFactory factory);
  bool contains(std::string_view name) const;
  // Throws RuntimeError(UnknownBehavior).
  const BehaviorFactory& lookup(std::string_view name) const;
  std::vector<std::string> names() const;

  // Throws RuntimeError(UnknownBehavior) or RuntimeError(BadArgument).
  std::shared_ptr<const Behavior> create(const BehaviorClause& clause, const Interface& iface,
                                         const BehaviorEnv& env) const;

  // forward, approve_if, validate_range, store, collect, fault_at, delay,
  // automaton, broadcast, pick, sink.
  static const BehaviorRegistry& builtins();

 private:
  std::map<std::string, BehaviorFactory, std::less<>> factories_;
};

}  // namespace cloudadl
