#pragma once

// Table-driven automaton behavior. One transition per rule:
//
//   state , port , guard -> next [, step ; step ...]
//
// guard is `_` (always) or `field OP literal` with OP one of == != < <= > >=
// (ordering only on integer fields). A step is `emit port Type{f=v,...}`,
// `emit port *` (the incoming payload), `emit port[i] ...`, `emit port[*] ...`
// (broadcast) or `raise kind`. Template values may be `$field` of the input.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cloudadl/behavior.hpp"

namespace cloudadl {

enum class GuardOp { Eq, Ne, Lt, Le, Gt, Ge };

struct Guard {
  std::string field;
  GuardOp op = GuardOp::Eq;
  Value literal;

  bool holds(const Value& v) const;
};

class Automaton;

struct AutomatonSource {
  std::string origin;
  std::vector<std::pair<int, std::string>> rules;  // (line, text)
};

// Reads an `.aut` file body: one rule per non-blank line, `#` and `//` comments.
AutomatonSource read_automaton_text(std::string_view text, std::string origin);

// Parses and validates the rules against the component's interface. Throws
// RuntimeError(BadArgument) describing the first problem, including
// overlapping guards for the same (state, port).
std::shared_ptr<const Automaton> build_automaton(const AutomatonSource& source, std::optional<std::string> initial,
                                                 const Interface& iface, const ArchitectureModel& model);

class Automaton final : public Behavior {
 public:
  struct Step;
  struct Transition;

  Automaton(std::string initial, std::vector<Transition> transitions, bool directed);
  ~Automaton() override;

  BehaviorState initial_state() const override;
  std::vector<Action> handle(const BehaviorState& state, const Stimulus& in,
                             std::mt19937_64& random) const override;
  bool replication_dependent() const override { return directed_; }

  const std::string& initial() const { return initial_; }
  std::vector<std::string> states() const;
  std::size_t transition_count() const;

 private:
  std::string initial_;
  std::vector<Transition> transitions_;
  bool directed_;
};

}  // namespace cloudadl
