#include "cloudadl/analyzer.hpp"

#include <map>
#include <set>

namespace cloudadl {

namespace {

struct ResolvedEnd {
  bool own = false;
  const PortDecl* port = nullptr;
};

class Checker {
 public:
  explicit Checker(const ArchitectureModel& model) : model_(model) {}

  Diagnostics run() {
    for (const auto& c : model_.componentTypes) check_type(c);
    check_recursion();
    return std::move(diags_);
  }

 private:
  void error(const char* code, const SourcePos& at, std::string message) {
    diags_.push_back(make_error(code, at, std::move(message)));
  }

  void check_type(const ComponentTypeDef& c) {
    for (const auto& p : c.ports) {
      if (!model_.find_message(p.messageType))
        error(code::Unresolved, p.pos, "unknown message type '" + p.messageType + "' on port '" + p.name + "'");
      if (p.replicating && p.direction == Direction::In)
        error(code::ReplPort, p.pos, "in-port '" + p.name + "' cannot be replicating");
    }
    for (const auto& s : c.subcomponents) {
      const ComponentTypeDef* t = model_.find_component(s.typeRef);
      if (!t) {
        error(code::Unresolved, s.pos, "unknown component type '" + s.typeRef + "'");
      } else if (s.replicating && t->is_decomposed()) {
        error(code::ReplDecomposed, s.pos,
              "replicating subcomponent '" + s.name + "' must have an atomic type");
      }
    }
    if (c.is_decomposed() && c.behavior)
      error(code::Behavior, c.behavior->pos, "decomposed component '" + c.name + "' cannot declare a behavior");
    if (!c.is_decomposed() && !c.behavior)
      error(code::Behavior, c.pos, "atomic component '" + c.name + "' needs a behavior clause");

    std::set<std::pair<Endpoint, Endpoint>> connected;
    for (const auto& k : c.connectors) {
      auto src = resolve(c, k.source, k.pos);
      auto tgt = resolve(c, k.target, k.pos);
      if (!src || !tgt) continue;

      bool legal = false;
      if (src->own && src->port->direction == Direction::In)
        legal = !tgt->own && tgt->port->direction == Direction::In;
      else if (!src->own && src->port->direction == Direction::Out)
        legal = tgt->own ? tgt->port->direction == Direction::Out
                         : tgt->port->direction == Direction::In && k.target.instance() != k.source.instance();
      if (!legal) {
        error(code::Direction, k.pos, "illegal connector direction '" + k.str() + "'");
        continue;
      }
      if (src->port->messageType != tgt->port->messageType) {
        error(code::TypeMismatch, k.pos,
              "connector '" + k.str() + "' joins " + src->port->messageType + " to " + tgt->port->messageType);
        continue;
      }
      if (!connected.emplace(k.source, k.target).second)
        error(code::DupConnect, k.pos, "'" + k.str() + "' connected more than once");
    }

    for (const auto& ctx : c.contexts) {
      auto check_gates = [&](const std::vector<GateRef>& gates, const char* kind) {
        for (const auto& g : gates) {
          bool found = false;
          for (const auto& k : c.connectors) found = found || g.refers_to(k);
          if (!found)
            error(code::GateRef, g.pos,
                  std::string(kind) + " gate of context '" + ctx.name + "' names no connector '" + g.source.str() +
                      " -> " + g.target.str() + "'");
        }
      };
      check_gates(ctx.opening, "opening");
      check_gates(ctx.closing, "closing");
      for (const auto& close : ctx.closing) {
        for (const auto& open : ctx.opening) {
          if (open.source == close.source && open.target == close.target) {
            error(code::GateRef, close.pos,
                  "context '" + ctx.name + "' both opens and closes on '" + close.source.str() + " -> " +
                      close.target.str() + "'");
            break;
          }
        }
      }
    }
  }

  std::optional<ResolvedEnd> resolve(const ComponentTypeDef& c, const Endpoint& e, const SourcePos& at) {
    if (e.segments.size() > 2) {
      error(code::Encapsulation, at, "endpoint '" + e.str() + "' reaches below an immediate subcomponent");
      return std::nullopt;
    }
    if (e.is_own()) {
      const PortDecl* p = c.find_port(e.port());
      if (!p) {
        error(code::Unresolved, at, "'" + c.name + "' has no port '" + e.port() + "'");
        return std::nullopt;
      }
      return ResolvedEnd{true, p};
    }
    const SubcomponentDecl* s = c.find_subcomponent(e.instance());
    if (!s) {
      error(code::Unresolved, at, "'" + c.name + "' has no subcomponent '" + e.instance() + "'");
      return std::nullopt;
    }
    const ComponentTypeDef* t = model_.find_component(s->typeRef);
    if (!t) return std::nullopt;  // reported on the declaration
    const PortDecl* p = t->find_port(e.port());
    if (!p) {
      error(code::Unresolved, at, "'" + t->name + "' has no port '" + e.port() + "'");
      return std::nullopt;
    }
    return ResolvedEnd{false, p};
  }

  void check_recursion() {
    enum class Color { White, Gray, Black };
    std::map<std::string, Color> color;
    for (const auto& c : model_.componentTypes) color[c.name] = Color::White;

    auto visit = [&](auto& self, const ComponentTypeDef& c) -> void {
      color[c.name] = Color::Gray;
      for (const auto& s : c.subcomponents) {
        const ComponentTypeDef* t = model_.find_component(s.typeRef);
        if (!t) continue;
        if (color[t->name] == Color::Gray)
          error(code::Recursion, s.pos,
                "'" + t->name + "' contains itself through subcomponent '" + c.name + "." + s.name + "'");
        else if (color[t->name] == Color::White)
          self(self, *t);
      }
      color[c.name] = Color::Black;
    };
    for (const auto& c : model_.componentTypes)
      if (color[c.name] == Color::White) visit(visit, c);
  }

  const ArchitectureModel& model_;
  Diagnostics diags_;
};

}  // namespace

Diagnostics check(const ArchitectureModel& model) { return Checker(model).run(); }

}  // namespace cloudadl
