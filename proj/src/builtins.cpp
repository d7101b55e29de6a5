#include <fstream>
#include <sstream>

#include "cloudadl/automaton.hpp"
#include "cloudadl/behavior.hpp"
#include "cloudadl/errors.hpp"

namespace cloudadl {

std::string render(const Directive& d) {
  switch (d.kind) {
    case Directive::Kind::Default: return "default";
    case Directive::Kind::Index: return "index(" + std::to_string(d.index) + ")";
    case Directive::Kind::Broadcast: return "broadcast";
  }
  return "?";
}

Interface::Interface(const ComponentTypeDef& type, const ArchitectureModel& model) {
  for (const auto& p : type.ports)
    ports_.push_back(PortView{p.name, p.direction, model.find_message(p.messageType), p.replicating});
}

const PortView* Interface::find(std::string_view name) const {
  for (const auto& p : ports_)
    if (p.name == name) return &p;
  return nullptr;
}

std::vector<const PortView*> Interface::inputs() const {
  std::vector<const PortView*> out;
  for (const auto& p : ports_)
    if (p.direction == Direction::In) out.push_back(&p);
  return out;
}

std::vector<const PortView*> Interface::outputs() const {
  std::vector<const PortView*> out;
  for (const auto& p : ports_)
    if (p.direction == Direction::Out) out.push_back(&p);
  return out;
}

void BehaviorRegistry::add(std::string name, BehaviorFactory factory) {
  factories_[std::move(name)] = std::move(factory);
}

bool BehaviorRegistry::contains(std::string_view name) const { return factories_.find(name) != factories_.end(); }

const BehaviorFactory& BehaviorRegistry::lookup(std::string_view name) const {
  auto it = factories_.find(name);
  if (it == factories_.end())
    throw RuntimeError(RuntimeErrc::UnknownBehavior, "no behavior named '" + std::string(name) + "'");
  return it->second;
}

std::vector<std::string> BehaviorRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, _] : factories_) out.push_back(name);
  return out;
}

std::shared_ptr<const Behavior> BehaviorRegistry::create(const BehaviorClause& clause, const Interface& iface,
                                                         const BehaviorEnv& env) const {
  return lookup(clause.name)(clause, iface, env);
}

namespace {

[[noreturn]] void bad(const BehaviorClause& c, const std::string& message) {
  throw RuntimeError(RuntimeErrc::BadArgument, c.name + ": " + message);
}

// Argument by key, falling back to the n-th positional argument.
const Literal* arg(const BehaviorClause& c, std::string_view key, std::optional<std::size_t> position = {}) {
  if (const Literal* v = c.find(key)) return v;
  if (!position) return nullptr;
  std::size_t seen = 0;
  for (const auto& a : c.args) {
    if (!a.key.empty()) continue;
    if (seen++ == *position) return &a.value;
  }
  return nullptr;
}

std::int64_t int_arg(const BehaviorClause& c, std::string_view key, std::optional<std::size_t> position,
                     std::optional<std::int64_t> fallback = {}) {
  const Literal* v = arg(c, key, position);
  if (!v) {
    if (fallback) return *fallback;
    bad(c, "missing integer argument '" + std::string(key) + "'");
  }
  if (const auto* i = std::get_if<std::int64_t>(v)) return *i;
  bad(c, "argument '" + std::string(key) + "' must be an integer");
}

// Identifier or text argument.
std::optional<std::string> name_arg(const BehaviorClause& c, std::string_view key) {
  const Literal* v = c.find(key);
  if (!v) return std::nullopt;
  if (const auto* id = std::get_if<Identifier>(v)) return id->name;
  if (const auto* s = std::get_if<std::string>(v)) return *s;
  bad(c, "argument '" + std::string(key) + "' must be a name");
}

Value value_arg(const BehaviorClause& c, std::string_view key) {
  const Literal* v = c.find(key);
  if (!v) bad(c, "missing argument '" + std::string(key) + "'");
  if (const auto* i = std::get_if<std::int64_t>(v)) return *i;
  if (const auto* s = std::get_if<std::string>(v)) return *s;
  if (const auto* b = std::get_if<bool>(v)) return *b;
  return std::get<Identifier>(*v).name;
}

const PortView* out_port(const BehaviorClause& c, const Interface& iface, const std::string& name) {
  const PortView* p = iface.find(name);
  if (!p || p->direction != Direction::Out) bad(c, "'" + name + "' is not an out-port");
  return p;
}

// `out=port` or, when absent, every out-port.
std::vector<const PortView*> targets(const BehaviorClause& c, const Interface& iface, bool required = true) {
  if (auto name = name_arg(c, "out")) return {out_port(c, iface, *name)};
  auto outs = iface.outputs();
  if (outs.empty() && required) bad(c, "component has no out-port");
  return outs;
}

std::vector<Action> emit_all(const std::vector<const PortView*>& ports, const Payload& p, Directive d = {},
                             std::uint32_t after = 0) {
  std::vector<Action> out;
  for (const auto* port : ports)
    out.push_back(action::Emit{port->name, port->type ? project(p, *port->type) : p, d, after});
  return out;
}

class Forward final : public Behavior {
 public:
  explicit Forward(std::vector<const PortView*> out, std::uint32_t after = 0) : out_(std::move(out)), after_(after) {}
  std::vector<Action> handle(const BehaviorState&, const Stimulus& in, std::mt19937_64&) const override {
    return emit_all(out_, in.payload, {}, after_);
  }

 private:
  std::vector<const PortView*> out_;
  std::uint32_t after_;
};

// Routes on one field's equality (approve_if) or integer range (validate_range).
class Classify final : public Behavior {
 public:
  Classify(std::string field, std::function<bool(const Value&)> accept, const PortView* yes, const PortView* no)
      : field_(std::move(field)), accept_(std::move(accept)), yes_(yes), no_(no) {}
  std::vector<Action> handle(const BehaviorState&, const Stimulus& in, std::mt19937_64&) const override {
    const Value* v = in.payload.find(field_);
    bool ok = v && accept_(*v);
    return emit_all({ok ? yes_ : no_}, in.payload);
  }

 private:
  std::string field_;
  std::function<bool(const Value&)> accept_;
  const PortView* yes_;
  const PortView* no_;
};

class Store final : public Behavior {
 public:
  explicit Store(std::vector<const PortView*> out) : out_(std::move(out)) {}
  std::vector<Action> handle(const BehaviorState&, const Stimulus& in, std::mt19937_64&) const override {
    std::vector<Action> actions{action::Record{in.payload}};
    auto more = emit_all(out_, in.payload);
    actions.insert(actions.end(), more.begin(), more.end());
    return actions;
  }

 private:
  std::vector<const PortView*> out_;
};

class Collect final : public Behavior {
 public:
  Collect(std::size_t n, std::vector<const PortView*> out) : n_(n), out_(std::move(out)) {}
  std::vector<Action> handle(const BehaviorState& state, const Stimulus& in, std::mt19937_64&) const override {
    BehaviorState next = state;
    next.buffer.push_back(in.payload);
    std::vector<Action> actions;
    if (next.buffer.size() >= n_) {
      for (const auto& p : next.buffer) {
        auto more = emit_all(out_, p);
        actions.insert(actions.end(), more.begin(), more.end());
      }
      next.buffer.clear();
    }
    actions.push_back(action::SetState{std::move(next)});
    return actions;
  }

 private:
  std::size_t n_;
  std::vector<const PortView*> out_;
};

class FaultAt final : public Behavior {
 public:
  FaultAt(std::int64_t step, std::string kind, std::vector<const PortView*> out)
      : step_(step), kind_(std::move(kind)), out_(std::move(out)) {}
  std::vector<Action> handle(const BehaviorState&, const Stimulus& in, std::mt19937_64&) const override {
    if (in.step == step_) return {action::Raise{kind_}};
    return emit_all(out_, in.payload);
  }

 private:
  std::int64_t step_;
  std::string kind_;
  std::vector<const PortView*> out_;
};

class Directed final : public Behavior {
 public:
  Directed(const PortView* out, Directive d) : out_(out), d_(d) {}
  std::vector<Action> handle(const BehaviorState&, const Stimulus& in, std::mt19937_64&) const override {
    return emit_all({out_}, in.payload, d_);
  }
  bool replication_dependent() const override { return true; }

 private:
  const PortView* out_;
  Directive d_;
};

class Sink final : public Behavior {
 public:
  std::vector<Action> handle(const BehaviorState&, const Stimulus&, std::mt19937_64&) const override { return {}; }
};

const PortView* replicating_target(const BehaviorClause& c, const Interface& iface) {
  auto outs = targets(c, iface);
  if (outs.size() != 1) bad(c, "needs out=<port> when the component has several out-ports");
  if (!outs.front()->replicating) bad(c, "'" + outs.front()->name + "' is not a replicating port");
  return outs.front();
}

BehaviorRegistry make_builtins() {
  BehaviorRegistry r;
  r.add("forward", [](const BehaviorClause& c, const Interface& iface, const BehaviorEnv&) {
    return std::make_shared<Forward>(targets(c, iface));
  });
  r.add("delay", [](const BehaviorClause& c, const Interface& iface, const BehaviorEnv&) {
    std::int64_t k = int_arg(c, "k", 0);
    if (k < 0) bad(c, "delay must be >= 0");
    return std::make_shared<Forward>(targets(c, iface), static_cast<std::uint32_t>(k));
  });
  r.add("approve_if", [](const BehaviorClause& c, const Interface& iface, const BehaviorEnv&) {
    auto field = name_arg(c, "field");
    if (!field) bad(c, "missing argument 'field'");
    Value expected = value_arg(c, "equals");
    const PortView* yes = out_port(c, iface, name_arg(c, "approved").value_or("approved"));
    const PortView* no = out_port(c, iface, name_arg(c, "rejected").value_or("rejected"));
    return std::make_shared<Classify>(*field, [expected](const Value& v) { return v == expected; }, yes, no);
  });
  r.add("validate_range", [](const BehaviorClause& c, const Interface& iface, const BehaviorEnv&) {
    auto field = name_arg(c, "field");
    if (!field) bad(c, "missing argument 'field'");
    std::int64_t lo = int_arg(c, "min", std::nullopt, INT64_MIN);
    std::int64_t hi = int_arg(c, "max", std::nullopt, INT64_MAX);
    const PortView* yes = out_port(c, iface, name_arg(c, "valid").value_or("valid"));
    const PortView* no = out_port(c, iface, name_arg(c, "invalid").value_or("invalid"));
    auto accept = [lo, hi](const Value& v) {
      const auto* i = std::get_if<std::int64_t>(&v);
      return i && *i >= lo && *i <= hi;
    };
    return std::make_shared<Classify>(*field, accept, yes, no);
  });
  r.add("store", [](const BehaviorClause& c, const Interface& iface, const BehaviorEnv&) {
    return std::make_shared<Store>(targets(c, iface, false));
  });
  r.add("collect", [](const BehaviorClause& c, const Interface& iface, const BehaviorEnv&) {
    std::int64_t n = int_arg(c, "n", 0);
    if (n < 1) bad(c, "n must be >= 1");
    return std::make_shared<Collect>(static_cast<std::size_t>(n), targets(c, iface));
  });
  r.add("fault_at", [](const BehaviorClause& c, const Interface& iface, const BehaviorEnv&) {
    std::int64_t step = int_arg(c, "step", 0);
    std::string kind = name_arg(c, "kind").value_or("fault");
    return std::make_shared<FaultAt>(step, kind, targets(c, iface, false));
  });
  r.add("broadcast", [](const BehaviorClause& c, const Interface& iface, const BehaviorEnv&) {
    return std::make_shared<Directed>(replicating_target(c, iface), Directive::broadcast());
  });
  r.add("pick", [](const BehaviorClause& c, const Interface& iface, const BehaviorEnv&) {
    std::int64_t i = int_arg(c, "index", 0);
    if (i < 0) bad(c, "index must be >= 0");
    return std::make_shared<Directed>(replicating_target(c, iface), Directive::to_index(static_cast<std::size_t>(i)));
  });
  r.add("sink", [](const BehaviorClause&, const Interface&, const BehaviorEnv&) {
    return std::make_shared<Sink>();
  });
  r.add("automaton", [](const BehaviorClause& c, const Interface& iface, const BehaviorEnv& env) {
    AutomatonSource src;
    if (auto file = name_arg(c, "file")) {
      std::filesystem::path path = env.baseDir / *file;
      std::ifstream in(path, std::ios::binary);
      if (!in) bad(c, "cannot read automaton file '" + path.string() + "'");
      std::ostringstream buf;
      buf << in.rdbuf();
      src = read_automaton_text(buf.str(), path.string());
    } else {
      src.origin = c.pos.origin.empty() ? std::string("automaton") : c.pos.origin + ":" + std::to_string(c.pos.line);
      int n = 0;
      for (const Literal* rule : c.find_all("rule")) {
        ++n;
        const auto* text = std::get_if<std::string>(rule);
        if (!text) bad(c, "rule arguments must be text");
        src.rules.emplace_back(n, *text);
      }
    }
    return build_automaton(src, name_arg(c, "initial"), iface, *env.model);
  });
  return r;
}

}  // namespace

const BehaviorRegistry& BehaviorRegistry::builtins() {
  static const BehaviorRegistry registry = make_builtins();
  return registry;
}

}  // namespace cloudadl
