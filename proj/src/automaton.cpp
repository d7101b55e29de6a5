#include "cloudadl/automaton.hpp"

#include <cstdint>
#include <set>
#include <sstream>

#include "cloudadl/errors.hpp"
#include "lexer.hpp"
#include "payload_reader.hpp"

namespace cloudadl {

using detail::Tok;
using detail::Token;

struct Automaton::Step {
  enum class Kind { Emit, Raise } kind = Kind::Emit;
  std::string port;
  Directive directive;
  bool forwardInput = false;
  std::optional<detail::RawPayload> templ;
  const MessageTypeDef* type = nullptr;
  std::string raiseKind;
};

struct Automaton::Transition {
  std::string from;
  std::string port;
  std::optional<Guard> guard;
  std::string to;
  std::vector<Step> steps;
  std::string where;
};

bool Guard::holds(const Value& v) const {
  if (v.index() != literal.index()) return false;
  switch (op) {
    case GuardOp::Eq: return v == literal;
    case GuardOp::Ne: return v != literal;
    case GuardOp::Lt: return v < literal;
    case GuardOp::Le: return v <= literal;
    case GuardOp::Gt: return v > literal;
    case GuardOp::Ge: return v >= literal;
  }
  return false;
}

namespace {

std::optional<GuardOp> op_of(const Token& t) {
  if (t.kind != Tok::Op) return std::nullopt;
  if (t.text == "==") return GuardOp::Eq;
  if (t.text == "!=") return GuardOp::Ne;
  if (t.text == "<") return GuardOp::Lt;
  if (t.text == "<=") return GuardOp::Le;
  if (t.text == ">") return GuardOp::Gt;
  if (t.text == ">=") return GuardOp::Ge;
  return std::nullopt;
}

// Two guards on the same (state, port) overlap when some payload satisfies
// both. Guards on different fields, or a missing guard, always overlap.
bool overlap(const std::optional<Guard>& a, const std::optional<Guard>& b) {
  if (!a || !b) return true;
  if (a->field != b->field) return true;
  std::vector<Value> witnesses{a->literal, b->literal};
  if (const auto* x = std::get_if<std::int64_t>(&a->literal)) {
    const auto y = std::get<std::int64_t>(b->literal);
    witnesses.clear();
    for (std::int64_t base : {*x, y})
      for (std::int64_t d = -2; d <= 2; ++d) {
        if ((d < 0 && base < INT64_MIN - d) || (d > 0 && base > INT64_MAX - d)) continue;
        witnesses.push_back(base + d);
      }
    witnesses.push_back(INT64_MIN);
    witnesses.push_back(INT64_MAX);
  } else if (std::holds_alternative<std::string>(a->literal)) {
    // a value distinct from both literals
    std::string other = std::get<std::string>(a->literal) + std::get<std::string>(b->literal) + "~";
    witnesses.push_back(other);
  } else {
    witnesses = {true, false};
  }
  for (const auto& w : witnesses)
    if (a->holds(w) && b->holds(w)) return true;
  return false;
}

class RuleParser {
 public:
  RuleParser(const Interface& iface, const ArchitectureModel& model) : iface_(iface), model_(model) {}

  Automaton::Transition parse(const std::string& text, const std::string& where) {
    where_ = where;
    detail::TokenCursor cur(detail::tokenize(text));
    Automaton::Transition t;
    t.where = where;
    t.from = ident(cur, "state");
    punct(cur, ',');
    t.port = ident(cur, "in-port");
    const PortView* in = iface_.find(t.port);
    if (!in || in->direction != Direction::In) fail("'" + t.port + "' is not an in-port");
    punct(cur, ',');
    if (cur.peek().is(Tok::Ident, "_")) {
      cur.next();
    } else {
      Guard g;
      g.field = ident(cur, "guard field");
      auto op = op_of(cur.peek());
      if (!op) fail("expected comparison operator, found " + detail::describe(cur.peek()));
      cur.next();
      g.op = *op;
      g.literal = value(cur);
      const FieldDef* f = in->type ? in->type->find_field(g.field) : nullptr;
      if (!f) fail("input type of '" + t.port + "' has no field '" + g.field + "'");
      if (f->type != primitive_of(g.literal)) fail("guard literal does not match field '" + g.field + "'");
      if (f->type != Primitive::Integer && g.op != GuardOp::Eq && g.op != GuardOp::Ne)
        fail("ordering guards need an integer field");
      t.guard = std::move(g);
    }
    if (cur.peek().kind != Tok::Arrow) fail("expected '->', found " + detail::describe(cur.peek()));
    cur.next();
    t.to = ident(cur, "next state");
    if (cur.accept_punct(',')) {
      do {
        t.steps.push_back(step(cur, *in));
      } while (cur.accept_punct(';'));
    }
    if (!cur.at_end()) fail("unexpected " + detail::describe(cur.peek()));
    return t;
  }

  bool directed = false;

 private:
  [[noreturn]] void fail(const std::string& message) {
    throw RuntimeError(RuntimeErrc::BadArgument, where_ + ": " + message);
  }

  std::string ident(detail::TokenCursor& cur, const char* what) {
    const Token& t = cur.peek();
    if (t.kind == Tok::Error) fail(t.text);
    if (t.kind != Tok::Ident) fail(std::string("expected ") + what + ", found " + detail::describe(t));
    return cur.next().text;
  }

  void punct(detail::TokenCursor& cur, char c) {
    if (!cur.accept_punct(c)) fail(std::string("expected '") + c + "', found " + detail::describe(cur.peek()));
  }

  Value value(detail::TokenCursor& cur) {
    const Token& t = cur.next();
    if (t.kind == Tok::Integer) return t.integer;
    if (t.kind == Tok::String) return t.text;
    if (t.is(Tok::Ident, "true")) return true;
    if (t.is(Tok::Ident, "false")) return false;
    fail("expected a literal, found " + detail::describe(t));
  }

  Automaton::Step step(detail::TokenCursor& cur, const PortView& in) {
    Automaton::Step s;
    std::string word = ident(cur, "'emit' or 'raise'");
    if (word == "raise") {
      s.kind = Automaton::Step::Kind::Raise;
      s.raiseKind = ident(cur, "error kind");
      return s;
    }
    if (word != "emit") fail("expected 'emit' or 'raise', found '" + word + "'");
    s.port = ident(cur, "out-port");
    const PortView* out = iface_.find(s.port);
    if (!out || out->direction != Direction::Out) fail("'" + s.port + "' is not an out-port");
    s.type = out->type;
    if (cur.accept_punct('[')) {
      if (cur.accept_punct('*')) {
        s.directive = Directive::broadcast();
      } else {
        const Token& i = cur.next();
        if (i.kind != Tok::Integer || i.integer < 0) fail("expected replica index or '*'");
        s.directive = Directive::to_index(static_cast<std::size_t>(i.integer));
      }
      punct(cur, ']');
      if (!out->replicating) fail("directive on non-replicating port '" + s.port + "'");
      directed = true;
    }
    if (cur.accept_punct('*')) {
      if (!in.type || !out->type || in.type->name != out->type->name)
        fail("'*' forwards " + (in.type ? in.type->name : "?") + " but '" + s.port + "' carries " +
             (out->type ? out->type->name : "?"));
      s.forwardInput = true;
      return s;
    }
    Diagnostic err;
    auto raw = detail::read_raw_payload(cur, true, err, where_);
    if (!raw) fail(err.message);
    if (!out->type || raw->type != out->type->name) fail("'" + s.port + "' carries " + (out->type ? out->type->name : "?"));
    Diagnostics diags = detail::check_raw_payload(*raw, model_, where_, in.type);
    if (!diags.empty()) fail(diags.front().message);
    s.templ = std::move(raw);
    return s;
  }

  const Interface& iface_;
  const ArchitectureModel& model_;
  std::string where_;
};

}  // namespace

AutomatonSource read_automaton_text(std::string_view text, std::string origin) {
  AutomatonSource src;
  src.origin = std::move(origin);
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    auto cut = std::min(line.find('#'), line.find("//"));
    if (cut != std::string::npos) line.resize(cut);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    src.rules.emplace_back(number, line);
  }
  return src;
}

std::shared_ptr<const Automaton> build_automaton(const AutomatonSource& source, std::optional<std::string> initial,
                                                 const Interface& iface, const ArchitectureModel& model) {
  RuleParser parser(iface, model);
  std::vector<Automaton::Transition> transitions;
  for (const auto& [line, text] : source.rules)
    transitions.push_back(parser.parse(text, source.origin + ":" + std::to_string(line)));

  for (std::size_t i = 0; i < transitions.size(); ++i)
    for (std::size_t j = i + 1; j < transitions.size(); ++j) {
      const auto& a = transitions[i];
      const auto& b = transitions[j];
      if (a.from == b.from && a.port == b.port && overlap(a.guard, b.guard))
        throw RuntimeError(RuntimeErrc::BadArgument,
                           b.where + ": guard overlaps rule at " + a.where + " for (" + a.from + ", " + a.port + ")");
    }

  if (!initial) {
    if (transitions.empty()) throw RuntimeError(RuntimeErrc::BadArgument, source.origin + ": automaton has no rules");
    initial = transitions.front().from;
  }
  return std::make_shared<Automaton>(*initial, std::move(transitions), parser.directed);
}

Automaton::Automaton(std::string initial, std::vector<Transition> transitions, bool directed)
    : initial_(std::move(initial)), transitions_(std::move(transitions)), directed_(directed) {}

Automaton::~Automaton() = default;

BehaviorState Automaton::initial_state() const {
  BehaviorState s;
  s.control = initial_;
  return s;
}

std::vector<std::string> Automaton::states() const {
  std::set<std::string> s{initial_};
  for (const auto& t : transitions_) {
    s.insert(t.from);
    s.insert(t.to);
  }
  return {s.begin(), s.end()};
}

std::size_t Automaton::transition_count() const { return transitions_.size(); }

std::vector<Action> Automaton::handle(const BehaviorState& state, const Stimulus& in, std::mt19937_64&) const {
  for (const auto& t : transitions_) {
    if (t.from != state.control || t.port != in.port) continue;
    if (t.guard) {
      const Value* v = in.payload.find(t.guard->field);
      if (!v || !t.guard->holds(*v)) continue;
    }
    std::vector<Action> actions;
    for (const auto& s : t.steps) {
      if (s.kind == Step::Kind::Raise) {
        actions.push_back(action::Raise{s.raiseKind});
        continue;
      }
      Payload p = s.forwardInput ? in.payload : detail::instantiate(*s.templ, *s.type, &in.payload);
      actions.push_back(action::Emit{s.port, std::move(p), s.directive, 0});
    }
    if (t.to != state.control) {
      BehaviorState next = state;
      next.control = t.to;
      actions.push_back(action::SetState{std::move(next)});
    }
    return actions;
  }
  return {action::Raise{"no_transition"}};
}

}  // namespace cloudadl
