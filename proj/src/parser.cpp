#include "cloudadl/parser.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "lexer.hpp"

namespace cloudadl {

using detail::Tok;
using detail::Token;
using detail::TokenCursor;

namespace {

struct SyntaxFailure {
  Diagnostic diag;
};

class ModelParser {
 public:
  ModelParser(std::string_view source, std::string_view origin)
      : origin_(origin), cur_(detail::tokenize(source)) {}

  ModelResult run() {
    ArchitectureModel model;
    try {
      while (!cur_.at_end()) {
        const Token& t = cur_.peek();
        if (t.is(Tok::Ident, "message")) {
          model.messageTypes.push_back(message());
        } else if (t.is(Tok::Ident, "component")) {
          model.componentTypes.push_back(component());
        } else {
          fail(t, "expected 'message' or 'component', found " + detail::describe(t));
        }
      }
    } catch (const SyntaxFailure& f) {
      return {std::nullopt, {f.diag}};
    }

    std::set<std::string> msgNames, compNames;
    for (const auto& m : model.messageTypes)
      if (!msgNames.insert(m.name).second)
        duplicates_.push_back(make_error(code::Duplicate, m.pos, "message type '" + m.name + "' defined twice"));
    for (const auto& c : model.componentTypes)
      if (!compNames.insert(c.name).second)
        duplicates_.push_back(make_error(code::Duplicate, c.pos, "component type '" + c.name + "' defined twice"));

    if (!duplicates_.empty()) return {std::nullopt, std::move(duplicates_)};
    return {std::move(model), {}};
  }

 private:
  [[noreturn]] void fail(const Token& at, std::string message) {
    throw SyntaxFailure{make_error(code::Syntax, pos(at), std::move(message))};
  }

  SourcePos pos(const Token& t) const { return SourcePos{origin_, t.line, t.column}; }

  void check_lex(const Token& t) {
    if (t.kind == Tok::Error) fail(t, t.text);
  }

  std::string ident(const char* what) {
    const Token& t = cur_.peek();
    check_lex(t);
    if (t.kind != Tok::Ident) fail(t, std::string("expected ") + what + ", found " + detail::describe(t));
    return cur_.next().text;
  }

  void expect_punct(char c) {
    const Token& t = cur_.peek();
    check_lex(t);
    if (!t.punct(c)) fail(t, std::string("expected '") + c + "', found " + detail::describe(t));
    cur_.next();
  }

  void expect_word(std::string_view word) {
    const Token& t = cur_.peek();
    check_lex(t);
    if (!t.is(Tok::Ident, word))
      fail(t, "expected '" + std::string(word) + "', found " + detail::describe(t));
    cur_.next();
  }

  void duplicate(const SourcePos& at, std::string message) {
    duplicates_.push_back(make_error(code::Duplicate, at, std::move(message)));
  }

  MessageTypeDef message() {
    MessageTypeDef def;
    def.pos = pos(cur_.next());
    def.name = ident("message type name");
    expect_punct('{');
    std::set<std::string> seen;
    while (!cur_.peek().punct('}')) {
      const Token& at = cur_.peek();
      FieldDef f;
      f.name = ident("field name");
      expect_punct(':');
      const Token& prim = cur_.peek();
      check_lex(prim);
      if (prim.is(Tok::Ident, "integer")) f.type = Primitive::Integer;
      else if (prim.is(Tok::Ident, "text")) f.type = Primitive::Text;
      else if (prim.is(Tok::Ident, "boolean")) f.type = Primitive::Boolean;
      else fail(prim, "expected 'integer', 'text' or 'boolean', found " + detail::describe(prim));
      cur_.next();
      expect_punct(';');
      if (!seen.insert(f.name).second)
        duplicate(pos(at), "field '" + f.name + "' declared twice in '" + def.name + "'");
      def.fields.push_back(std::move(f));
    }
    expect_punct('}');
    return def;
  }

  Endpoint endpoint() {
    Endpoint e;
    e.segments.push_back(ident("port or subcomponent name"));
    while (cur_.accept_punct('.')) e.segments.push_back(ident("port name"));
    return e;
  }

  std::pair<Endpoint, Endpoint> arrow_pair() {
    Endpoint src = endpoint();
    const Token& t = cur_.peek();
    check_lex(t);
    if (t.kind != Tok::Arrow) fail(t, "expected '->', found " + detail::describe(t));
    cur_.next();
    Endpoint tgt = endpoint();
    return {std::move(src), std::move(tgt)};
  }

  Literal literal() {
    const Token& t = cur_.peek();
    check_lex(t);
    switch (t.kind) {
      case Tok::Integer: return cur_.next().integer;
      case Tok::String: return cur_.next().text;
      case Tok::Ident:
        if (t.text == "true") { cur_.next(); return true; }
        if (t.text == "false") { cur_.next(); return false; }
        return Identifier{cur_.next().text};
      default: fail(t, "expected a literal, found " + detail::describe(t));
    }
  }

  BehaviorClause behavior(const Token& kw) {
    BehaviorClause b;
    b.pos = pos(kw);
    b.name = ident("behavior name");
    expect_punct('(');
    if (!cur_.peek().punct(')')) {
      do {
        BehaviorArg arg;
        if (cur_.peek().kind == Tok::Ident && cur_.peek(1).punct('=')) {
          arg.key = cur_.next().text;
          cur_.next();
        }
        arg.value = literal();
        b.args.push_back(std::move(arg));
      } while (cur_.accept_punct(','));
    }
    expect_punct(')');
    expect_punct(';');
    return b;
  }

  ContextDecl context(const Token& kw) {
    ContextDecl ctx;
    ctx.pos = pos(kw);
    ctx.name = ident("context name");
    expect_punct('{');
    while (!cur_.peek().punct('}')) {
      const Token& t = cur_.peek();
      check_lex(t);
      bool open = t.is(Tok::Ident, "open");
      if (!open && !t.is(Tok::Ident, "close"))
        fail(t, "expected 'open' or 'close', found " + detail::describe(t));
      SourcePos at = pos(cur_.next());
      auto [src, tgt] = arrow_pair();
      expect_punct(';');
      (open ? ctx.opening : ctx.closing).push_back(GateRef{std::move(src), std::move(tgt), at});
    }
    expect_punct('}');
    return ctx;
  }

  ComponentTypeDef component() {
    ComponentTypeDef def;
    def.pos = pos(cur_.next());
    def.name = ident("component type name");
    expect_punct('{');
    std::set<std::string> ports, subs, contexts;
    while (!cur_.peek().punct('}')) {
      const Token& t = cur_.peek();
      check_lex(t);
      if (t.kind == Tok::End) fail(t, "expected '}', found end of input");
      if (t.is(Tok::Ident, "port")) {
        PortDecl p;
        p.pos = pos(cur_.next());
        const Token& dir = cur_.peek();
        check_lex(dir);
        if (dir.is(Tok::Ident, "in")) p.direction = Direction::In;
        else if (dir.is(Tok::Ident, "out")) p.direction = Direction::Out;
        else fail(dir, "expected 'in' or 'out', found " + detail::describe(dir));
        cur_.next();
        p.messageType = ident("message type");
        p.name = ident("port name");
        p.replicating = cur_.accept_ident("replicating");
        expect_punct(';');
        if (!ports.insert(p.name).second)
          duplicate(p.pos, "port '" + p.name + "' declared twice in '" + def.name + "'");
        def.ports.push_back(std::move(p));
      } else if (t.is(Tok::Ident, "component") || t.is(Tok::Ident, "replicating")) {
        SubcomponentDecl s;
        s.pos = pos(t);
        s.replicating = cur_.accept_ident("replicating");
        expect_word("component");
        s.typeRef = ident("component type");
        s.name = ident("subcomponent name");
        expect_punct(';');
        if (!subs.insert(s.name).second)
          duplicate(s.pos, "subcomponent '" + s.name + "' declared twice in '" + def.name + "'");
        def.subcomponents.push_back(std::move(s));
      } else if (t.is(Tok::Ident, "connect")) {
        SourcePos at = pos(cur_.next());
        auto [src, tgt] = arrow_pair();
        expect_punct(';');
        def.connectors.push_back(ConnectorDecl{std::move(src), std::move(tgt), at});
      } else if (t.is(Tok::Ident, "context")) {
        const Token& kw = cur_.next();
        ContextDecl ctx = context(kw);
        if (!contexts.insert(ctx.name).second)
          duplicate(ctx.pos, "context '" + ctx.name + "' declared twice in '" + def.name + "'");
        def.contexts.push_back(std::move(ctx));
      } else if (t.is(Tok::Ident, "behavior")) {
        const Token& kw = cur_.next();
        BehaviorClause b = behavior(kw);
        if (def.behavior) duplicate(b.pos, "second behavior clause in '" + def.name + "'");
        else def.behavior = std::move(b);
      } else {
        fail(t, "expected a component member, found " + detail::describe(t));
      }
    }
    expect_punct('}');
    return def;
  }

  std::string origin_;
  TokenCursor cur_;
  Diagnostics duplicates_;
};

}  // namespace

ModelResult parse_model(std::string_view source, std::string_view origin) {
  return ModelParser(source, origin).run();
}

Diagnostics merge_into(ArchitectureModel& into, ArchitectureModel fragment) {
  Diagnostics diags;
  for (auto& m : fragment.messageTypes) {
    if (const auto* prior = into.find_message(m.name)) {
      diags.push_back(make_error(code::Duplicate, m.pos,
                                 "message type '" + m.name + "' already defined at " + prior->pos.origin +
                                     ":" + std::to_string(prior->pos.line)));
      continue;
    }
    into.messageTypes.push_back(std::move(m));
  }
  for (auto& c : fragment.componentTypes) {
    if (const auto* prior = into.find_component(c.name)) {
      diags.push_back(make_error(code::Duplicate, c.pos,
                                 "component type '" + c.name + "' already defined at " + prior->pos.origin +
                                     ":" + std::to_string(prior->pos.line)));
      continue;
    }
    into.componentTypes.push_back(std::move(c));
  }
  return diags;
}

ModelResult load_files(const std::vector<std::filesystem::path>& paths) {
  ArchitectureModel merged;
  Diagnostics diags;
  for (const auto& path : paths) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
      diags.push_back(make_error(code::Io, SourcePos{path.string(), 0, 0}, "cannot read file"));
      continue;
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    ModelResult part = parse_model(buf.str(), path.string());
    if (!part.ok()) {
      diags.insert(diags.end(), part.diagnostics.begin(), part.diagnostics.end());
      continue;
    }
    Diagnostics dups = merge_into(merged, std::move(*part.model));
    diags.insert(diags.end(), dups.begin(), dups.end());
  }
  if (!diags.empty()) return {std::nullopt, std::move(diags)};
  return {std::move(merged), {}};
}

}  // namespace cloudadl
