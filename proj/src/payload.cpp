#include "cloudadl/payload.hpp"

#include <set>

#include "payload_reader.hpp"

namespace cloudadl {

Primitive primitive_of(const Value& v) {
  switch (v.index()) {
    case 0: return Primitive::Integer;
    case 1: return Primitive::Text;
    default: return Primitive::Boolean;
  }
}

Value default_value(Primitive p) {
  switch (p) {
    case Primitive::Integer: return std::int64_t{0};
    case Primitive::Text: return std::string{};
    case Primitive::Boolean: return false;
  }
  return std::int64_t{0};
}

std::string render(const Value& v) {
  if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  if (const auto* s = std::get_if<std::string>(&v)) return detail::quote(*s);
  return std::get<bool>(v) ? "true" : "false";
}

const Value* Payload::find(std::string_view field) const {
  for (const auto& [name, value] : fields)
    if (name == field) return &value;
  return nullptr;
}

std::string render(const Payload& p) {
  std::string out = p.type + "{";
  for (std::size_t i = 0; i < p.fields.size(); ++i) {
    if (i) out.push_back(',');
    out += p.fields[i].first + "=" + render(p.fields[i].second);
  }
  out.push_back('}');
  return out;
}

Payload project(const Payload& from, const MessageTypeDef& def) {
  Payload out;
  out.type = def.name;
  for (const auto& f : def.fields) {
    const Value* v = from.find(f.name);
    out.fields.emplace_back(f.name, v && primitive_of(*v) == f.type ? *v : default_value(f.type));
  }
  return out;
}

bool conforms(const Payload& p, const MessageTypeDef& def) {
  if (p.type != def.name || p.fields.size() != def.fields.size()) return false;
  for (std::size_t i = 0; i < def.fields.size(); ++i) {
    if (p.fields[i].first != def.fields[i].name) return false;
    if (primitive_of(p.fields[i].second) != def.fields[i].type) return false;
  }
  return true;
}

PayloadParse parse_payload(std::string_view text, const ArchitectureModel& model, const SourcePos& at) {
  detail::LexOptions opts;
  opts.firstLine = at.line > 0 ? at.line : 1;
  opts.firstColumn = at.column > 0 ? at.column : 1;
  detail::TokenCursor cur(detail::tokenize(text, opts));
  Diagnostic err;
  auto raw = detail::read_raw_payload(cur, false, err, at.origin);
  if (!raw) return {std::nullopt, {err}};
  if (!cur.at_end()) {
    const auto& t = cur.peek();
    return {std::nullopt,
            {make_error(code::Syntax, SourcePos{at.origin, t.line, t.column},
                        "unexpected " + detail::describe(t) + " after payload literal")}};
  }
  Diagnostics diags = detail::check_raw_payload(*raw, model, at.origin);
  if (!diags.empty()) return {std::nullopt, std::move(diags)};
  return {detail::instantiate(*raw, *model.find_message(raw->type), nullptr), {}};
}

namespace detail {

std::optional<RawPayload> read_raw_payload(TokenCursor& cur, bool allowRefs, Diagnostic& error,
                                           const std::string& origin) {
  auto fail = [&](const Token& t, std::string message) -> std::optional<RawPayload> {
    error = make_error(code::Syntax, SourcePos{origin, t.line, t.column}, std::move(message));
    return std::nullopt;
  };
  RawPayload raw;
  raw.at = cur.peek();
  if (raw.at.kind == Tok::Error) return fail(raw.at, raw.at.text);
  if (raw.at.kind != Tok::Ident) return fail(raw.at, "expected message type, found " + describe(raw.at));
  raw.type = cur.next().text;
  if (!cur.accept_punct('{')) return fail(cur.peek(), "expected '{', found " + describe(cur.peek()));
  if (!cur.accept_punct('}')) {
    do {
      const Token& name = cur.peek();
      if (name.kind != Tok::Ident) return fail(name, "expected field name, found " + describe(name));
      std::string field = cur.next().text;
      if (!cur.accept_punct('=')) return fail(cur.peek(), "expected '=', found " + describe(cur.peek()));
      const Token& v = cur.peek();
      RawValue value;
      if (v.kind == Tok::Integer) {
        value = Value{v.integer};
      } else if (v.kind == Tok::String) {
        value = Value{v.text};
      } else if (v.is(Tok::Ident, "true") || v.is(Tok::Ident, "false")) {
        value = Value{v.text == "true"};
      } else if (allowRefs && v.punct('$')) {
        cur.next();
        const Token& ref = cur.peek();
        if (ref.kind != Tok::Ident) return fail(ref, "expected field name after '$'");
        value = FieldRef{ref.text};
      } else {
        return fail(v, "expected a value, found " + describe(v));
      }
      cur.next();
      raw.fields.emplace_back(std::move(field), std::move(value));
    } while (cur.accept_punct(','));
    if (!cur.accept_punct('}')) return fail(cur.peek(), "expected '}', found " + describe(cur.peek()));
  }
  return raw;
}

Diagnostics check_raw_payload(const RawPayload& raw, const ArchitectureModel& model,
                              const std::string& origin, const MessageTypeDef* refSource) {
  Diagnostics diags;
  SourcePos at{origin, raw.at.line, raw.at.column};
  const MessageTypeDef* def = model.find_message(raw.type);
  if (!def) {
    diags.push_back(make_error(code::Unresolved, at, "unknown message type '" + raw.type + "'"));
    return diags;
  }
  std::set<std::string> seen;
  for (const auto& [field, value] : raw.fields) {
    const FieldDef* f = def->find_field(field);
    if (!f) {
      diags.push_back(make_error(code::TypeMismatch, at, "'" + raw.type + "' has no field '" + field + "'"));
      continue;
    }
    if (!seen.insert(field).second) {
      diags.push_back(make_error(code::TypeMismatch, at, "field '" + field + "' given twice"));
      continue;
    }
    if (const auto* v = std::get_if<Value>(&value)) {
      if (primitive_of(*v) != f->type)
        diags.push_back(make_error(code::TypeMismatch, at,
                                   "field '" + field + "' expects " + to_string(f->type)));
    } else {
      const auto& ref = std::get<FieldRef>(value);
      if (refSource) {
        const FieldDef* src = refSource->find_field(ref.field);
        if (!src)
          diags.push_back(make_error(code::Unresolved, at,
                                     "input type '" + refSource->name + "' has no field '" + ref.field + "'"));
        else if (src->type != f->type)
          diags.push_back(make_error(code::TypeMismatch, at,
                                     "'$" + ref.field + "' is not " + std::string(to_string(f->type))));
      }
    }
  }
  for (const auto& f : def->fields)
    if (!seen.count(f.name))
      diags.push_back(make_error(code::TypeMismatch, at, "missing field '" + f.name + "' of '" + raw.type + "'"));
  return diags;
}

Payload instantiate(const RawPayload& raw, const MessageTypeDef& def, const Payload* input) {
  Payload out;
  out.type = def.name;
  for (const auto& f : def.fields) {
    Value v = default_value(f.type);
    for (const auto& [name, rv] : raw.fields) {
      if (name != f.name) continue;
      if (const auto* lit = std::get_if<Value>(&rv)) {
        v = *lit;
      } else if (input) {
        if (const Value* src = input->find(std::get<FieldRef>(rv).field)) v = *src;
      }
    }
    out.fields.emplace_back(f.name, std::move(v));
  }
  return out;
}

}  // namespace detail
}  // namespace cloudadl
