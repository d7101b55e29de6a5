#include "cloudadl/ast.hpp"

namespace cloudadl {

const char* to_string(Primitive p) {
  switch (p) {
    case Primitive::Integer: return "integer";
    case Primitive::Text: return "text";
    case Primitive::Boolean: return "boolean";
  }
  return "?";
}

const FieldDef* MessageTypeDef::find_field(std::string_view field) const {
  for (const auto& f : fields)
    if (f.name == field) return &f;
  return nullptr;
}

std::string Endpoint::str() const {
  std::string out;
  for (std::size_t i = 0; i < segments.size(); ++i) {
    if (i) out.push_back('.');
    out += segments[i];
  }
  return out;
}

const Literal* BehaviorClause::find(std::string_view key) const {
  for (const auto& a : args)
    if (a.key == key) return &a.value;
  return nullptr;
}

std::vector<const Literal*> BehaviorClause::find_all(std::string_view key) const {
  std::vector<const Literal*> out;
  for (const auto& a : args)
    if (a.key == key) out.push_back(&a.value);
  return out;
}

const PortDecl* ComponentTypeDef::find_port(std::string_view port) const {
  for (const auto& p : ports)
    if (p.name == port) return &p;
  return nullptr;
}

const SubcomponentDecl* ComponentTypeDef::find_subcomponent(std::string_view sub) const {
  for (const auto& s : subcomponents)
    if (s.name == sub) return &s;
  return nullptr;
}

const MessageTypeDef* ArchitectureModel::find_message(std::string_view name) const {
  for (const auto& m : messageTypes)
    if (m.name == name) return &m;
  return nullptr;
}

const ComponentTypeDef* ArchitectureModel::find_component(std::string_view name) const {
  for (const auto& c : componentTypes)
    if (c.name == name) return &c;
  return nullptr;
}

ArchitectureModel strip_positions(ArchitectureModel model) {
  for (auto& m : model.messageTypes) m.pos = {};
  for (auto& c : model.componentTypes) {
    c.pos = {};
    for (auto& p : c.ports) p.pos = {};
    for (auto& s : c.subcomponents) s.pos = {};
    for (auto& k : c.connectors) k.pos = {};
    for (auto& ctx : c.contexts) {
      ctx.pos = {};
      for (auto& g : ctx.opening) g.pos = {};
      for (auto& g : ctx.closing) g.pos = {};
    }
    if (c.behavior) c.behavior->pos = {};
  }
  return model;
}

bool structurally_equal(const ArchitectureModel& a, const ArchitectureModel& b) {
  return strip_positions(a) == strip_positions(b);
}

}  // namespace cloudadl
