#include <sstream>

#include "cloudadl/parser.hpp"
#include "lexer.hpp"

namespace cloudadl {

namespace {

struct LiteralPrinter {
  std::ostream& os;
  void operator()(std::int64_t v) const { os << v; }
  void operator()(const std::string& v) const { os << detail::quote(v); }
  void operator()(bool v) const { os << (v ? "true" : "false"); }
  void operator()(const Identifier& v) const { os << v.name; }
};

void print_component(std::ostream& os, const ComponentTypeDef& c) {
  os << "component " << c.name << " {\n";
  for (const auto& p : c.ports) {
    os << "  port " << (p.direction == Direction::In ? "in " : "out ") << p.messageType << ' ' << p.name;
    if (p.replicating) os << " replicating";
    os << ";\n";
  }
  for (const auto& s : c.subcomponents) {
    os << "  " << (s.replicating ? "replicating " : "") << "component " << s.typeRef << ' ' << s.name << ";\n";
  }
  for (const auto& k : c.connectors) os << "  connect " << k.str() << ";\n";
  for (const auto& ctx : c.contexts) {
    os << "  context " << ctx.name << " {\n";
    for (const auto& g : ctx.opening) os << "    open " << g.source.str() << " -> " << g.target.str() << ";\n";
    for (const auto& g : ctx.closing) os << "    close " << g.source.str() << " -> " << g.target.str() << ";\n";
    os << "  }\n";
  }
  if (c.behavior) {
    os << "  behavior " << c.behavior->name << '(';
    for (std::size_t i = 0; i < c.behavior->args.size(); ++i) {
      const auto& a = c.behavior->args[i];
      if (i) os << ", ";
      if (!a.key.empty()) os << a.key << '=';
      std::visit(LiteralPrinter{os}, a.value);
    }
    os << ");\n";
  }
  os << "}\n";
}

}  // namespace

std::string pretty_print(const ArchitectureModel& model) {
  std::ostringstream os;
  bool first = true;
  for (const auto& m : model.messageTypes) {
    if (!first) os << '\n';
    first = false;
    os << "message " << m.name << " {\n";
    for (const auto& f : m.fields) os << "  " << f.name << ": " << to_string(f.type) << ";\n";
    os << "}\n";
  }
  for (const auto& c : model.componentTypes) {
    if (!first) os << '\n';
    first = false;
    print_component(os, c);
  }
  return os.str();
}

}  // namespace cloudadl
