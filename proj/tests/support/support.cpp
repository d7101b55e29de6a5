#include "support.hpp"

#include <sys/wait.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace cloudadl::testing {

std::filesystem::path models_dir() { return CLOUDADL_MODELS_DIR; }
std::filesystem::path cli_path() { return CLOUDADL_CLI_PATH; }

std::string quote_arg(const std::filesystem::path& p) {
  std::string out = "'";
  for (char c : p.string()) {
    if (c == '\'') out += "'\\''";
    else out.push_back(c);
  }
  return out + "'";
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

CliOutcome run_cli(const std::string& args, const std::filesystem::path& scratch) {
  std::filesystem::path out = scratch / "cli.stdout";
  std::filesystem::path err = scratch / "cli.stderr";
  std::string cmd = quote_arg(cli_path()) + " " + args + " >" + quote_arg(out) + " 2>" + quote_arg(err);
  int raw = std::system(cmd.c_str());
  CliOutcome o;
  o.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  o.out = slurp(out);
  o.err = slurp(err);
  return o;
}

std::string codes(const Diagnostics& diags) {
  std::string out;
  for (const auto& d : diags) {
    if (!out.empty()) out += ' ';
    out += d.code;
  }
  return out;
}

namespace {

std::string listing(const Diagnostics& diags) {
  std::string out;
  for (const auto& d : diags) out += format(d) + "\n";
  return out;
}

}  // namespace

std::shared_ptr<const ArchitectureModel> model_from(std::string_view text, std::string_view origin) {
  ModelResult r = parse_model(text, origin);
  if (!r.ok()) throw std::runtime_error(listing(r.diagnostics));
  Diagnostics d = check(*r.model);
  if (!d.empty()) throw std::runtime_error(listing(d));
  return std::make_shared<const ArchitectureModel>(std::move(*r.model));
}

Scenario scenario_from(std::string_view arcText, std::string_view rootType) {
  Scenario s;
  s.name = "generated";
  s.rootType = std::string(rootType);
  s.model = model_from(arcText);
  s.topology = elaborate(*s.model, rootType);
  return s;
}

Scenario bundled(std::string_view scnFile) {
  ScenarioResult r = load_scenario_file(models_dir() / scnFile);
  if (!r.ok()) throw std::runtime_error(listing(r.diagnostics));
  return std::move(*r.scenario);
}

Payload payload(const ArchitectureModel& model, std::string_view literal) {
  PayloadParse p = parse_payload(literal, model, SourcePos{"literal", 1, 1});
  if (!p.payload) throw std::runtime_error(listing(p.diagnostics));
  return *p.payload;
}

std::vector<std::size_t> channels_into_groups(const RuntimeTopology& topo) {
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < topo.channels.size(); ++c) {
    const auto& to = topo.channels[c].to;
    if (!to.external && topo.instances[to.instance].replicaGroup) out.push_back(c);
  }
  return out;
}

std::optional<std::string> fifo_violation(const EventLog& log) {
  std::map<std::size_t, std::vector<std::uint64_t>> sent;
  std::map<std::size_t, std::vector<std::uint64_t>> delivered;
  for (const auto& e : log) {
    if (!e.channel) continue;
    if (e.kind == EventKind::Send) sent[*e.channel].push_back(e.seq);
    if (e.kind == EventKind::Deliver) delivered[*e.channel].push_back(e.seq);
  }
  for (const auto& [channel, seqs] : delivered) {
    const auto& s = sent[channel];
    if (seqs.size() > s.size() || !std::equal(seqs.begin(), seqs.end(), s.begin()))
      return "channel " + std::to_string(channel) + " delivered out of send order";
  }
  return std::nullopt;
}

namespace {

int uniform(std::mt19937_64& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
bool chance(std::mt19937_64& rng, double p) { return std::bernoulli_distribution(p)(rng); }

const std::vector<std::string> kWords = {"message", "component", "port",    "in",      "out",
                                         "connect", "context",   "open",    "close",   "behavior",
                                         "replicating", "integer", "text", "boolean"};

std::string random_name(std::mt19937_64& rng, std::set<std::string>& taken, bool capital) {
  static const std::string alpha = "abcdefghijklmnopqrstuvwxyz";
  static const std::string tail = "abcdefghijklmnopqrstuvwxyz0123456789_ABCXYZ";
  for (;;) {
    std::string name;
    if (chance(rng, 0.08)) {
      name = kWords[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(kWords.size()) - 1))];
    } else {
      name.push_back(alpha[static_cast<std::size_t>(uniform(rng, 0, 25))]);
      if (capital) name[0] = static_cast<char>(name[0] - 'a' + 'A');
      int len = uniform(rng, 0, 7);
      for (int i = 0; i < len; ++i) name.push_back(tail[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(tail.size()) - 1))]);
    }
    if (name == "true" || name == "false") continue;
    if (taken.insert(name).second) return name;
  }
}

std::string pick(std::mt19937_64& rng, const std::vector<std::string>& from) {
  return from[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(from.size()) - 1))];
}

Literal random_literal(std::mt19937_64& rng) {
  switch (uniform(rng, 0, 3)) {
    case 0: return static_cast<std::int64_t>(uniform(rng, -1000000, 1000000));
    case 1: {
      static const std::string chars = "ab c\"\\\n\t#/=,;{}x-> 1";
      std::string s;
      int len = uniform(rng, 0, 10);
      for (int i = 0; i < len; ++i) s.push_back(chars[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(chars.size()) - 1))]);
      return s;
    }
    case 2: return chance(rng, 0.5);
    default: {
      std::set<std::string> scratch;
      return Identifier{random_name(rng, scratch, false)};
    }
  }
}

Endpoint random_endpoint(std::mt19937_64& rng, const std::vector<std::string>& ports,
                         const std::vector<std::string>& subs) {
  Endpoint e;
  std::set<std::string> scratch;
  int shape = uniform(rng, 0, 9);
  if (shape < 4 || subs.empty()) {
    e.segments.push_back(ports.empty() ? random_name(rng, scratch, false) : pick(rng, ports));
  } else {
    e.segments.push_back(pick(rng, subs));
    e.segments.push_back(random_name(rng, scratch, false));
    if (shape == 9) e.segments.push_back(random_name(rng, scratch, false));
  }
  return e;
}

}  // namespace

ArchitectureModel random_ast(std::mt19937_64& rng) {
  ArchitectureModel m;
  std::set<std::string> messageNames;
  std::set<std::string> componentNames;
  std::vector<std::string> typeNames;
  int messages = uniform(rng, 0, 3);
  for (int i = 0; i < messages; ++i) {
    MessageTypeDef def;
    def.name = random_name(rng, messageNames, true);
    std::set<std::string> fieldNames;
    int fields = uniform(rng, 0, 4);
    for (int f = 0; f < fields; ++f)
      def.fields.push_back(FieldDef{random_name(rng, fieldNames, false), static_cast<Primitive>(uniform(rng, 0, 2))});
    typeNames.push_back(def.name);
    m.messageTypes.push_back(std::move(def));
  }
  if (typeNames.empty()) typeNames.push_back("Missing");

  int components = uniform(rng, 1, 4);
  for (int i = 0; i < components; ++i) {
    ComponentTypeDef c;
    c.name = random_name(rng, componentNames, true);
    std::set<std::string> portNames;
    std::vector<std::string> ports;
    int portCount = uniform(rng, 0, 4);
    for (int p = 0; p < portCount; ++p) {
      PortDecl port;
      port.name = random_name(rng, portNames, false);
      port.direction = chance(rng, 0.5) ? Direction::In : Direction::Out;
      port.messageType = pick(rng, typeNames);
      port.replicating = chance(rng, 0.2);
      ports.push_back(port.name);
      c.ports.push_back(std::move(port));
    }
    std::set<std::string> subNames;
    std::vector<std::string> subs;
    int subCount = uniform(rng, 0, 3);
    for (int s = 0; s < subCount; ++s) {
      SubcomponentDecl sub;
      sub.name = random_name(rng, subNames, false);
      std::set<std::string> scratch;
      sub.typeRef = random_name(rng, scratch, true);
      sub.replicating = chance(rng, 0.3);
      subs.push_back(sub.name);
      c.subcomponents.push_back(std::move(sub));
    }
    int connectorCount = uniform(rng, 0, 4);
    for (int k = 0; k < connectorCount; ++k) {
      ConnectorDecl con;
      con.source = random_endpoint(rng, ports, subs);
      con.target = random_endpoint(rng, ports, subs);
      c.connectors.push_back(std::move(con));
    }
    std::set<std::string> contextNames;
    int contextCount = uniform(rng, 0, 2);
    for (int k = 0; k < contextCount; ++k) {
      ContextDecl ctx;
      ctx.name = random_name(rng, contextNames, false);
      for (int g = uniform(rng, 0, 2); g > 0; --g)
        ctx.opening.push_back(GateRef{random_endpoint(rng, ports, subs), random_endpoint(rng, ports, subs), {}});
      for (int g = uniform(rng, 0, 2); g > 0; --g)
        ctx.closing.push_back(GateRef{random_endpoint(rng, ports, subs), random_endpoint(rng, ports, subs), {}});
      c.contexts.push_back(std::move(ctx));
    }
    if (chance(rng, 0.6)) {
      BehaviorClause b;
      std::set<std::string> scratch;
      b.name = random_name(rng, scratch, false);
      std::set<std::string> keys;
      for (int a = uniform(rng, 0, 4); a > 0; --a) {
        BehaviorArg arg;
        if (chance(rng, 0.6)) arg.key = random_name(rng, keys, false);
        arg.value = random_literal(rng);
        b.args.push_back(std::move(arg));
      }
      c.behavior = std::move(b);
    }
    m.componentTypes.push_back(std::move(c));
  }
  return m;
}

namespace {

struct LeafSpec {
  std::string type;
  std::string behavior;
};

std::string leaf_behavior(std::mt19937_64& rng, bool withFaults) {
  switch (uniform(rng, 0, withFaults ? 8 : 7)) {
    case 0: return "forward()";
    case 1: return "forward(out=x)";
    case 2: return "delay(k=" + std::to_string(uniform(rng, 1, 3)) + ", out=x)";
    case 3: return "collect(n=" + std::to_string(uniform(rng, 1, 3)) + ", out=y)";
    case 4: return "store(out=x)";
    case 5: return "broadcast(out=x)";
    case 6: return "pick(index=0, out=x)";
    case 7: return "automaton(initial=even, rule=\"even, a, _ -> odd, emit x *\", "
                   "rule=\"odd, a, _ -> even, emit y *; emit x *\", rule=\"even, b, k >= 0 -> even, emit y *\", "
                   "rule=\"odd, b, _ -> odd\", rule=\"even, b, k < 0 -> even\")";
    default: return "fault_at(step=" + std::to_string(uniform(rng, 2, 30)) + ", kind=boom, out=x)";
  }
}

void leaf_type(std::ostringstream& out, const std::string& name, const std::string& behavior) {
  out << "component " << name << " {\n  port in M a;\n  port in M b;\n  port out M x replicating;\n"
      << "  port out M y;\n  behavior " << behavior << ";\n}\n\n";
}

}  // namespace

GeneratedSystem random_system(std::mt19937_64& rng, bool withFaults) {
  std::ostringstream arc;
  arc << "message M {\n  k: integer;\n  tag: text;\n}\n\n";

  int nodes = uniform(rng, 2, 6);
  std::vector<std::string> names;
  std::ostringstream root;
  root << "component Sys {\n  port in M p0;\n  port in M p1;\n  port out M q0;\n  port out M q1;\n";
  for (int i = 0; i < nodes; ++i) {
    std::string inst = "n" + std::to_string(i);
    names.push_back(inst);
    if (chance(rng, 0.25)) {
      std::string box = "Box" + std::to_string(i);
      int inner = uniform(rng, 1, 2);
      std::ostringstream b;
      b << "component " << box << " {\n  port in M a;\n  port in M b;\n  port out M x;\n  port out M y;\n";
      for (int j = 0; j < inner; ++j) {
        std::string leaf = box + "L" + std::to_string(j);
        leaf_type(arc, leaf, leaf_behavior(rng, withFaults));
        b << "  " << (chance(rng, 0.4) ? "replicating " : "") << "component " << leaf << " l" << j << ";\n";
      }
      std::string last = "l" + std::to_string(inner - 1);
      b << "  connect a -> l0.a;\n  connect b -> l0.b;\n";
      if (inner == 2) b << "  connect l0.x -> l1.a;\n  connect l0.y -> l1.b;\n";
      b << "  connect " << last << ".x -> x;\n  connect " << last << ".y -> y;\n";
      if (chance(rng, 0.6)) b << "  context job {\n    open a -> l0.a;\n    close " << last << ".x -> x;\n  }\n";
      b << "}\n\n";
      arc << b.str();
      root << "  component " << box << " " << inst << ";\n";
    } else {
      std::string leaf = "Leaf" + std::to_string(i);
      leaf_type(arc, leaf, leaf_behavior(rng, withFaults));
      root << "  " << (chance(rng, 0.45) ? "replicating " : "") << "component " << leaf << " " << inst << ";\n";
    }
  }

  std::set<std::pair<std::string, std::string>> links;
  std::vector<std::pair<std::string, std::string>> ordered;
  auto link = [&](std::string from, std::string to) {
    if (links.insert({from, to}).second) ordered.emplace_back(std::move(from), std::move(to));
  };
  link("p0", "n0.a");
  link("p1", names[static_cast<std::size_t>(uniform(rng, 0, nodes - 1))] + (chance(rng, 0.5) ? ".a" : ".b"));
  for (int i = 0; i < nodes; ++i) {
    for (const char* out : {"x", "y"}) {
      int fan = chance(rng, 0.3) ? 2 : 1;
      for (int f = 0; f < fan; ++f) {
        std::string from = names[static_cast<std::size_t>(i)] + "." + out;
        if (i + 1 < nodes && chance(rng, 0.7)) {
          int j = uniform(rng, i + 1, nodes - 1);
          link(from, names[static_cast<std::size_t>(j)] + (chance(rng, 0.6) ? ".a" : ".b"));
        } else {
          link(from, chance(rng, 0.5) ? "q0" : "q1");
        }
      }
    }
  }
  for (const auto& [from, to] : ordered) root << "  connect " << from << " -> " << to << ";\n";
  if (chance(rng, 0.5) && ordered.size() >= 2) {
    const auto& open = ordered[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(ordered.size()) - 1))];
    const auto& close = ordered[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(ordered.size()) - 1))];
    root << "  context session {\n    open " << open.first << " -> " << open.second << ";\n";
    if (close != open) root << "    close " << close.first << " -> " << close.second << ";\n";
    root << "  }\n";
  }
  root << "}\n";
  arc << root.str();

  GeneratedSystem g;
  g.arc = arc.str();
  g.scenario = scenario_from(g.arc, "Sys");
  Scenario& s = g.scenario;
  s.seed = std::uniform_int_distribution<std::uint64_t>()(rng);
  s.maxSteps = 400;

  const RuntimeTopology& topo = s.topology;
  if (chance(rng, 0.5)) s.latencies.push_back({"*", static_cast<std::uint32_t>(uniform(rng, 1, 3))});
  for (int i = uniform(rng, 0, 3); i > 0 && !topo.channels.empty(); --i) {
    const auto& ch = topo.channels[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(topo.channels.size()) - 1))];
    s.latencies.push_back({ch.id, static_cast<std::uint32_t>(uniform(rng, 1, 6))});
  }
  std::vector<std::string> groups;
  std::vector<std::string> atomics;
  for (const auto& inst : topo.instances) {
    if (inst.replicaGroup) groups.push_back(inst.path);
    if (inst.kind == InstanceKind::Atomic) atomics.push_back(inst.path);
  }
  for (const auto& grp : groups) {
    for (int i = uniform(rng, 0, 2); i > 0; --i)
      s.scales.push_back({grp, static_cast<std::size_t>(uniform(rng, 1, 5)), uniform(rng, 0, 40), {}});
  }
  int injections = uniform(rng, 5, 40);
  for (int i = 0; i < injections; ++i) {
    Injection inj;
    inj.port = chance(rng, 0.7) ? "p0" : "p1";
    inj.at = uniform(rng, 0, 40);
    inj.payload = Payload{"M", {{"k", static_cast<std::int64_t>(i - 3)}, {"tag", std::string("t") + std::to_string(i)}}};
    s.injections.push_back(std::move(inj));
  }
  if (withFaults) {
    s.strategies["root"] = ErrorStrategy::Restart;
    for (int i = uniform(rng, 0, 3); i > 0; --i)
      s.faults.push_back({pick(rng, atomics), 0, uniform(rng, 0, 40), "injected", {}});
    for (const auto& path : atomics) {
      int r = uniform(rng, 0, 2);
      s.strategies[path] = r == 0 ? ErrorStrategy::Resume : r == 1 ? ErrorStrategy::Restart : ErrorStrategy::Escalate;
    }
  }
  return g;
}

const std::vector<BadModel>& bad_model_corpus() {
  static const std::string base =
      "message A { v: integer; }\n"
      "message B { v: integer; }\n"
      "component Leaf { port in A i; port out A o; behavior forward(); }\n";
  static const std::vector<BadModel> corpus = {
      {"unresolved reference", base + "component T { port in Nope i; component Leaf l; }\n", "E_UNRESOLVED"},
      {"type mismatch", base + "component T { port in B i; component Leaf l; connect i -> l.i; }\n",
       "E_TYPE_MISMATCH"},
      {"direction", base + "component T { port out A o; component Leaf l; connect o -> l.i; }\n", "E_DIRECTION"},
      {"encapsulation",
       base + "component Mid { port in A i; component Leaf l; connect i -> l.i; }\n"
              "component T { port in A i; component Mid m; connect i -> m.l.i; }\n",
       "E_ENCAPSULATION"},
      {"duplicate connector",
       base + "component T { port in A i; component Leaf l; connect i -> l.i; connect i -> l.i; }\n",
       "E_DUP_CONNECT"},
      {"behavior clause", base + "component T { port in A i; }\n", "E_BEHAVIOR"},
      {"gate reference",
       base + "component T { port in A i; component Leaf l; connect i -> l.i; context c { open i -> l.o; } }\n",
       "E_GATE_REF"},
      {"recursion", base + "component T { component U u; }\ncomponent U { component T t; }\n", "E_RECURSION"},
      {"replicating in-port", base + "component T { port in A i replicating; behavior sink(); }\n",
       "E_REPL_PORT"},
      {"replicating decomposed",
       base + "component Mid { port in A i; component Leaf l; connect i -> l.i; }\n"
              "component T { port in A i; replicating component Mid m; connect i -> m.i; }\n",
       "E_REPL_DECOMPOSED"},
  };
  return corpus;
}

}  // namespace cloudadl::testing
