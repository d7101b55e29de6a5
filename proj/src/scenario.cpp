#include "cloudadl/scenario.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "cloudadl/analyzer.hpp"
#include "cloudadl/errors.hpp"
#include "cloudadl/parser.hpp"
#include "lexer.hpp"
#include "payload_reader.hpp"

namespace cloudadl {

namespace {

struct Word {
  std::string text;
  int column = 1;
};

// Drops a trailing `#` or `//` comment that is not inside a string literal.
std::string_view strip_comment(std::string_view line) {
  bool inString = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (inString) {
      if (c == '\\') ++i;
      else if (c == '"') inString = false;
    } else if (c == '"') {
      inString = true;
    } else if (c == '#' || (c == '/' && i + 1 < line.size() && line[i + 1] == '/')) {
      return line.substr(0, i);
    }
  }
  return line;
}

std::vector<Word> split_words(std::string_view line) {
  std::vector<Word> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    if (i >= line.size()) break;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    out.push_back(Word{std::string(line.substr(i, j - i)), static_cast<int>(i) + 1});
    i = j;
  }
  return out;
}

template <typename T>
std::optional<T> parse_number(std::string_view text) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

// `path` or `path[i]`
std::optional<std::pair<std::string, std::optional<ReplicaId>>> split_replica(std::string_view text) {
  auto open = text.find('[');
  if (open == std::string_view::npos) return std::pair{std::string(text), std::optional<ReplicaId>{}};
  if (text.back() != ']' || open == 0) return std::nullopt;
  auto index = parse_number<std::size_t>(text.substr(open + 1, text.size() - open - 2));
  if (!index) return std::nullopt;
  return std::pair{std::string(text.substr(0, open)), std::optional<ReplicaId>(*index)};
}

// A payload literal whose text is resolved once the model is loaded.
struct PendingPayload {
  std::string text;
  SourcePos pos;
};

struct Draft {
  Scenario s;
  std::optional<SourcePos> rootPos;
  std::vector<PendingPayload> injectPayloads;              // parallel to s.injections
  std::vector<std::vector<PendingPayload>> prefixPayloads;  // parallel to s.expectations
  std::vector<std::optional<ReplicaId>> faultReplicas;     // parallel to s.faults
  std::map<std::string, SourcePos> strategyPos;
};

class ScenarioReader {
 public:
  ScenarioReader(std::string origin) : origin_(std::move(origin)) {}

  Diagnostics read(std::string_view text, Draft& d) {
    std::size_t start = 0;
    int lineNo = 0;
    while (start <= text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      ++lineNo;
      std::string_view raw = text.substr(start, end - start);
      line(strip_comment(raw), lineNo, d);
      if (end == text.size()) break;
      start = end + 1;
    }
    return std::move(diags_);
  }

 private:
  SourcePos at(int line, int column) const { return SourcePos{origin_, line, column}; }

  void error(int line, int column, std::string message) {
    diags_.push_back(make_error(code::Syntax, at(line, column), std::move(message)));
  }

  template <typename T>
  bool number(const std::vector<Word>& w, std::size_t i, int line, T& out, const char* what) {
    if (i >= w.size()) {
      error(line, w.back().column, std::string("expected ") + what);
      return false;
    }
    auto v = parse_number<T>(w[i].text);
    if (!v) {
      error(line, w[i].column, std::string("expected ") + what + ", found '" + w[i].text + "'");
      return false;
    }
    out = *v;
    return true;
  }

  bool keyword(const std::vector<Word>& w, std::size_t i, int line, std::string_view kw) {
    if (i < w.size() && w[i].text == kw) return true;
    error(line, i < w.size() ? w[i].column : w.back().column + static_cast<int>(w.back().text.size()),
          "expected '" + std::string(kw) + "'");
    return false;
  }

  bool count(const std::vector<Word>& w, std::size_t n, int line, const char* usage) {
    if (w.size() == n) return true;
    error(line, w.front().column, std::string("usage: ") + usage);
    return false;
  }

  // Remainder of the line after the first `skip` words.
  static std::pair<std::string, int> rest(std::string_view line, const std::vector<Word>& w, std::size_t skip) {
    if (skip >= w.size()) return {"", static_cast<int>(line.size()) + 1};
    int column = w[skip].column;
    return {std::string(line.substr(static_cast<std::size_t>(column - 1))), column};
  }

  void line(std::string_view text, int n, Draft& d) {
    auto w = split_words(text);
    if (w.empty()) return;
    const std::string& kw = w[0].text;
    Scenario& s = d.s;

    if (kw == "scenario") {
      if (count(w, 2, n, "scenario <name>")) s.name = w[1].text;
    } else if (kw == "model") {
      if (count(w, 2, n, "model <path>")) s.modelFiles.emplace_back(w[1].text);
    } else if (kw == "root") {
      if (count(w, 2, n, "root <Type>")) {
        s.rootType = w[1].text;
        d.rootPos = at(n, w[1].column);
      }
    } else if (kw == "seed") {
      if (count(w, 2, n, "seed <k>")) number(w, 1, n, s.seed, "a seed");
    } else if (kw == "maxsteps") {
      std::int64_t k = 0;
      if (count(w, 2, n, "maxsteps <k>") && number(w, 1, n, k, "a step count")) {
        if (k < 0) error(n, w[1].column, "maxsteps must be >= 0");
        else s.maxSteps = k;
      }
    } else if (kw == "latency") {
      std::uint32_t k = 0;
      if (count(w, 3, n, "latency <channel glob> <k>") && number(w, 2, n, k, "a latency")) {
        if (k < 1) error(n, w[2].column, "latency must be >= 1");
        else s.latencies.push_back(LatencyOverride{w[1].text, k});
      }
    } else if (kw == "scale") {
      ScaleDirective sd;
      if (count(w, 5, n, "scale <group path> <n> at <step>") && number(w, 2, n, sd.target, "a group size") &&
          keyword(w, 3, n, "at") && number(w, 4, n, sd.at, "a step")) {
        if (sd.target < 1) {
          error(n, w[2].column, "scale target must be >= 1");
          return;
        }
        sd.group = w[1].text;
        sd.pos = at(n, w[1].column);
        s.scales.push_back(std::move(sd));
      }
    } else if (kw == "strategy") {
      if (!count(w, 3, n, "strategy <instance path> resume|restart|escalate")) return;
      auto st = parse_strategy(w[2].text);
      if (!st) return error(n, w[2].column, "unknown strategy '" + w[2].text + "'");
      d.strategyPos[w[1].text] = at(n, w[1].column);
      s.strategies[w[1].text] = *st;
    } else if (kw == "inject") {
      Injection inj;
      if (w.size() < 5) return error(n, w[0].column, "usage: inject <root in-port> at <step> <Type{...}>");
      if (!keyword(w, 2, n, "at") || !number(w, 3, n, inj.at, "a step")) return;
      inj.port = w[1].text;
      inj.pos = at(n, w[1].column);
      auto [payload, column] = rest(text, w, 4);
      d.injectPayloads.push_back(PendingPayload{payload, at(n, column)});
      s.injections.push_back(std::move(inj));
    } else if (kw == "fault") {
      FaultDirective f;
      if (!count(w, 5, n, "fault <instance path>[<replica>] at <step> <kind>")) return;
      auto target = split_replica(w[1].text);
      if (!target) return error(n, w[1].column, "malformed instance reference '" + w[1].text + "'");
      if (!keyword(w, 2, n, "at") || !number(w, 3, n, f.at, "a step")) return;
      f.path = target->first;
      f.replica = target->second.value_or(0);
      f.kind = w[4].text;
      f.pos = at(n, w[1].column);
      d.faultReplicas.push_back(target->second);
      s.faults.push_back(std::move(f));
    } else if (kw == "expect") {
      expectation(text, w, n, d);
    } else {
      error(n, w[0].column, "unknown directive '" + kw + "'");
    }
  }

  void expectation(std::string_view text, const std::vector<Word>& w, int n, Draft& d) {
    Expectation e;
    std::string_view body = text.substr(static_cast<std::size_t>(w[0].column - 1));
    while (!body.empty() && (body.back() == ' ' || body.back() == '\t' || body.back() == '\r')) body.remove_suffix(1);
    e.text = std::string(body);
    if (w.size() < 2) return error(n, w[0].column, "expected expectation kind");
    const std::string& kind = w[1].text;
    std::vector<PendingPayload> prefix;
    if (w.size() >= 3) e.pos = at(n, w[2].column);

    if (kind == "count") {
      e.kind = Expectation::Kind::CountIs;
      if (w.size() != 4 && w.size() != 6) return error(n, w[1].column, "usage: expect count <root out-port> <n> [by <step>]");
      e.target = w[2].text;
      if (!number(w, 3, n, e.n, "a count")) return;
      if (w.size() == 6) {
        std::int64_t by = 0;
        if (!keyword(w, 4, n, "by") || !number(w, 5, n, by, "a step")) return;
        e.byStep = by;
      }
    } else if (kind == "prefix") {
      e.kind = Expectation::Kind::SeqPrefix;
      if (w.size() < 3) return error(n, w[1].column, "usage: expect prefix <root out-port> <Type{...}> ...");
      e.target = w[2].text;
      auto [literals, column] = rest(text, w, 3);
      if (!literals.empty()) prefix.push_back(PendingPayload{literals, at(n, column)});
    } else if (kind == "store") {
      e.kind = Expectation::Kind::StoreContains;
      if (!count(w, 4, n, "expect store <instance path> <n>")) return;
      e.target = w[2].text;
      if (!number(w, 3, n, e.n, "a count")) return;
    } else if (kind == "event") {
      e.kind = Expectation::Kind::EventOccurs;
      if (!count(w, 4, n, "expect event <KIND> <subject glob>")) return;
      auto k = parse_event_kind(w[2].text);
      if (!k) return error(n, w[2].column, "unknown event kind '" + w[2].text + "'");
      e.event = *k;
      e.target = w[3].text;
    } else if (kind == "sticky") {
      e.kind = Expectation::Kind::Sticky;
      if (!count(w, 3, n, "expect sticky <group path>")) return;
      e.target = w[2].text;
    } else {
      return error(n, w[1].column, "unknown expectation '" + kind + "'");
    }
    d.s.expectations.push_back(std::move(e));
    d.prefixPayloads.push_back(std::move(prefix));
  }

  std::string origin_;
  Diagnostics diags_;
};

// Reads every payload literal in `p` (a whitespace separated sequence).
std::vector<Payload> read_payloads(const PendingPayload& p, const ArchitectureModel& model, Diagnostics& diags) {
  detail::LexOptions opts;
  opts.firstLine = p.pos.line;
  opts.firstColumn = p.pos.column;
  detail::TokenCursor cur(detail::tokenize(p.text, opts));
  std::vector<Payload> out;
  while (!cur.at_end()) {
    Diagnostic err;
    auto raw = detail::read_raw_payload(cur, false, err, p.pos.origin);
    if (!raw) {
      diags.push_back(std::move(err));
      return {};
    }
    auto problems = detail::check_raw_payload(*raw, model, p.pos.origin);
    if (!problems.empty()) {
      diags.insert(diags.end(), problems.begin(), problems.end());
      return {};
    }
    out.push_back(detail::instantiate(*raw, *model.find_message(raw->type), nullptr));
  }
  return out;
}

Diagnostic unresolved(const SourcePos& pos, std::string message) {
  return make_error(code::Unresolved, pos, std::move(message));
}

}  // namespace

ScenarioResult load_scenario(std::string_view text, std::string_view origin, const std::filesystem::path& baseDir) {
  Draft d;
  Diagnostics diags = ScenarioReader(std::string(origin)).read(text, d);
  if (!diags.empty()) return {std::nullopt, std::move(diags)};
  Scenario& s = d.s;
  SourcePos top{std::string(origin), 1, 1};
  if (s.modelFiles.empty()) diags.push_back(make_error(code::Syntax, top, "scenario names no 'model'"));
  if (s.rootType.empty()) diags.push_back(make_error(code::Syntax, top, "scenario names no 'root'"));
  if (!diags.empty()) return {std::nullopt, std::move(diags)};

  std::vector<std::filesystem::path> files;
  for (const auto& f : s.modelFiles) files.push_back(f.is_absolute() || baseDir.empty() ? f : baseDir / f);
  ModelResult loaded = load_files(files);
  if (!loaded.ok()) return {std::nullopt, std::move(loaded.diagnostics)};
  diags = check(*loaded.model);
  if (!diags.empty()) return {std::nullopt, std::move(diags)};
  if (!loaded.model->find_component(s.rootType))
    return {std::nullopt, {unresolved(*d.rootPos, "unknown component type '" + s.rootType + "'")}};

  auto model = std::make_shared<const ArchitectureModel>(std::move(*loaded.model));
  s.topology = elaborate(*model, s.rootType);
  s.model = model;
  const RuntimeTopology& topo = s.topology;

  // Behaviors must be constructible before anything runs.
  std::set<std::string> seen;
  for (const auto& inst : topo.instances) {
    if (inst.kind != InstanceKind::Atomic || !seen.insert(inst.typeRef).second) continue;
    const ComponentTypeDef& type = *model->find_component(inst.typeRef);
    Interface iface(type, *model);
    BehaviorEnv env{model.get(), std::filesystem::path(type.behavior->pos.origin).parent_path()};
    try {
      BehaviorRegistry::builtins().create(*type.behavior, iface, env);
    } catch (const RuntimeError& err) {
      const char* c = err.code() == RuntimeErrc::UnknownBehavior ? code::UnknownBehavior : code::BadArgument;
      diags.push_back(make_error(c, type.behavior->pos, err.what()));
    }
  }

  auto group_at = [&](const std::string& path, const SourcePos& pos) {
    auto i = topo.find_instance(path);
    if (!i || !topo.instances[*i].replicaGroup) {
      diags.push_back(unresolved(pos, "no replica group '" + path + "'"));
      return false;
    }
    return true;
  };
  auto instance_at = [&](const std::string& path, const SourcePos& pos) {
    if (topo.find_instance(path)) return true;
    diags.push_back(unresolved(pos, "no instance '" + path + "'"));
    return false;
  };
  auto typed = [&](const Payload& p, const std::string& type, const SourcePos& pos, const std::string& port) {
    if (p.type == type) return;
    diags.push_back(make_error(code::TypeMismatch, pos,
                               "port '" + port + "' carries " + type + ", literal is " + p.type));
  };

  for (const auto& sd : s.scales) group_at(sd.group, sd.pos);
  for (const auto& [path, st] : s.strategies) {
    if (!topo.find_instance(path)) diags.push_back(unresolved(d.strategyPos[path], "no instance '" + path + "'"));
  }
  for (std::size_t i = 0; i < s.faults.size(); ++i) {
    const auto& f = s.faults[i];
    if (!instance_at(f.path, f.pos)) continue;
    const auto& inst = topo.instances[*topo.find_instance(f.path)];
    if (d.faultReplicas[i] && !inst.replicaGroup)
      diags.push_back(unresolved(f.pos, "'" + f.path + "' is not a replica group"));
  }
  for (std::size_t i = 0; i < s.injections.size(); ++i) {
    auto& inj = s.injections[i];
    const ExternalPort* port = topo.find_external(inj.port, Direction::In);
    if (!port) {
      diags.push_back(unresolved(inj.pos, "root has no in-port '" + inj.port + "'"));
      continue;
    }
    auto payloads = read_payloads(d.injectPayloads[i], *model, diags);
    if (payloads.empty()) continue;
    if (payloads.size() != 1) {
      diags.push_back(make_error(code::Syntax, d.injectPayloads[i].pos, "expected exactly one payload literal"));
      continue;
    }
    typed(payloads[0], port->messageType, d.injectPayloads[i].pos, inj.port);
    inj.payload = std::move(payloads[0]);
  }
  for (std::size_t i = 0; i < s.expectations.size(); ++i) {
    auto& e = s.expectations[i];
    switch (e.kind) {
      case Expectation::Kind::CountIs:
      case Expectation::Kind::SeqPrefix: {
        const ExternalPort* port = topo.find_external(e.target, Direction::Out);
        if (!port) {
          diags.push_back(unresolved(e.pos, "root has no out-port '" + e.target + "'"));
          break;
        }
        for (const auto& pending : d.prefixPayloads[i]) {
          for (auto& p : read_payloads(pending, *model, diags)) {
            typed(p, port->messageType, pending.pos, e.target);
            e.prefix.push_back(std::move(p));
          }
        }
        break;
      }
      case Expectation::Kind::StoreContains: instance_at(e.target, e.pos); break;
      case Expectation::Kind::Sticky: group_at(e.target, e.pos); break;
      case Expectation::Kind::EventOccurs: break;
    }
  }
  if (!diags.empty()) return {std::nullopt, std::move(diags)};
  return {std::move(s), {}};
}

ScenarioResult load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {std::nullopt, {make_error(code::Io, SourcePos{path.string(), 0, 0}, "cannot read file")}};
  std::ostringstream text;
  text << in.rdbuf();
  return load_scenario(text.str(), path.string(), path.parent_path());
}

LatencyParse parse_latency_file(std::string_view text, std::string_view origin) {
  LatencyParse out;
  int lineNo = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++lineNo;
    auto w = split_words(strip_comment(text.substr(start, end - start)));
    if (!w.empty()) {
      auto k = w.size() == 2 ? parse_number<std::uint32_t>(w[1].text) : std::nullopt;
      if (!k || *k < 1) {
        out.diagnostics.push_back(make_error(code::Syntax, SourcePos{std::string(origin), lineNo, w[0].column},
                                             "expected '<channel glob> <steps>' with steps >= 1"));
      } else {
        out.latencies.push_back(LatencyOverride{w[0].text, *k});
      }
    }
    if (end == text.size()) break;
    start = end + 1;
  }
  return out;
}

}  // namespace cloudadl
