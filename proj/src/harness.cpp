#include "cloudadl/harness.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <fstream>
#include <tuple>

#include "cloudadl/errors.hpp"

namespace cloudadl {

namespace {

struct Scheduled {
  std::int64_t at;
  int kind;  // 0 scale, 1 inject, 2 fault
  std::size_t index;

  auto operator<=>(const Scheduled&) const = default;
};

// "root/a[2]" or "root/a[2].port" -> ("root/a", 2)
std::optional<std::pair<std::string, std::size_t>> replica_subject(std::string_view subject) {
  auto open = subject.find('[');
  auto close = subject.find(']', open);
  if (open == std::string_view::npos || close == std::string_view::npos) return std::nullopt;
  std::size_t id = 0;
  for (char c : subject.substr(open + 1, close - open - 1)) {
    if (c < '0' || c > '9') return std::nullopt;
    id = id * 10 + static_cast<std::size_t>(c - '0');
  }
  return std::pair{std::string(subject.substr(0, open)), id};
}

std::optional<std::string> check_sticky(const std::string& group, const EventLog& log) {
  std::map<ContextToken, std::size_t> bound;
  for (const auto& e : log) {
    if (e.kind != EventKind::Bind && e.kind != EventKind::Deliver) continue;
    auto who = replica_subject(e.subject);
    if (!who || who->first != group) continue;
    if (e.kind == EventKind::Bind) {
      for (const auto& t : e.tokens) bound[t] = who->second;
      continue;
    }
    for (const auto& t : e.tokens) {
      auto it = bound.find(t);
      if (it == bound.end()) continue;
      if (it->second != who->second)
        return "seq " + std::to_string(e.seq) + " carrying " + render(t) + " went to replica " +
               std::to_string(who->second) + ", bound to " + std::to_string(it->second);
    }
  }
  return std::nullopt;
}

}  // namespace

std::vector<std::string> root_stream(const EventLog& log, std::string_view port) {
  std::vector<std::string> out;
  for (const auto& e : log)
    if (e.kind == EventKind::Deliver && e.external && e.port == port) out.push_back(e.payload);
  return out;
}

std::vector<std::uint64_t> channel_stream(const EventLog& log, std::size_t channel) {
  std::vector<std::uint64_t> out;
  for (const auto& e : log)
    if (e.kind == EventKind::Deliver && e.channel == channel) out.push_back(e.seq);
  return out;
}

std::optional<std::string> evaluate(const Expectation& e, const EventLog& log,
                                    const std::map<std::string, std::vector<Payload>>& tables) {
  switch (e.kind) {
    case Expectation::Kind::CountIs: {
      std::size_t n = 0;
      for (const auto& ev : log)
        if (ev.kind == EventKind::Deliver && ev.external && ev.port == e.target && (!e.byStep || ev.step <= *e.byStep))
          ++n;
      if (n == e.n) return std::nullopt;
      return "observed " + std::to_string(n);
    }
    case Expectation::Kind::SeqPrefix: {
      auto stream = root_stream(log, e.target);
      for (std::size_t i = 0; i < e.prefix.size(); ++i) {
        if (i >= stream.size()) return "stream ended after " + std::to_string(stream.size()) + " payloads";
        std::string want = render(e.prefix[i]);
        if (stream[i] != want) return "payload " + std::to_string(i) + " was " + stream[i];
      }
      return std::nullopt;
    }
    case Expectation::Kind::StoreContains: {
      auto it = tables.find(e.target);
      std::size_t n = it == tables.end() ? 0 : it->second.size();
      if (n == e.n) return std::nullopt;
      return "store holds " + std::to_string(n);
    }
    case Expectation::Kind::EventOccurs:
      for (const auto& ev : log)
        if (ev.kind == e.event && fnmatch(e.target.c_str(), ev.subject.c_str(), 0) == 0) return std::nullopt;
      return "no matching event";
    case Expectation::Kind::Sticky: return check_sticky(e.target, log);
  }
  return std::nullopt;
}

RunResult run_scenario(const Scenario& s, const RunOptions& options) {
  KernelConfig config;
  config.seed = options.seed.value_or(s.seed);
  config.latencies = s.latencies;
  config.latencies.insert(config.latencies.end(), options.latencies.begin(), options.latencies.end());
  config.strategies = s.strategies;
  config.registry = options.registry;
  Kernel kernel(s.model, s.topology, config);
  std::int64_t maxSteps = options.maxSteps.value_or(s.maxSteps);

  std::vector<Scheduled> plan;
  for (std::size_t i = 0; i < s.scales.size(); ++i) plan.push_back({s.scales[i].at, 0, i});
  for (std::size_t i = 0; i < s.injections.size(); ++i) plan.push_back({s.injections[i].at, 1, i});
  for (std::size_t i = 0; i < s.faults.size(); ++i) plan.push_back({s.faults[i].at, 2, i});
  std::sort(plan.begin(), plan.end());

  std::optional<std::string> directiveError;
  std::size_t next = 0;
  while (!kernel.halted() && kernel.current_step() < maxSteps) {
    std::int64_t now = kernel.current_step();
    for (; next < plan.size() && plan[next].at <= now && !kernel.halted(); ++next) {
      const Scheduled& d = plan[next];
      if (d.kind == 0) {
        kernel.scale(s.scales[d.index].group, s.scales[d.index].target);
      } else if (d.kind == 1) {
        kernel.inject(s.injections[d.index].port, s.injections[d.index].payload);
      } else {
        const FaultDirective& f = s.faults[d.index];
        auto ref = kernel.find(f.path, f.replica);
        if (ref) kernel.fault(*ref, f.kind);
        else if (!directiveError)
          directiveError = "fault target " + f.path + "[" + std::to_string(f.replica) + "] is not live at step " +
                           std::to_string(now);
      }
    }
    if (kernel.halted() || (next == plan.size() && kernel.quiescent())) break;
    kernel.step();
  }

  RunResult result;
  result.log = kernel.log();
  result.tables = kernel.store_tables();
  result.steps = kernel.current_step();

  if (kernel.halted()) {
    result.verdict.status = Verdict::Status::Fatal;
    auto fatal = std::find_if(result.log.rbegin(), result.log.rend(),
                              [](const Event& e) { return e.kind == EventKind::Fatal; });
    result.verdict.message = fatal != result.log.rend() ? render(*fatal) : "halted";
    return result;
  }
  if (directiveError) {
    result.verdict = {Verdict::Status::Fail, *directiveError};
    return result;
  }
  for (const auto& e : s.expectations) {
    if (auto problem = evaluate(e, result.log, result.tables)) {
      result.verdict = {Verdict::Status::Fail, e.text + ": " + *problem};
      return result;
    }
  }
  return result;
}

std::vector<std::filesystem::path> write_results(const std::filesystem::path& dir,
                                                 const std::map<std::string, std::vector<Payload>>& tables) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> written;
  for (const auto& [path, rows] : tables) {
    std::string name = path;
    std::replace(name.begin(), name.end(), '/', '_');
    auto file = dir / (name + ".rows");
    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + file.string());
    for (const auto& p : rows) out << render(p) << '\n';
    written.push_back(file);
  }
  return written;
}

}  // namespace cloudadl
