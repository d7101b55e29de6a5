#pragma once

// Line-oriented scenario files:
//
//   scenario <name>
//   model <path>                      relative to the scenario file, repeatable
//   root <Type>
//   seed <k>
//   maxsteps <k>
//   latency <channel glob> <k>
//   scale <group path> <n> at <step>
//   strategy <instance path> resume|restart|escalate
//   inject <root in-port> at <step> <Type{f=v,...}>
//   fault <instance path>[<replica>] at <step> <kind>
//   expect count <root out-port> <n> [by <step>]
//   expect prefix <root out-port> <Type{...}> <Type{...}> ...
//   expect store <instance path> <n>
//   expect event <KIND> <subject glob>
//   expect sticky <group path>
//
// `#` and `//` start comments.

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cloudadl/ast.hpp"
#include "cloudadl/diagnostic.hpp"
#include "cloudadl/kernel.hpp"
#include "cloudadl/payload.hpp"
#include "cloudadl/topology.hpp"
#include "cloudadl/trace.hpp"

namespace cloudadl {

struct ScaleDirective {
  std::string group;
  std::size_t target = 1;
  std::int64_t at = 0;
  SourcePos pos;
};

struct Injection {
  std::string port;
  std::int64_t at = 0;
  Payload payload;
  SourcePos pos;
};

struct FaultDirective {
  std::string path;
  ReplicaId replica = 0;
  std::int64_t at = 0;
  std::string kind;
  SourcePos pos;
};

struct Expectation {
  enum class Kind { CountIs, SeqPrefix, StoreContains, EventOccurs, Sticky };
  Kind kind = Kind::CountIs;
  std::string target;  // port, instance path, or subject glob
  std::size_t n = 0;
  std::optional<std::int64_t> byStep;
  std::vector<Payload> prefix;
  EventKind event = EventKind::Send;
  std::string text;  // the source line, for verdict messages
  SourcePos pos;
};

struct Scenario {
  std::string name;
  std::vector<std::filesystem::path> modelFiles;
  std::string rootType;
  std::uint64_t seed = 0;
  std::vector<LatencyOverride> latencies;
  std::vector<ScaleDirective> scales;
  std::map<std::string, ErrorStrategy> strategies;
  std::vector<Injection> injections;
  std::vector<FaultDirective> faults;
  std::vector<Expectation> expectations;
  std::int64_t maxSteps = 10000;

  // Filled by a successful load.
  std::shared_ptr<const ArchitectureModel> model;
  RuntimeTopology topology;
};

struct ScenarioResult {
  std::optional<Scenario> scenario;
  Diagnostics diagnostics;

  bool ok() const { return scenario.has_value(); }
};

/// Parses a scenario, loads and checks its model files (relative to
/// `baseDir`), elaborates the root and validates every directive against the
/// topology. Unknown ports and paths are E_UNRESOLVED, literals that do not
/// fit their port E_TYPE_MISMATCH.
ScenarioResult load_scenario(std::string_view text, std::string_view origin,
                             const std::filesystem::path& baseDir);
ScenarioResult load_scenario_file(const std::filesystem::path& path);

// `<channel glob> <steps>` per line, comments as in scenarios.
struct LatencyParse {
  std::vector<LatencyOverride> latencies;
  Diagnostics diagnostics;
};
LatencyParse parse_latency_file(std::string_view text, std::string_view origin);

}  // namespace cloudadl
