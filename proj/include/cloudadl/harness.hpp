#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cloudadl/scenario.hpp"
#include "cloudadl/trace.hpp"

namespace cloudadl {

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> maxSteps;
  std::vector<LatencyOverride> latencies;  // applied after the scenario's own
  const BehaviorRegistry* registry = nullptr;
};

struct Verdict {
  enum class Status { Pass, Fail, Fatal };
  Status status = Status::Pass;
  std::string message;  // first violated expectation, or the FATAL event

  bool passed() const { return status == Status::Pass; }
};

struct RunResult {
  Verdict verdict;
  EventLog log;
  std::map<std::string, std::vector<Payload>> tables;  // store results by group path
  std::int64_t steps = 0;
};

/// Runs the scenario on a fresh kernel. Directives due at a step are applied
/// before it (scales, then injections, then faults, each in file order); the
/// run ends at maxSteps, on FATAL, or once the kernel is quiescent with no
/// directives left.
RunResult run_scenario(const Scenario& scenario, const RunOptions& options = {});

// Evaluates one expectation against a finished run; nullopt when it holds,
// otherwise what was observed.
std::optional<std::string> evaluate(const Expectation& e, const EventLog& log,
                                    const std::map<std::string, std::vector<Payload>>& tables);

// Rendered payloads delivered to a root out-port, in delivery order.
std::vector<std::string> root_stream(const EventLog& log, std::string_view port);
// Seqs delivered on one channel, in delivery order.
std::vector<std::uint64_t> channel_stream(const EventLog& log, std::size_t channel);

struct ReferenceResult {
  std::map<std::string, std::vector<std::string>> outputs;  // root out-port -> rendered payloads
  std::map<std::string, std::vector<Payload>> tables;
};

/// Sequential interpretation: every group has one replica, every channel
/// delivers immediately, and each injection runs to completion before the
/// next. Throws RuntimeError(OracleInapplicable) when a behavior is
/// replication dependent, the scenario injects faults, or a behavior raises.
ReferenceResult reference_run(const Scenario& scenario, const BehaviorRegistry* registry = nullptr);

// One file per store table named after the group path ('/' -> '_') with a
// `.rows` suffix, one rendered payload per line. Returns the files written.
std::vector<std::filesystem::path> write_results(const std::filesystem::path& dir,
                                                 const std::map<std::string, std::vector<Payload>>& tables);

}  // namespace cloudadl
