#pragma once

#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "cloudadl/analyzer.hpp"
#include "cloudadl/harness.hpp"
#include "cloudadl/kernel.hpp"
#include "cloudadl/parser.hpp"
#include "cloudadl/scenario.hpp"

namespace cloudadl::testing {

std::filesystem::path models_dir();
std::filesystem::path cli_path();

// Runs the CLI with `args` (already shell-quoted), capturing both streams
// through files in `scratch`.
struct CliOutcome {
  int status = -1;
  std::string out;
  std::string err;
};
CliOutcome run_cli(const std::string& args, const std::filesystem::path& scratch);
std::string quote_arg(const std::filesystem::path& p);
std::string slurp(const std::filesystem::path& p);

// Parses and checks; throws std::runtime_error with the diagnostics otherwise.
std::shared_ptr<const ArchitectureModel> model_from(std::string_view text, std::string_view origin = "test.arc");

// Codes of all diagnostics, in order, joined with ' '.
std::string codes(const Diagnostics& diags);

// Scenario without files: model text, root type, and defaults.
Scenario scenario_from(std::string_view arcText, std::string_view rootType);

// Loads a bundled scenario; throws on diagnostics.
Scenario bundled(std::string_view scnFile);

Payload payload(const ArchitectureModel& model, std::string_view literal);

// Structurally valid model with random names, ports, connectors, contexts and
// behavior clauses; not necessarily well formed for the analyzer.
ArchitectureModel random_ast(std::mt19937_64& rng);

// Well-formed, runnable random system: hierarchy with fused chains, replica
// groups, contexts, fan-out and fan-in, plus a random scenario over it.
struct GeneratedSystem {
  std::string arc;
  Scenario scenario;
};
GeneratedSystem random_system(std::mt19937_64& rng, bool withFaults = false);

// Channels whose target instance is a replica group.
std::vector<std::size_t> channels_into_groups(const RuntimeTopology& topo);

// Per-channel check: DELIVER seq order equals SEND seq order. Returns a
// description of the first violation.
std::optional<std::string> fifo_violation(const EventLog& log);

// One model per analyzer rule, each violating exactly that rule.
struct BadModel {
  std::string rule;
  std::string text;
  std::string code;
};
const std::vector<BadModel>& bad_model_corpus();

}  // namespace cloudadl::testing
