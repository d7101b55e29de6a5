// cloudadl: check, simulate and format cloudADL models.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "cloudadl/analyzer.hpp"
#include "cloudadl/errors.hpp"
#include "cloudadl/harness.hpp"
#include "cloudadl/parser.hpp"
#include "cloudadl/scenario.hpp"

namespace {

using namespace cloudadl;

enum Status { Ok = 0, ExpectationFailed = 1, Diagnosed = 2, Fatal = 3 };

void report(const Diagnostics& diags) {
  for (const auto& d : diags) std::cerr << format(d) << '\n';
}

std::optional<std::string> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream text;
  text << in.rdbuf();
  return text.str();
}

int cmd_check(const std::vector<std::string>& paths) {
  ModelResult loaded = load_files({paths.begin(), paths.end()});
  if (!loaded.ok()) {
    report(loaded.diagnostics);
    return Diagnosed;
  }
  Diagnostics diags = check(*loaded.model);
  report(diags);
  return diags.empty() ? Ok : Diagnosed;
}

struct SimFlags {
  std::string scenario;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> maxSteps;
  std::string trace;
  std::string latency;
  std::string results;
};

int cmd_sim(const SimFlags& flags) {
  ScenarioResult loaded = load_scenario_file(flags.scenario);
  if (!loaded.ok()) {
    report(loaded.diagnostics);
    return Diagnosed;
  }
  const Scenario& s = *loaded.scenario;

  RunOptions options;
  options.seed = flags.seed;
  options.maxSteps = flags.maxSteps;
  if (!flags.latency.empty()) {
    auto text = slurp(flags.latency);
    if (!text) {
      report({make_error(code::Io, SourcePos{flags.latency, 0, 0}, "cannot read file")});
      return Diagnosed;
    }
    auto parsed = parse_latency_file(*text, flags.latency);
    if (!parsed.diagnostics.empty()) {
      report(parsed.diagnostics);
      return Diagnosed;
    }
    options.latencies = std::move(parsed.latencies);
  }

  RunResult run;
  try {
    run = run_scenario(s, options);
  } catch (const RuntimeError& e) {
    std::cerr << flags.scenario << ": " << e.what() << '\n';
    return Diagnosed;
  }

  if (!flags.trace.empty()) {
    std::ofstream out(flags.trace, std::ios::binary | std::ios::trunc);
    if (!out) {
      report({make_error(code::Io, SourcePos{flags.trace, 0, 0}, "cannot write file")});
      return Diagnosed;
    }
    out << render_trace(run.log);
  }
  if (!flags.results.empty()) {
    try {
      write_results(flags.results, run.tables);
    } catch (const std::exception& e) {
      std::cerr << e.what() << '\n';
      return Diagnosed;
    }
  }

  const std::string name = s.name.empty() ? flags.scenario : s.name;
  switch (run.verdict.status) {
    case Verdict::Status::Pass: std::cout << "PASS " << name << '\n'; return Ok;
    case Verdict::Status::Fail: std::cout << "FAIL " << name << ": " << run.verdict.message << '\n'; return ExpectationFailed;
    case Verdict::Status::Fatal: std::cout << "FATAL " << name << ": " << run.verdict.message << '\n'; return Fatal;
  }
  return Fatal;
}

int cmd_fmt(const std::vector<std::string>& paths) {
  int status = Ok;
  for (const auto& path : paths) {
    auto text = slurp(path);
    if (!text) {
      report({make_error(code::Io, SourcePos{path, 0, 0}, "cannot read file")});
      status = Diagnosed;
      continue;
    }
    ModelResult parsed = parse_model(*text, path);
    if (!parsed.ok()) {
      report(parsed.diagnostics);
      status = Diagnosed;
      continue;
    }
    std::string canonical = pretty_print(*parsed.model);
    if (canonical == *text) continue;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
      report({make_error(code::Io, SourcePos{path, 0, 0}, "cannot write file")});
      status = Diagnosed;
      continue;
    }
    out << canonical;
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cloudADL models: check, simulate, format"};
  app.require_subcommand(1);

  std::vector<std::string> checkPaths;
  auto* check = app.add_subcommand("check", "parse and check model files");
  check->add_option("files", checkPaths, "model files")->required();

  SimFlags sim;
  std::uint64_t seed = 0;
  std::int64_t maxSteps = 0;
  auto* simCmd = app.add_subcommand("sim", "run a scenario");
  simCmd->add_option("scenario", sim.scenario, "scenario file")->required();
  auto* seedOpt = simCmd->add_option("--seed", seed, "override the scenario seed");
  auto* stepsOpt = simCmd->add_option("--max-steps", maxSteps, "override the step budget")->check(CLI::NonNegativeNumber);
  simCmd->add_option("--trace", sim.trace, "write the event log here");
  simCmd->add_option("--latency", sim.latency, "file of '<channel glob> <steps>' overrides");
  simCmd->add_option("--results", sim.results, "directory for store result files");

  std::vector<std::string> fmtPaths;
  auto* fmt = app.add_subcommand("fmt", "rewrite model files in canonical form");
  fmt->add_option("files", fmtPaths, "model files")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : Diagnosed;
  }

  if (*check) return cmd_check(checkPaths);
  if (*simCmd) {
    if (*seedOpt) sim.seed = seed;
    if (*stepsOpt) sim.maxSteps = maxSteps;
    return cmd_sim(sim);
  }
  return cmd_fmt(fmtPaths);
}
