// rcsim: run, audit, enumerate, and validate resilient consensus experiments.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ranges.h>

#include "resilient_consensus/config.h"
#include "resilient_consensus/experiment.h"
#include "resilient_consensus/privacy.h"
#include "resilient_consensus/topology.h"

namespace rc = resilient_consensus;

namespace {

constexpr int kOk = 0;
constexpr int kUsage = 1;
constexpr int kValidation = 2;
constexpr int kPrivacy = 3;

std::string Sets(const std::vector<rc::DiscardSet>& sets) {
  std::vector<std::string> s;
  for (const auto& d : sets) s.push_back(d.ToString());
  return fmt::format("{}", fmt::join(s, " "));
}

void PrintValidation(const rc::ValidationReport& v) {
  fmt::print("connected_after_every_discard: {}\n", v.connected_after_every_discard);
  if (!v.offending_sets.empty()) {
    fmt::print("  disconnecting sets: {}\n", Sets(v.offending_sets));
  }
  fmt::print("no_full_neighborhood: {}\n", v.no_full_neighborhood);
  if (!v.offending_agents.empty()) {
    fmt::print("  agents adjacent to all survivors: {}\n",
               fmt::join(v.offending_agents, " "));
    fmt::print("  in subnetworks: {}\n", Sets(v.full_neighborhood_sets));
  }
  if (v.fault_free_no_full_neighborhood) {
    fmt::print("no_full_neighborhood (faulty set removed only): {}\n",
               *v.fault_free_no_full_neighborhood);
  }
}

int CmdRun(const rc::ExperimentConfig& cfg, const rc::RunOptions& opts) {
  const auto result = rc::RunExperiment(cfg, opts);
  if (!result.validation.no_full_neighborhood) {
    fmt::print(stderr,
               "warning: some agent neighbors every other survivor of a "
               "subnetwork; its neighbors' privacy is not guaranteed\n");
  }
  if (result.trace.fault_bound_exceeded) {
    fmt::print(stderr, "warning: {} faulty agents exceed f={}\n",
               result.trace.faulty.size(), result.trace.max_faulty);
  }
  std::cout << rc::ReportJson(result.report);
  fmt::print(stderr, "trace: {}\nreport: {}\n", result.trace_path.string(),
             result.report_path.string());
  return kOk;
}

int CmdAudit(const rc::ExperimentConfig& cfg, std::vector<int> observers,
             const std::optional<std::string>& output) {
  const rc::Topology& t = cfg.sim.topology;
  std::vector<rc::AuditReport> reports;
  if (observers.empty()) {
    for (rc::AgentId u = 1; u <= t.agent_count(); ++u) {
      reports.push_back(rc::AuditAll(t, cfg.sim.max_faulty, {u}));
    }
  } else {
    reports.push_back(rc::AuditAll(t, cfg.sim.max_faulty, observers));
  }

  std::ofstream file;
  if (output) {
    file.open(*output);
    if (!file) throw std::runtime_error(fmt::format("cannot write {}", *output));
  }
  std::ostream& out = output ? static_cast<std::ostream&>(file) : std::cout;
  bool all = true;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    std::ostringstream csv;
    rc::WriteAuditCsv(csv, reports[i]);
    std::string text = csv.str();
    if (i > 0) text = text.substr(text.find('\n') + 1);  // one header only
    out << text;
    for (const auto& [target, ok] : reports[i].overall) {
      if (!ok) {
        all = false;
        fmt::print(stderr, "not private: target {} against observer(s) {}\n",
                   target, fmt::join(reports[i].observers, " "));
      }
    }
  }
  return all ? kOk : kPrivacy;
}

int CmdValidate(const rc::ExperimentConfig& cfg) {
  const auto faulty = rc::FaultySet(cfg.sim.faults);
  const auto v = rc::Validate(cfg.sim.topology, cfg.sim.max_faulty,
                              faulty.empty() ? std::nullopt
                                             : std::optional<rc::DiscardSet>(faulty));
  PrintValidation(v);
  return v.ok() ? kOk : kValidation;
}

int CmdEnumerate(const rc::Topology& t, int f) {
  const auto e = rc::Enumerate(t, f);
  fmt::print("agents: {}\n", e.agents);
  fmt::print("max_faulty: {}\n", e.max_faulty);
  fmt::print("subnetworks: {}\n", e.subnetworks);
  fmt::print("step_ops_per_iteration: {}\n", e.step_ops);
  fmt::print("selection_ops_per_iteration: {}\n", e.selection_ops);
  fmt::print("complexity_bound_f_n^2f: {:.6g}\n", e.complexity_bound);
  fmt::print("memory_bytes: {}\n", e.memory_bytes);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resilient, privacy-preserving average consensus simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  bool full_trace = false, force = false;
  std::optional<std::string> output;
  std::vector<int> observers;
  std::optional<int> agents, max_faulty;

  auto* run = app.add_subcommand("run", "simulate and write trace + report");
  run->add_option("--config", config_path, "YAML config")->required();
  run->add_option("--seed", seed, "override the config seed");
  run->add_flag("--full-trace", full_trace, "add per-block columns to the trace");
  run->add_flag("--force", force, "run even if a subnetwork is disconnected");
  run->add_option("--output", output, "trace CSV path");

  auto* audit = app.add_subcommand("audit", "privacy audit over all subnetworks");
  audit->add_option("--config", config_path, "YAML config")->required();
  audit->add_option("--observer", observers,
                    "observer id; repeat for colluding observers (default: "
                    "each agent alone)");
  audit->add_option("--output", output, "verdict CSV path (default stdout)");

  auto* enumerate = app.add_subcommand("enumerate", "count subnetworks and cost");
  enumerate->add_option("--config", config_path, "YAML config");
  enumerate->add_option("--agents", agents,
                        "agent count, without a config (complete-graph degrees)");
  enumerate->add_option("--max-faulty", max_faulty, "f, overrides the config");

  auto* validate = app.add_subcommand("validate", "check connectivity and neighborhoods");
  validate->add_option("--config", config_path, "YAML config")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*enumerate) {
      if (agents) {
        return CmdEnumerate(rc::builtin::Complete(*agents), max_faulty.value_or(0));
      }
      if (config_path.empty()) {
        fmt::print(stderr, "enumerate needs --config or --agents\n");
        return kUsage;
      }
      const auto cfg = rc::LoadConfig(config_path);
      return CmdEnumerate(cfg.sim.topology, max_faulty.value_or(cfg.sim.max_faulty));
    }
    const auto cfg = rc::LoadConfig(config_path);
    if (*run) {
      rc::RunOptions opts;
      opts.seed = seed;
      opts.full_trace = full_trace;
      opts.force = force;
      if (output) opts.output = *output;
      return CmdRun(cfg, opts);
    }
    if (*audit) return CmdAudit(cfg, observers, output);
    return CmdValidate(cfg);
  } catch (const rc::ValidationFailure& e) {
    PrintValidation(e.report);
    fmt::print(stderr, "validation failed: {}\n", e.what());
    return kValidation;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return kUsage;
  }
}
