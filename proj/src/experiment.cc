#include "resilient_consensus/experiment.h"

#include <cmath>
#include <fstream>

#include <fmt/format.h>

namespace resilient_consensus {

ExperimentResult RunExperiment(const ExperimentConfig& config,
                               const RunOptions& options) {
  ExperimentResult result;
  SimConfig sim = config.sim;
  if (options.seed) sim.seed = *options.seed;
  sim.record_blocks = options.full_trace;

  result.validation = Validate(sim.topology, sim.max_faulty);
  if (!result.validation.connected_after_every_discard && !options.force) {
    throw ValidationFailure(
        fmt::format("{} subnetwork(s) disconnected; pass --force to run anyway",
                    result.validation.offending_sets.size()),
        result.validation);
  }

  result.trace = Run(sim);
  result.report = MakeReport(result.trace);

  result.trace_path = options.output.value_or(config.output);
  result.report_path = result.trace_path;
  result.report_path.replace_extension(".report.json");
  {
    std::ofstream out(result.trace_path);
    if (!out) {
      throw std::runtime_error(
          fmt::format("cannot write {}", result.trace_path.string()));
    }
    WriteTraceCsv(out, result.trace, options.full_trace);
  }
  std::ofstream rep(result.report_path);
  if (!rep) {
    throw std::runtime_error(
        fmt::format("cannot write {}", result.report_path.string()));
  }
  rep << ReportJson(result.report);
  return result;
}

Enumeration Enumerate(const Topology& t, int f) {
  Enumeration e;
  e.agents = t.agent_count();
  e.max_faulty = f;
  e.subnetworks = CountDiscardSets(e.agents, f);
  const auto r = static_cast<std::uint64_t>(e.subnetworks);
  const auto n = static_cast<std::uint64_t>(e.agents);
  std::uint64_t degree_sum = 0;
  for (AgentId v = 1; v <= e.agents; ++v) {
    degree_sum += static_cast<std::uint64_t>(t.degree(v)) + 1;
  }
  e.step_ops = r * degree_sum;
  e.selection_ops = n * r * n;
  e.complexity_bound = f * std::pow(static_cast<double>(n), 2.0 * f);
  e.memory_bytes = sizeof(double) * (2 * n * r + r * n * n);
  return e;
}

}  // namespace resilient_consensus
