#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "resilient_consensus/engine.h"

namespace resilient_consensus {

/// Summary of a run against the non-faulty average of the initial states.
struct RunReport {
  int agent_count = 0;
  int max_faulty = 0;
  DiscardSet faulty;
  bool fault_bound_exceeded = false;
  std::vector<double> final_states;
  std::vector<DiscardSet> final_sets;
  double target = 0.0;
  /// Over non-faulty agents, at the last iteration.
  double max_error = 0.0;
  int settling_iteration = 0;
  std::optional<double> sum_residual;

  friend bool operator==(const RunReport&, const RunReport&) = default;
};

RunReport MakeReport(const RunTrace& trace);

/// Pretty-printed JSON.
std::string ReportJson(const RunReport& report);

/// "# key=value" metadata lines, then the header
/// iteration,agent,selected_state,selected_set[,block columns]
/// with one row per (iteration, agent). Block columns need a trace recorded
/// with record_blocks. Reals use 17 significant digits.
void WriteTraceCsv(std::ostream& out, const RunTrace& trace,
                   bool full_trace = false);

/// Inverse of WriteTraceCsv for everything MakeReport consumes: metadata,
/// selected states and selected sets (block columns are read back when
/// present). Throws std::runtime_error on malformed input.
RunTrace ReadTraceCsv(std::istream& in);

}  // namespace resilient_consensus
