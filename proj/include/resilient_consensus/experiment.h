#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "resilient_consensus/config.h"
#include "resilient_consensus/engine.h"
#include "resilient_consensus/privacy.h"
#include "resilient_consensus/topology.h"
#include "resilient_consensus/trace_io.h"

namespace resilient_consensus {

struct ValidationFailure : std::runtime_error {
  ValidationFailure(const std::string& what, ValidationReport r)
      : std::runtime_error(what), report(std::move(r)) {}
  ValidationReport report;
};

struct RunOptions {
  std::optional<std::uint64_t> seed;
  bool full_trace = false;
  /// Run even when some subnetwork is disconnected.
  bool force = false;
  /// Overrides the config's output path for the trace CSV.
  std::optional<std::filesystem::path> output;
};

struct ExperimentResult {
  ValidationReport validation;
  RunTrace trace;
  RunReport report;
  std::filesystem::path trace_path;
  std::filesystem::path report_path;
};

/// Validates, runs, and writes the trace CSV plus a JSON report next to it
/// (same stem, ".report.json"). Throws ValidationFailure when a subnetwork
/// that discards at most f agents is disconnected and force is off.
ExperimentResult RunExperiment(const ExperimentConfig& config,
                               const RunOptions& options);

/// Size of the augmented state and rough per-iteration cost.
struct Enumeration {
  int agents = 0;
  int max_faulty = 0;
  std::size_t subnetworks = 0;
  /// Multiply-adds for one consensus step over every block.
  std::uint64_t step_ops = 0;
  /// Block comparisons for one round of state selection over all agents.
  std::uint64_t selection_ops = 0;
  /// f·n^{2f}, the asymptotic per-iteration bound.
  double complexity_bound = 0.0;
  /// Augmented states (double-buffered) plus dense weight matrices.
  std::uint64_t memory_bytes = 0;
};

Enumeration Enumerate(const Topology& t, int f);

}  // namespace resilient_consensus
