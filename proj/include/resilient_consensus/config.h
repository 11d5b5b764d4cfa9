#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "resilient_consensus/engine.h"

namespace resilient_consensus {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  SimConfig sim;
  std::string output = "trace.csv";
};

/// YAML keys:
///   topology: builtin name        (or edges: [[1, 2], ...], or edge_file: path)
///   agents: n                     (required with edges / edge_file unless implied)
///   x0: [..]                      faulty entries are ignored
///   faults: {id: {kind, c, a}}
///   f, iterations, noisy_iterations, xi, noise_policy (plain | bounded),
///   eps, dominance, selector (pivot_consistent | first_distinct), seed, output
/// Relative edge_file paths resolve against base_dir. Throws ConfigError.
ExperimentConfig ParseConfig(const std::string& yaml_text,
                             const std::filesystem::path& base_dir = ".");
ExperimentConfig LoadConfig(const std::filesystem::path& path);

}  // namespace resilient_consensus
