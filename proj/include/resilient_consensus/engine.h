#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "resilient_consensus/adversary.h"
#include "resilient_consensus/topology.h"
#include "resilient_consensus/weights.h"

namespace resilient_consensus {

/// One agent's augmented state: a consensus value per discard set, plus the
/// running sum of the noise it has injected. Entries for discard sets that
/// contain the agent itself hold NaN and are never read.
struct AgentState {
  AgentId id = 0;
  std::vector<double> values;
  double noise_ledger = 0.0;
  double selected = 0.0;
  std::size_t selected_block = 0;
};

enum class NoiseKind {
  kPlain,
  /// Flips the sign of each draw while the ledger is positive. The draws are
  /// symmetric, so the ledger is still a random walk in distribution.
  kBounded,
};

struct NoisePolicy {
  NoiseKind kind = NoiseKind::kPlain;
  double xi = 0.0;           // standard deviation of each draw
  int noisy_iterations = 0;  // T: draws happen for k < T, cancellation at T
};

/// The increment η applied at iteration k given a raw draw θ: θ (or ±θ under
/// the bounded policy) for k < T, otherwise -ledger, which cancels all past
/// noise on the first call and is zero afterwards.
double NoiseIncrement(double ledger, int k, const NoisePolicy& policy,
                      double theta);

/// Draws θ ~ N(0, ξ) when k < T, applies the increment to every entry of the
/// augmented state and to the ledger. Returns η.
double InjectNoise(AgentState& agent, int k, const NoisePolicy& policy,
                   std::mt19937_64& rng);

/// Synchronous update of every agent's augmented state from the previous
/// iteration's values. A non-faulty agent j updates block S (j ∉ S) with
/// Σ_{v ∈ (N_j∖S) ∪ {j}} W_S(j, v)·value[v][S]; faulty agents overwrite every
/// entry with their trajectory value at k.
void ConsensusStep(std::vector<AgentState>& agents,
                   std::span<const WeightMatrix> weights, const Topology& t,
                   const SubsetTable& table, const FaultAssignment& faults,
                   int k);

enum class SelectionRule {
  /// Identifies the faulty set F̂ from the structure of the augmented state:
  /// for every u ∈ F̂, the block F̂∖{u} changes by more than eps when u is
  /// also discarded and (within tolerance) not at all when any other agent
  /// is. Sound for |F| ≤ f with distinct fault asymptotes.
  kPivotConsistent,
  /// First block, level by level, whose value differs by more than eps from
  /// every other live block of equal or smaller size; returns the
  /// all-agents block when every singleton block differs from it. Only
  /// reliable for a single faulty agent.
  kFirstDistinct,
};

struct SelectorOptions {
  SelectionRule rule = SelectionRule::kPivotConsistent;
  double eps = 1e-6;
  /// kPivotConsistent only. A block still counts as pivoting on u when its
  /// runner-up deviation is at most dominance × its largest deviation. Zero
  /// means the runner-up must be within eps.
  double dominance = 0.0;
};

struct Selection {
  double value = 0.0;
  std::size_t block = 0;
};

/// Chooses which augmented entry becomes the agent's scalar state. Blocks that
/// contain the agent are never candidates. Falls back to the all-agents block
/// (ordinal 0) when no faulty set is identified.
Selection SelectState(const AgentState& agent, const SubsetTable& table,
                      const SelectorOptions& options);

/// Inputs of one simulated run.
struct SimConfig {
  Topology topology{1, {}};
  std::vector<double> x0;
  FaultAssignment faults;
  int max_faulty = 0;  // f
  int iterations = 1;  // N: iterations 0..N-1 are recorded
  NoisePolicy noise;
  SelectorOptions selector;
  std::uint64_t seed = 0;
  /// Keep every iteration's full augmented state in the trace.
  bool record_blocks = false;
};

/// Checks sizes and ranges; throws std::invalid_argument.
void CheckConfig(const SimConfig& config);

struct RunTrace {
  int agent_count = 0;
  int max_faulty = 0;
  int iterations = 0;
  int noisy_iterations = 0;
  DiscardSet faulty;
  /// More faulty agents than the protocol was sized for.
  bool fault_bound_exceeded = false;
  /// Initial states as used: faulty entries replaced by their trajectory at 0.
  std::vector<double> initial_states;
  /// Canonical discard sets, indexed by the block ordinals below.
  std::vector<DiscardSet> blocks;
  /// iterations × n; entry (k, j-1) is agent j's scalar state at iteration k.
  Eigen::MatrixXd selected;
  /// [k][j-1]: ordinal of the block agent j selected. Faulty agents record 0.
  std::vector<std::vector<std::size_t>> selected_block;
  /// Earliest k from which every non-faulty agent's selected block stays fixed.
  int settling_iteration = 0;
  /// |Σ_v x_v - Σ_v x0_v| over agents outside F, in the block discarding
  /// exactly F, at iteration T+1. Absent when |F| > f or T+1 >= N.
  std::optional<double> sum_residual;
  /// Only with record_blocks: [k] is n × r, NaN where an agent is discarded.
  std::vector<Eigen::MatrixXd> block_values;
};

/// Initialization, then N-1 rounds of consensus step, noise injection, and
/// state selection. Deterministic in config.seed.
RunTrace Run(const SimConfig& config);

}  // namespace resilient_consensus
