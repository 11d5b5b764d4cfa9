#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "resilient_consensus/adversary.h"
#include "resilient_consensus/topology.h"
#include "resilient_consensus/weights.h"

namespace resilient_consensus {

/// The surviving block of one weight matrix split into regular (non-faulty)
/// and stubborn (faulty) agents: x_R ← Q1·x_R + Q2·x_S.
struct BlockPartition {
  std::vector<AgentId> regular;
  std::vector<AgentId> stubborn;
  Eigen::MatrixXd q1;  // |regular| × |regular|
  Eigen::MatrixXd q2;  // |regular| × |stubborn|
};

BlockPartition Partition(const WeightMatrix& w, const DiscardSet& faulty);

struct StubbornLimitResult {
  BlockPartition partition;
  /// (I - Q1)^{-1} Q2: row i holds regular[i]'s convex weights on the
  /// stubborn agents.
  Eigen::MatrixXd convex_weights;
  /// Limit of each regular agent, aligned with partition.regular.
  Eigen::VectorXd limits;
};

/// Long-run values of the regular agents in the block discarding s when every
/// surviving faulty agent sits at its asymptote. Throws std::invalid_argument
/// when no faulty agent survives and std::domain_error when I - Q1 is
/// singular (the surviving network is disconnected from the stubborn agents).
StubbornLimitResult StubbornLimit(const Topology& t, const DiscardSet& s,
                                  const WeightMatrix& w,
                                  const FaultAssignment& faults);

/// Mean of x0 over agents outside s. x0 is indexed by agent - 1.
double CleanAverage(std::span<const double> x0, const DiscardSet& s);

/// True iff the clean averages over V ∖ S are pairwise more than eps apart
/// for all distinct S of size ≤ f drawn from the non-faulty agents.
bool DistinctSubsetAverages(std::span<const double> x0, int f,
                            const FaultAssignment& faults, double eps = 1e-9);

double SpectralRadius(const Eigen::MatrixXd& m);

}  // namespace resilient_consensus
