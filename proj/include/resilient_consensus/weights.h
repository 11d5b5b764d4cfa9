#pragma once

#include <vector>

#include <Eigen/Core>

#include "resilient_consensus/topology.h"

namespace resilient_consensus {

/// Update matrix of one consensus instance. Dense n×n; rows and columns of
/// discarded agents are identically zero, the surviving block is symmetric
/// and doubly stochastic.
class WeightMatrix {
 public:
  WeightMatrix(DiscardSet discard, Eigen::MatrixXd entries);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const Eigen::MatrixXd& entries() const { return entries_; }
  const DiscardSet& discard() const { return discard_; }

  /// 1-indexed access.
  double operator()(AgentId i, AgentId j) const {
    return entries_(i - 1, j - 1);
  }

  std::vector<AgentId> survivors() const;
  /// The m×m principal submatrix on survivors, in ascending agent order.
  Eigen::MatrixXd SurvivingBlock() const;

 private:
  DiscardSet discard_;
  Eigen::MatrixXd entries_;
};

/// Max-degree weights on the subnetwork that excludes s: 1/d_max on every
/// surviving edge, 1 - deg_i/d_max on surviving diagonals, zero elsewhere,
/// where d_max = max(1, max_i deg_i + 1) over survivors.
WeightMatrix DoublyStochastic(const Topology& t, const DiscardSet& s);

/// One matrix per discard set, in the table's canonical order.
std::vector<WeightMatrix> BuildAll(const Topology& t, const SubsetTable& table);

}  // namespace resilient_consensus
