#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "resilient_consensus/topology.h"
#include "resilient_consensus/weights.h"

namespace resilient_consensus {

/// Rank with singular values below rel_tol · σ_max treated as zero.
int NumericalRank(const Eigen::MatrixXd& m, double rel_tol = 1e-10);

struct PrivacyVerdict {
  std::vector<AgentId> observers;
  AgentId target = 0;
  bool is_private = false;
  /// rank([M; e_vᵀ(I - A)]) - rank(M); private iff 1.
  int witness_rank_gap = 0;
};

/// Whether colluding observers, seeing their own and their neighbors' states
/// plus their own noisy update e_uᵀA, can pin down the target's initial state
/// in the subnetwork that weights was built for. The target is private iff
/// e_vᵀ(I - A) lies outside the row span of the observations.
/// Throws std::invalid_argument when an observer or the target is discarded,
/// the target is an observer, or the subnetwork is disconnected.
PrivacyVerdict PrivacyHolds(const Topology& t, const WeightMatrix& weights,
                            const std::vector<AgentId>& observers,
                            AgentId target);

inline PrivacyVerdict PrivacyHolds(const Topology& t,
                                   const WeightMatrix& weights, AgentId observer,
                                   AgentId target) {
  return PrivacyHolds(t, weights, std::vector<AgentId>{observer}, target);
}

struct AuditEntry {
  DiscardSet subnetwork;
  AgentId target = 0;
  /// Absent for skipped subnetworks.
  std::optional<PrivacyVerdict> verdict;
  std::string note;
};

struct AuditReport {
  std::vector<AgentId> observers;
  int max_faulty = 0;
  /// One row per (subnetwork, target); skipped subnetworks get one row with
  /// target 0.
  std::vector<AuditEntry> entries;
  /// Private overall iff private in every audited subnetwork.
  std::map<AgentId, bool> overall;

  bool all_private() const;
};

/// Audits every subnetwork that discards at most f agents and keeps all
/// observers; disconnected subnetworks are skipped with a note.
AuditReport AuditAll(const Topology& t, int f,
                     const std::vector<AgentId>& observers);

/// subnetwork,observer,target,private,rank_gap,note
void WriteAuditCsv(std::ostream& out, const AuditReport& report);

}  // namespace resilient_consensus
