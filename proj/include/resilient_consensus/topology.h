#pragma once

#include <compare>
#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace resilient_consensus {

/// Agents are numbered 1..n on every public interface.
using AgentId = int;

/// A sorted, duplicate-free set of agents excluded from one consensus
/// instance. Ordering is canonical: by size, then lexicographic, so the
/// empty set is always first.
class DiscardSet {
 public:
  DiscardSet() = default;
  /// Throws std::invalid_argument on duplicates or ids < 1.
  explicit DiscardSet(std::vector<AgentId> members);
  DiscardSet(std::initializer_list<AgentId> members)
      : DiscardSet(std::vector<AgentId>(members)) {}

  const std::vector<AgentId>& members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  bool contains(AgentId v) const;

  DiscardSet with(AgentId v) const;
  DiscardSet without(AgentId v) const;

  /// "{}" or "{1 2 3}"; the inverse of Parse.
  std::string ToString() const;
  static DiscardSet Parse(std::string_view text);

  friend bool operator==(const DiscardSet&, const DiscardSet&) = default;
  friend std::strong_ordering operator<=>(const DiscardSet& a,
                                          const DiscardSet& b);

 private:
  std::vector<AgentId> members_;
};

/// All discard sets of size 0..f over agents 1..n, in canonical order.
class SubsetTable {
 public:
  SubsetTable(int n, int f);

  int agent_count() const { return n_; }
  int max_faulty() const { return f_; }
  std::size_t size() const { return sets_.size(); }
  const std::vector<DiscardSet>& sets() const { return sets_; }
  const DiscardSet& at(std::size_t ordinal) const { return sets_.at(ordinal); }

  std::optional<std::size_t> find(const DiscardSet& s) const;
  /// Like find, but throws std::out_of_range for sets not in the table.
  std::size_t index_of(const DiscardSet& s) const;

  /// Ordinal of at(ordinal) ∪ {v}, or nullopt when v is already a member or
  /// the union exceeds f. Precomputed, O(1).
  std::optional<std::size_t> extend(std::size_t ordinal, AgentId v) const;
  /// Ordinal of at(ordinal) ∖ {v}; nullopt when v is not a member.
  std::optional<std::size_t> shrink(std::size_t ordinal, AgentId v) const;

 private:
  int n_;
  int f_;
  std::vector<DiscardSet> sets_;
  // Row-major [ordinal][v-1]; -1 marks "no such set".
  std::vector<long> extend_;
};

/// Σ_{k=0}^{f} C(n, k).
std::size_t CountDiscardSets(int n, int f);

SubsetTable EnumerateDiscardSets(int n, int f);

/// Undirected, simple agent graph.
class Topology {
 public:
  using Edge = std::pair<AgentId, AgentId>;

  /// Edges are unordered pairs; duplicates collapse. Throws
  /// std::invalid_argument on self-loops or ids outside 1..n.
  Topology(int n, const std::vector<Edge>& edges);

  /// Rejects asymmetric matrices: directed networks are not supported.
  static Topology FromAdjacency(const Eigen::MatrixXi& adjacency);

  int agent_count() const { return n_; }
  /// Sorted neighbor list N_v, excluding v.
  const std::vector<AgentId>& neighbors(AgentId v) const;
  int degree(AgentId v) const {
    return static_cast<int>(neighbors(v).size());
  }
  bool adjacent(AgentId u, AgentId v) const;
  /// Each edge once, with first < second, sorted.
  const std::vector<Edge>& edges() const { return edges_; }

  Eigen::MatrixXi Adjacency() const;

 private:
  void CheckAgent(AgentId v) const;

  int n_;
  std::vector<Edge> edges_;
  std::vector<std::vector<AgentId>> neighbors_;
};

/// One "u v" pair per line; blank lines and '#' comments are skipped. When
/// n is zero the agent count is the largest id seen.
Topology ParseEdgeList(std::istream& in, int n = 0);

namespace builtin {

/// The five-agent network of the first worked example.
Topology G1Example();
Topology Ring(int n);
/// Circulant C10(1, 2): 4-regular on 10 agents, 4-connected.
Topology Regular4Of10();
Topology Complete(int n);
/// Agent 1 is the center.
Topology Star(int n);
Topology Path(int n);

}  // namespace builtin

/// Parses "g1_example", "regular4_10", "ring(7)", "complete(5)", "star(4)",
/// "path(3)".
Topology MakeBuiltin(std::string_view name);

/// True iff the subgraph induced on the agents outside s is connected. A single
/// surviving agent counts as connected; throws when nobody survives.
bool IsConnectedAfterRemoval(const Topology& t, const DiscardSet& s);

/// N_v ∩ survivors is a strict subset of survivors ∖ {v} for every
/// surviving v. Returns the offending agents (empty when the condition holds).
std::vector<AgentId> FullNeighborhoodAgents(const Topology& t,
                                            const DiscardSet& s);

struct ValidationReport {
  bool connected_after_every_discard = true;
  bool no_full_neighborhood = true;
  /// Discard sets whose removal disconnects the network.
  std::vector<DiscardSet> offending_sets;
  /// Agents adjacent to every other survivor in at least one subnetwork.
  std::vector<AgentId> offending_agents;
  /// Subnetworks in which offending_agents were found.
  std::vector<DiscardSet> full_neighborhood_sets;
  /// Neighborhood condition on V ∖ F alone, when a faulty set was supplied.
  std::optional<bool> fault_free_no_full_neighborhood;

  bool ok() const {
    return connected_after_every_discard && no_full_neighborhood;
  }
};

ValidationReport Validate(const Topology& t, int f,
                          const std::optional<DiscardSet>& faulty = {});

}  // namespace resilient_consensus
