#include "resilient_consensus/topology.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <istream>
#include <queue>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ranges.h>

namespace resilient_consensus {

DiscardSet::DiscardSet(std::vector<AgentId> members)
    : members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  if (std::adjacent_find(members_.begin(), members_.end()) != members_.end()) {
    throw std::invalid_argument("DiscardSet: duplicate member");
  }
  if (!members_.empty() && members_.front() < 1) {
    throw std::invalid_argument("DiscardSet: agent ids start at 1");
  }
}

bool DiscardSet::contains(AgentId v) const {
  return std::binary_search(members_.begin(), members_.end(), v);
}

DiscardSet DiscardSet::with(AgentId v) const {
  if (contains(v)) return *this;
  auto m = members_;
  m.push_back(v);
  return DiscardSet(std::move(m));
}

DiscardSet DiscardSet::without(AgentId v) const {
  DiscardSet out;
  out.members_.reserve(members_.size());
  for (AgentId m : members_) {
    if (m != v) out.members_.push_back(m);
  }
  return out;
}

std::string DiscardSet::ToString() const {
  return fmt::format("{{{}}}", fmt::join(members_, " "));
}

DiscardSet DiscardSet::Parse(std::string_view text) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
      s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
      s.remove_suffix(1);
    return s;
  };
  text = trim(text);
  if (text.size() < 2 || text.front() != '{' || text.back() != '}') {
    throw std::invalid_argument(
        fmt::format("DiscardSet: cannot parse '{}'", text));
  }
  std::istringstream in{std::string(text.substr(1, text.size() - 2))};
  std::vector<AgentId> members;
  AgentId v;
  while (in >> v) members.push_back(v);
  if (!in.eof()) {
    throw std::invalid_argument(
        fmt::format("DiscardSet: cannot parse '{}'", text));
  }
  return DiscardSet(std::move(members));
}

std::strong_ordering operator<=>(const DiscardSet& a, const DiscardSet& b) {
  if (auto c = a.size() <=> b.size(); c != 0) return c;
  return std::lexicographical_compare_three_way(
      a.members_.begin(), a.members_.end(), b.members_.begin(),
      b.members_.end());
}

std::size_t CountDiscardSets(int n, int f) {
  std::size_t total = 0;
  std::size_t binom = 1;  // C(n, k)
  for (int k = 0; k <= f; ++k) {
    total += binom;
    binom = binom * static_cast<std::size_t>(n - k) /
            static_cast<std::size_t>(k + 1);
  }
  return total;
}

SubsetTable::SubsetTable(int n, int f) : n_(n), f_(f) {
  if (n < 1) throw std::invalid_argument("SubsetTable: need n >= 1");
  if (f < 0 || f >= n) {
    throw std::invalid_argument(
        fmt::format("SubsetTable: need 0 <= f < n, got n={} f={}", n, f));
  }
  sets_.reserve(CountDiscardSets(n, f));
  for (int k = 0; k <= f; ++k) {
    // Lexicographic k-combinations of 1..n.
    std::vector<AgentId> comb(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) comb[static_cast<std::size_t>(i)] = i + 1;
    while (true) {
      sets_.emplace_back(comb);
      int i = k - 1;
      while (i >= 0 && comb[static_cast<std::size_t>(i)] == n - k + i + 1) --i;
      if (i < 0) break;
      ++comb[static_cast<std::size_t>(i)];
      for (int j = i + 1; j < k; ++j) {
        comb[static_cast<std::size_t>(j)] =
            comb[static_cast<std::size_t>(j - 1)] + 1;
      }
    }
  }
  extend_.assign(sets_.size() * static_cast<std::size_t>(n), -1);
  for (std::size_t o = 0; o < sets_.size(); ++o) {
    if (static_cast<int>(sets_[o].size()) >= f) continue;
    for (AgentId v = 1; v <= n; ++v) {
      if (sets_[o].contains(v)) continue;
      extend_[o * static_cast<std::size_t>(n) + static_cast<std::size_t>(v - 1)] =
          static_cast<long>(index_of(sets_[o].with(v)));
    }
  }
}

std::optional<std::size_t> SubsetTable::find(const DiscardSet& s) const {
  auto it = std::lower_bound(sets_.begin(), sets_.end(), s);
  if (it == sets_.end() || *it != s) return std::nullopt;
  return static_cast<std::size_t>(it - sets_.begin());
}

std::size_t SubsetTable::index_of(const DiscardSet& s) const {
  auto o = find(s);
  if (!o) {
    throw std::out_of_range(
        fmt::format("SubsetTable: {} not enumerated", s.ToString()));
  }
  return *o;
}

std::optional<std::size_t> SubsetTable::extend(std::size_t ordinal,
                                               AgentId v) const {
  if (v < 1 || v > n_) return std::nullopt;
  long o = extend_.at(ordinal * static_cast<std::size_t>(n_) +
                      static_cast<std::size_t>(v - 1));
  if (o < 0) return std::nullopt;
  return static_cast<std::size_t>(o);
}

std::optional<std::size_t> SubsetTable::shrink(std::size_t ordinal,
                                               AgentId v) const {
  const DiscardSet& s = sets_.at(ordinal);
  if (!s.contains(v)) return std::nullopt;
  return index_of(s.without(v));
}

SubsetTable EnumerateDiscardSets(int n, int f) { return SubsetTable(n, f); }

Topology::Topology(int n, const std::vector<Edge>& edges)
    : n_(n), neighbors_(static_cast<std::size_t>(std::max(n, 0))) {
  if (n < 1) throw std::invalid_argument("Topology: need n >= 1");
  for (auto [u, v] : edges) {
    CheckAgent(u);
    CheckAgent(v);
    if (u == v) {
      throw std::invalid_argument(
          fmt::format("Topology: self-loop at agent {}", u));
    }
    edges_.emplace_back(std::min(u, v), std::max(u, v));
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
  for (auto [u, v] : edges_) {
    neighbors_[static_cast<std::size_t>(u - 1)].push_back(v);
    neighbors_[static_cast<std::size_t>(v - 1)].push_back(u);
  }
  for (auto& nb : neighbors_) std::sort(nb.begin(), nb.end());
}

Topology Topology::FromAdjacency(const Eigen::MatrixXi& adjacency) {
  if (adjacency.rows() != adjacency.cols()) {
    throw std::invalid_argument("Topology: adjacency matrix must be square");
  }
  const int n = static_cast<int>(adjacency.rows());
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if ((adjacency(i, j) != 0) != (adjacency(j, i) != 0)) {
        throw std::invalid_argument(fmt::format(
            "Topology: adjacency is asymmetric at ({}, {}); directed networks "
            "are not supported",
            i + 1, j + 1));
      }
      if (i < j && adjacency(i, j) != 0) edges.emplace_back(i + 1, j + 1);
    }
    if (adjacency(i, i) != 0) {
      throw std::invalid_argument(
          fmt::format("Topology: self-loop at agent {}", i + 1));
    }
  }
  return Topology(n, edges);
}

void Topology::CheckAgent(AgentId v) const {
  if (v < 1 || v > n_) {
    throw std::invalid_argument(
        fmt::format("Topology: agent {} outside 1..{}", v, n_));
  }
}

const std::vector<AgentId>& Topology::neighbors(AgentId v) const {
  CheckAgent(v);
  return neighbors_[static_cast<std::size_t>(v - 1)];
}

bool Topology::adjacent(AgentId u, AgentId v) const {
  const auto& nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

Eigen::MatrixXi Topology::Adjacency() const {
  Eigen::MatrixXi a = Eigen::MatrixXi::Zero(n_, n_);
  for (auto [u, v] : edges_) {
    a(u - 1, v - 1) = 1;
    a(v - 1, u - 1) = 1;
  }
  return a;
}

Topology ParseEdgeList(std::istream& in, int n) {
  std::vector<Topology::Edge> edges;
  std::string line;
  int max_id = 0;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      line.erase(hash);
    }
    std::istringstream ls(line);
    AgentId u, v;
    if (!(ls >> u)) continue;
    std::string rest;
    if (!(ls >> v) || (ls >> rest)) {
      throw std::invalid_argument(
          fmt::format("edge list line {}: expected 'u v'", lineno));
    }
    edges.emplace_back(u, v);
    max_id = std::max({max_id, u, v});
  }
  return Topology(n > 0 ? n : max_id, edges);
}

namespace builtin {

Topology G1Example() {
  // N1={2,3}, N2={1,4,5}, N3={1,4}, N4={2,3,5}, N5={2,4}
  return Topology(5, {{1, 2}, {1, 3}, {2, 4}, {2, 5}, {3, 4}, {4, 5}});
}

Topology Ring(int n) {
  if (n < 3) throw std::invalid_argument("ring needs n >= 3");
  std::vector<Topology::Edge> edges;
  for (int i = 1; i <= n; ++i) edges.emplace_back(i, i % n + 1);
  return Topology(n, edges);
}

Topology Regular4Of10() {
  std::vector<Topology::Edge> edges;
  for (int i = 0; i < 10; ++i) {
    edges.emplace_back(i + 1, (i + 1) % 10 + 1);
    edges.emplace_back(i + 1, (i + 2) % 10 + 1);
  }
  return Topology(10, edges);
}

Topology Complete(int n) {
  std::vector<Topology::Edge> edges;
  for (int i = 1; i <= n; ++i)
    for (int j = i + 1; j <= n; ++j) edges.emplace_back(i, j);
  return Topology(n, edges);
}

Topology Star(int n) {
  std::vector<Topology::Edge> edges;
  for (int i = 2; i <= n; ++i) edges.emplace_back(1, i);
  return Topology(n, edges);
}

Topology Path(int n) {
  std::vector<Topology::Edge> edges;
  for (int i = 1; i < n; ++i) edges.emplace_back(i, i + 1);
  return Topology(n, edges);
}

}  // namespace builtin

Topology MakeBuiltin(std::string_view name) {
  if (name == "g1_example") return builtin::G1Example();
  if (name == "regular4_10") return builtin::Regular4Of10();
  auto open = name.find('(');
  if (open != std::string_view::npos && name.back() == ')') {
    std::string_view kind = name.substr(0, open);
    std::string_view arg = name.substr(open + 1, name.size() - open - 2);
    int n = 0;
    auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), n);
    if (ec == std::errc() && ptr == arg.data() + arg.size()) {
      if (kind == "ring") return builtin::Ring(n);
      if (kind == "complete") return builtin::Complete(n);
      if (kind == "star") return builtin::Star(n);
      if (kind == "path") return builtin::Path(n);
    }
  }
  throw std::invalid_argument(fmt::format("unknown builtin topology '{}'", name));
}

namespace {

std::vector<char> SurvivorMask(const Topology& t, const DiscardSet& s) {
  const int n = t.agent_count();
  std::vector<char> alive(static_cast<std::size_t>(n), 1);
  for (AgentId v : s.members()) {
    if (v > n) {
      throw std::invalid_argument(
          fmt::format("discard set member {} outside 1..{}", v, n));
    }
    alive[static_cast<std::size_t>(v - 1)] = 0;
  }
  return alive;
}

}  // namespace

bool IsConnectedAfterRemoval(const Topology& t, const DiscardSet& s) {
  const auto alive = SurvivorMask(t, s);
  const int n = t.agent_count();
  if (static_cast<int>(s.size()) >= n) {
    throw std::invalid_argument("IsConnectedAfterRemoval: no agent survives");
  }
  AgentId start = 1;
  while (!alive[static_cast<std::size_t>(start - 1)]) ++start;
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::queue<AgentId> frontier;
  frontier.push(start);
  seen[static_cast<std::size_t>(start - 1)] = 1;
  int reached = 1;
  while (!frontier.empty()) {
    AgentId u = frontier.front();
    frontier.pop();
    for (AgentId v : t.neighbors(u)) {
      auto i = static_cast<std::size_t>(v - 1);
      if (alive[i] && !seen[i]) {
        seen[i] = 1;
        ++reached;
        frontier.push(v);
      }
    }
  }
  return reached == n - static_cast<int>(s.size());
}

std::vector<AgentId> FullNeighborhoodAgents(const Topology& t,
                                            const DiscardSet& s) {
  const auto alive = SurvivorMask(t, s);
  const int survivors = t.agent_count() - static_cast<int>(s.size());
  std::vector<AgentId> out;
  // A lone survivor has no "others" to neighbor; it cannot offend.
  if (survivors < 2) return out;
  for (AgentId v = 1; v <= t.agent_count(); ++v) {
    if (!alive[static_cast<std::size_t>(v - 1)]) continue;
    int live_neighbors = 0;
    for (AgentId u : t.neighbors(v)) {
      live_neighbors += alive[static_cast<std::size_t>(u - 1)];
    }
    if (live_neighbors == survivors - 1) out.push_back(v);
  }
  return out;
}

ValidationReport Validate(const Topology& t, int f,
                          const std::optional<DiscardSet>& faulty) {
  const SubsetTable table(t.agent_count(), f);
  ValidationReport report;
  std::vector<AgentId> offenders;
  for (const DiscardSet& s : table.sets()) {
    if (!IsConnectedAfterRemoval(t, s)) {
      report.connected_after_every_discard = false;
      report.offending_sets.push_back(s);
    }
    auto full = FullNeighborhoodAgents(t, s);
    if (!full.empty()) {
      report.no_full_neighborhood = false;
      report.full_neighborhood_sets.push_back(s);
      offenders.insert(offenders.end(), full.begin(), full.end());
    }
  }
  std::sort(offenders.begin(), offenders.end());
  offenders.erase(std::unique(offenders.begin(), offenders.end()),
                  offenders.end());
  report.offending_agents = std::move(offenders);
  if (faulty) {
    report.fault_free_no_full_neighborhood =
        static_cast<int>(faulty->size()) < t.agent_count() &&
        FullNeighborhoodAgents(t, *faulty).empty();
  }
  return report;
}

}  // namespace resilient_consensus
