#include "resilient_consensus/weights.h"

#include <stdexcept>

namespace resilient_consensus {

WeightMatrix::WeightMatrix(DiscardSet discard, Eigen::MatrixXd entries)
    : discard_(std::move(discard)), entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols()) {
    throw std::invalid_argument("WeightMatrix: entries must be square");
  }
}

std::vector<AgentId> WeightMatrix::survivors() const {
  std::vector<AgentId> out;
  for (AgentId v = 1; v <= dim(); ++v) {
    if (!discard_.contains(v)) out.push_back(v);
  }
  return out;
}

Eigen::MatrixXd WeightMatrix::SurvivingBlock() const {
  const auto alive = survivors();
  const auto m = static_cast<Eigen::Index>(alive.size());
  Eigen::MatrixXd block(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j)
      block(i, j) = entries_(alive[static_cast<std::size_t>(i)] - 1,
                             alive[static_cast<std::size_t>(j)] - 1);
  return block;
}

WeightMatrix DoublyStochastic(const Topology& t, const DiscardSet& s) {
  const int n = t.agent_count();
  if (static_cast<int>(s.size()) >= n) {
    throw std::invalid_argument("DoublyStochastic: no agent survives");
  }
  for (AgentId v : s.members()) {
    if (v > n) throw std::invalid_argument("DoublyStochastic: bad discard set");
  }
  // Steps follow the max-degree construction literally: start from -Adj,
  // zero the discarded rows and columns, put deg+1 on the diagonal, then
  // rescale by d_max.
  Eigen::MatrixXd a = -t.Adjacency().cast<double>();
  for (AgentId v : s.members()) {
    a.row(v - 1).setZero();
    a.col(v - 1).setZero();
  }
  double d_max = 1.0;
  for (int i = 0; i < n; ++i) {
    const double tmp = -a.row(i).sum() + 1.0;
    a(i, i) = tmp;
    d_max = d_max > tmp ? d_max : tmp;
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      a(i, j) = -a(i, j) / d_max + (i == j ? (d_max + 1.0) / d_max : 0.0);
    }
  }
  for (AgentId v : s.members()) a(v - 1, v - 1) = 0.0;
  // Off-diagonal zeros come out as -0.0; normalize so entries compare cleanly.
  a = a.unaryExpr([](double x) { return x == 0.0 ? 0.0 : x; });
  return WeightMatrix(s, std::move(a));
}

std::vector<WeightMatrix> BuildAll(const Topology& t,
                                   const SubsetTable& table) {
  if (table.agent_count() != t.agent_count()) {
    throw std::invalid_argument("BuildAll: table and topology disagree on n");
  }
  std::vector<WeightMatrix> out;
  out.reserve(table.size());
  for (const DiscardSet& s : table.sets()) out.push_back(DoublyStochastic(t, s));
  return out;
}

}  // namespace resilient_consensus
