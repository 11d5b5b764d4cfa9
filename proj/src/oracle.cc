#include "resilient_consensus/oracle.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

namespace resilient_consensus {

BlockPartition Partition(const WeightMatrix& w, const DiscardSet& faulty) {
  BlockPartition p;
  for (AgentId v : w.survivors()) {
    (faulty.contains(v) ? p.stubborn : p.regular).push_back(v);
  }
  const auto nr = static_cast<Eigen::Index>(p.regular.size());
  const auto ns = static_cast<Eigen::Index>(p.stubborn.size());
  p.q1.resize(nr, nr);
  p.q2.resize(nr, ns);
  for (Eigen::Index i = 0; i < nr; ++i) {
    for (Eigen::Index j = 0; j < nr; ++j) {
      p.q1(i, j) = w(p.regular[i], p.regular[j]);
    }
    for (Eigen::Index j = 0; j < ns; ++j) {
      p.q2(i, j) = w(p.regular[i], p.stubborn[j]);
    }
  }
  return p;
}

StubbornLimitResult StubbornLimit(const Topology& t, const DiscardSet& s,
                                  const WeightMatrix& w,
                                  const FaultAssignment& faults) {
  if (w.discard() != s || w.dim() != t.agent_count()) {
    throw std::invalid_argument("StubbornLimit: weights do not match discard set");
  }
  StubbornLimitResult r;
  r.partition = Partition(w, FaultySet(faults));
  const BlockPartition& p = r.partition;
  if (p.stubborn.empty()) {
    throw std::invalid_argument("StubbornLimit: no faulty agent survives");
  }
  const auto nr = static_cast<Eigen::Index>(p.regular.size());
  r.limits.resize(nr);
  if (nr == 0) {
    r.convex_weights.resize(0, static_cast<Eigen::Index>(p.stubborn.size()));
    return r;
  }
  const Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(nr, nr) - p.q1;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(lhs);
  if (!lu.isInvertible()) {
    throw std::domain_error(
        "StubbornLimit: I - Q1 is singular; some regular agent cannot reach a "
        "faulty one");
  }
  r.convex_weights = lu.solve(p.q2);
  Eigen::VectorXd phi(static_cast<Eigen::Index>(p.stubborn.size()));
  for (std::size_t i = 0; i < p.stubborn.size(); ++i) {
    phi(static_cast<Eigen::Index>(i)) = Asymptote(faults.at(p.stubborn[i]));
  }
  r.limits = r.convex_weights * phi;
  return r;
}

double CleanAverage(std::span<const double> x0, const DiscardSet& s) {
  double sum = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < x0.size(); ++i) {
    if (s.contains(static_cast<AgentId>(i + 1))) continue;
    sum += x0[i];
    ++count;
  }
  if (count == 0) throw std::invalid_argument("CleanAverage: nobody survives");
  return sum / count;
}

bool DistinctSubsetAverages(std::span<const double> x0, int f,
                            const FaultAssignment& faults, double eps) {
  const int n = static_cast<int>(x0.size());
  const SubsetTable table(n, f);
  const DiscardSet faulty = FaultySet(faults);
  std::vector<double> averages;
  for (const DiscardSet& s : table.sets()) {
    const bool clean = std::none_of(s.members().begin(), s.members().end(),
                                    [&](AgentId v) { return faulty.contains(v); });
    if (clean) averages.push_back(CleanAverage(x0, s));
  }
  std::sort(averages.begin(), averages.end());
  for (std::size_t i = 1; i < averages.size(); ++i) {
    if (!(averages[i] - averages[i - 1] > eps)) return false;
  }
  return true;
}

double SpectralRadius(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 0.0;
  return m.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace resilient_consensus
