#include "resilient_consensus/privacy.h"

#include <algorithm>
#include <ostream>
#include <stdexcept>

#include <Eigen/SVD>
#include <fmt/format.h>
#include <fmt/ranges.h>

namespace resilient_consensus {

int NumericalRank(const Eigen::MatrixXd& m, double rel_tol) {
  if (m.size() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const Eigen::VectorXd& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  const double cutoff = rel_tol * s(0);
  return static_cast<int>((s.array() > cutoff).count());
}

PrivacyVerdict PrivacyHolds(const Topology& t, const WeightMatrix& weights,
                            const std::vector<AgentId>& observers,
                            AgentId target) {
  const DiscardSet& s = weights.discard();
  if (observers.empty()) throw std::invalid_argument("no observer given");
  for (AgentId u : observers) {
    if (u < 1 || u > t.agent_count() || s.contains(u)) {
      throw std::invalid_argument(fmt::format("observer {} not in subnetwork", u));
    }
    if (u == target) throw std::invalid_argument("target is an observer");
  }
  if (target < 1 || target > t.agent_count() || s.contains(target)) {
    throw std::invalid_argument(fmt::format("target {} not in subnetwork", target));
  }
  if (!IsConnectedAfterRemoval(t, s)) {
    throw std::invalid_argument(
        fmt::format("subnetwork discarding {} is disconnected", s.ToString()));
  }

  const std::vector<AgentId> alive = weights.survivors();
  const Eigen::MatrixXd a = weights.SurvivingBlock();
  const auto m = static_cast<Eigen::Index>(alive.size());
  auto local = [&](AgentId v) {
    return static_cast<Eigen::Index>(
        std::lower_bound(alive.begin(), alive.end(), v) - alive.begin());
  };

  std::vector<Eigen::Index> seen;
  for (AgentId u : observers) {
    seen.push_back(local(u));
    for (AgentId j : t.neighbors(u)) {
      if (!s.contains(j)) seen.push_back(local(j));
    }
  }
  std::sort(seen.begin(), seen.end());
  seen.erase(std::unique(seen.begin(), seen.end()), seen.end());

  const auto rows = static_cast<Eigen::Index>(seen.size() + observers.size());
  Eigen::MatrixXd obs = Eigen::MatrixXd::Zero(rows + 1, m);
  Eigen::Index r = 0;
  for (Eigen::Index j : seen) obs(r++, j) = 1.0;
  for (AgentId u : observers) obs.row(r++) = a.row(local(u));
  const Eigen::Index tv = local(target);
  obs.row(r) = -a.row(tv);
  obs(r, tv) += 1.0;

  PrivacyVerdict v;
  v.observers = observers;
  v.target = target;
  v.witness_rank_gap = NumericalRank(obs) - NumericalRank(obs.topRows(rows));
  v.is_private = v.witness_rank_gap == 1;
  return v;
}

bool AuditReport::all_private() const {
  return std::all_of(overall.begin(), overall.end(),
                     [](const auto& kv) { return kv.second; });
}

AuditReport AuditAll(const Topology& t, int f,
                     const std::vector<AgentId>& observers) {
  AuditReport report;
  report.observers = observers;
  report.max_faulty = f;
  const SubsetTable table(t.agent_count(), f);
  for (const DiscardSet& s : table.sets()) {
    const bool keeps_observers =
        std::none_of(observers.begin(), observers.end(),
                     [&](AgentId u) { return s.contains(u); });
    if (!keeps_observers) continue;
    if (!IsConnectedAfterRemoval(t, s)) {
      report.entries.push_back({s, 0, std::nullopt, "disconnected"});
      continue;
    }
    const WeightMatrix w = DoublyStochastic(t, s);
    for (AgentId v : w.survivors()) {
      if (std::find(observers.begin(), observers.end(), v) != observers.end()) {
        continue;
      }
      PrivacyVerdict verdict = PrivacyHolds(t, w, observers, v);
      auto [it, inserted] = report.overall.try_emplace(v, true);
      it->second = it->second && verdict.is_private;
      report.entries.push_back({s, v, std::move(verdict), ""});
    }
  }
  return report;
}

void WriteAuditCsv(std::ostream& out, const AuditReport& report) {
  const std::string obs = fmt::format("{}", fmt::join(report.observers, " "));
  out << "subnetwork,observer,target,private,rank_gap,note\n";
  for (const AuditEntry& e : report.entries) {
    if (e.verdict) {
      out << fmt::format("{},{},{},{},{},{}\n", e.subnetwork.ToString(), obs,
                         e.target, e.verdict->is_private ? "true" : "false",
                         e.verdict->witness_rank_gap, e.note);
    } else {
      out << fmt::format("{},{},,,,{}\n", e.subnetwork.ToString(), obs, e.note);
    }
  }
}

}  // namespace resilient_consensus
