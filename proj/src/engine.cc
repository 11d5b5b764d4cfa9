#include "resilient_consensus/engine.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <fmt/format.h>

namespace resilient_consensus {
namespace {

constexpr double kInert = std::numeric_limits<double>::quiet_NaN();

bool IsFaulty(const FaultAssignment& faults, AgentId v) {
  return faults.find(v) != faults.end();
}

// Per-block verdict of the pivot test.
struct Pivot {
  AgentId agent = 0;
  double ratio = 0.0;  // runner-up deviation / largest deviation
};

Selection SelectPivotConsistent(const AgentState& agent,
                                const SubsetTable& table,
                                const SelectorOptions& opt) {
  const int n = table.agent_count();
  const int f = table.max_faulty();
  const auto& w = agent.values;
  const auto& sets = table.sets();

  std::vector<std::optional<Pivot>> pivots(table.size());
  for (std::size_t o = 0; o < table.size(); ++o) {
    if (static_cast<int>(sets[o].size()) >= f) break;  // canonical: sizes grow
    if (sets[o].contains(agent.id)) continue;
    double best = -1.0, runner_up = 0.0;
    AgentId best_agent = 0;
    for (AgentId v = 1; v <= n; ++v) {
      if (v == agent.id) continue;
      auto ext = table.extend(o, v);
      if (!ext) continue;
      const double d = std::abs(w[*ext] - w[o]);
      if (d > best) {
        runner_up = std::max(runner_up, best);
        best = d;
        best_agent = v;
      } else {
        runner_up = std::max(runner_up, d);
      }
    }
    if (best_agent == 0 || !(best > opt.eps)) continue;
    if (runner_up <= std::max(opt.eps, opt.dominance * best)) {
      pivots[o] = Pivot{best_agent, runner_up / best};
    }
  }

  std::size_t chosen = 0;
  double chosen_score = std::numeric_limits<double>::infinity();
  for (std::size_t o = 1; o < table.size(); ++o) {
    const DiscardSet& s = sets[o];
    if (s.contains(agent.id)) continue;
    double score = 0.0;
    bool consistent = true;
    for (AgentId u : s.members()) {
      const auto& p = pivots[*table.shrink(o, u)];
      if (!p || p->agent != u) {
        consistent = false;
        break;
      }
      score = std::max(score, p->ratio);
    }
    if (consistent && score < chosen_score) {
      chosen = o;
      chosen_score = score;
    }
  }
  return {w[chosen], chosen};
}

Selection SelectFirstDistinct(const AgentState& agent,
                              const SubsetTable& table,
                              const SelectorOptions& opt) {
  const int f = table.max_faulty();
  const auto& w = agent.values;
  const auto& sets = table.sets();
  auto live = [&](std::size_t o) { return !sets[o].contains(agent.id); };

  if (f >= 1) {
    bool all_differ = true;
    for (std::size_t o = 1; o < table.size() && sets[o].size() == 1; ++o) {
      if (live(o) && !(std::abs(w[o] - w[0]) > opt.eps)) {
        all_differ = false;
        break;
      }
    }
    if (all_differ) return {w[0], 0};
  }
  for (int level = 1; level <= f; ++level) {
    for (std::size_t o = 0; o < table.size(); ++o) {
      if (static_cast<int>(sets[o].size()) != level || !live(o)) continue;
      bool distinct = true;
      for (std::size_t p = 0; p < table.size(); ++p) {
        if (static_cast<int>(sets[p].size()) > level) break;
        if (p == o || !live(p)) continue;
        if (!(std::abs(w[p] - w[o]) > opt.eps)) {
          distinct = false;
          break;
        }
      }
      if (distinct) return {w[o], o};
    }
  }
  return {w[0], 0};
}

}  // namespace

double NoiseIncrement(double ledger, int k, const NoisePolicy& policy,
                      double theta) {
  if (k < policy.noisy_iterations) {
    if (policy.kind == NoiseKind::kBounded && ledger > 0.0) return -theta;
    return theta;
  }
  return -ledger;
}

double InjectNoise(AgentState& agent, int k, const NoisePolicy& policy,
                   std::mt19937_64& rng) {
  double theta = 0.0;
  if (k < policy.noisy_iterations && policy.xi > 0.0) {
    theta = std::normal_distribution<double>(0.0, policy.xi)(rng);
  }
  const double eta = NoiseIncrement(agent.noise_ledger, k, policy, theta);
  agent.noise_ledger += eta;
  for (double& x : agent.values) x += eta;
  return eta;
}

void ConsensusStep(std::vector<AgentState>& agents,
                   std::span<const WeightMatrix> weights, const Topology& t,
                   const SubsetTable& table, const FaultAssignment& faults,
                   int k) {
  const int n = t.agent_count();
  if (weights.size() != table.size() || table.agent_count() != n ||
      static_cast<int>(agents.size()) != n) {
    throw std::invalid_argument("ConsensusStep: dimension mismatch");
  }
  std::vector<std::vector<double>> next(agents.size());
  for (const AgentState& a : agents) {
    const auto j = static_cast<std::size_t>(a.id - 1);
    if (a.values.size() != table.size()) {
      throw std::invalid_argument("ConsensusStep: augmented state size");
    }
    if (auto it = faults.find(a.id); it != faults.end()) {
      next[j].assign(table.size(), Eval(it->second, k));
      continue;
    }
    next[j].resize(table.size());
    for (std::size_t b = 0; b < table.size(); ++b) {
      const DiscardSet& s = table.at(b);
      if (s.contains(a.id)) {
        next[j][b] = kInert;
        continue;
      }
      const WeightMatrix& w = weights[b];
      double acc = w(a.id, a.id) * a.values[b];
      for (AgentId v : t.neighbors(a.id)) {
        if (s.contains(v)) continue;
        acc += w(a.id, v) * agents[static_cast<std::size_t>(v - 1)].values[b];
      }
      next[j][b] = acc;
    }
  }
  for (AgentState& a : agents) {
    a.values = std::move(next[static_cast<std::size_t>(a.id - 1)]);
  }
}

Selection SelectState(const AgentState& agent, const SubsetTable& table,
                      const SelectorOptions& options) {
  if (agent.values.size() != table.size()) {
    throw std::invalid_argument("SelectState: augmented state size");
  }
  switch (options.rule) {
    case SelectionRule::kPivotConsistent:
      return SelectPivotConsistent(agent, table, options);
    case SelectionRule::kFirstDistinct:
      return SelectFirstDistinct(agent, table, options);
  }
  return {agent.values[0], 0};
}

void CheckConfig(const SimConfig& c) {
  const int n = c.topology.agent_count();
  if (static_cast<int>(c.x0.size()) != n) {
    throw std::invalid_argument(
        fmt::format("x0 has {} entries for {} agents", c.x0.size(), n));
  }
  if (c.max_faulty < 0 || c.max_faulty >= n) {
    throw std::invalid_argument(
        fmt::format("max faulty f={} must satisfy 0 <= f < n={}",
                    c.max_faulty, n));
  }
  if (c.iterations < 1) throw std::invalid_argument("need N >= 1 iterations");
  if (c.noise.noisy_iterations < 0 ||
      c.noise.noisy_iterations >= c.iterations) {
    throw std::invalid_argument(
        fmt::format("noisy iterations T={} must satisfy 0 <= T < N={}",
                    c.noise.noisy_iterations, c.iterations));
  }
  if (!(c.noise.xi >= 0.0)) throw std::invalid_argument("need xi >= 0");
  if (!(c.selector.eps >= 0.0) || !(c.selector.dominance >= 0.0)) {
    throw std::invalid_argument("selector tolerances must be >= 0");
  }
  for (const auto& [id, model] : c.faults) {
    if (id < 1 || id > n) {
      throw std::invalid_argument(
          fmt::format("faulty agent {} outside 1..{}", id, n));
    }
  }
  if (static_cast<int>(c.faults.size()) >= n) {
    throw std::invalid_argument("at least one agent must be non-faulty");
  }
}

RunTrace Run(const SimConfig& config) {
  CheckConfig(config);
  const Topology& t = config.topology;
  const int n = t.agent_count();
  const SubsetTable table(n, config.max_faulty);
  const std::vector<WeightMatrix> weights = BuildAll(t, table);
  const auto r = table.size();
  std::mt19937_64 rng(config.seed);

  RunTrace trace;
  trace.agent_count = n;
  trace.max_faulty = config.max_faulty;
  trace.iterations = config.iterations;
  trace.noisy_iterations = config.noise.noisy_iterations;
  trace.faulty = FaultySet(config.faults);
  trace.fault_bound_exceeded =
      static_cast<int>(config.faults.size()) > config.max_faulty;
  trace.blocks = table.sets();
  trace.selected = Eigen::MatrixXd::Zero(config.iterations, n);
  trace.selected_block.assign(static_cast<std::size_t>(config.iterations),
                              std::vector<std::size_t>(static_cast<std::size_t>(n), 0));
  trace.initial_states = config.x0;
  for (const auto& [id, model] : config.faults) {
    trace.initial_states[static_cast<std::size_t>(id - 1)] = Eval(model, 0);
  }

  std::vector<AgentState> agents(static_cast<std::size_t>(n));
  for (AgentId j = 1; j <= n; ++j) {
    AgentState& a = agents[static_cast<std::size_t>(j - 1)];
    a.id = j;
    a.values.resize(r);
    for (std::size_t b = 0; b < r; ++b) {
      a.values[b] = table.at(b).contains(j) ? kInert : config.x0[static_cast<std::size_t>(j - 1)];
    }
  }

  const std::optional<std::size_t> clean_block =
      trace.fault_bound_exceeded ? std::nullopt : table.find(trace.faulty);
  const int residual_at = config.noise.noisy_iterations + 1;

  auto record = [&](int k) {
    for (AgentState& a : agents) {
      const auto j = static_cast<std::size_t>(a.id - 1);
      if (auto it = config.faults.find(a.id); it != config.faults.end()) {
        a.selected = Eval(it->second, k);
        a.selected_block = 0;
      } else {
        const Selection sel = SelectState(a, table, config.selector);
        a.selected = sel.value;
        a.selected_block = sel.block;
      }
      trace.selected(k, static_cast<Eigen::Index>(j)) = a.selected;
      trace.selected_block[static_cast<std::size_t>(k)][j] = a.selected_block;
    }
    if (config.record_blocks) {
      Eigen::MatrixXd snapshot(n, static_cast<Eigen::Index>(r));
      for (const AgentState& a : agents) {
        for (std::size_t b = 0; b < r; ++b) {
          snapshot(a.id - 1, static_cast<Eigen::Index>(b)) = a.values[b];
        }
      }
      trace.block_values.push_back(std::move(snapshot));
    }
    if (clean_block && k == residual_at) {
      double sum = 0.0, sum0 = 0.0;
      for (const AgentState& a : agents) {
        if (trace.faulty.contains(a.id)) continue;
        sum += a.values[*clean_block];
        sum0 += config.x0[static_cast<std::size_t>(a.id - 1)];
      }
      trace.sum_residual = std::abs(sum - sum0);
    }
  };

  for (AgentState& a : agents) {
    if (!IsFaulty(config.faults, a.id)) InjectNoise(a, 0, config.noise, rng);
  }
  for (const auto& [id, model] : config.faults) {
    auto& a = agents[static_cast<std::size_t>(id - 1)];
    std::fill(a.values.begin(), a.values.end(), Eval(model, 0));
  }
  record(0);

  for (int k = 1; k < config.iterations; ++k) {
    ConsensusStep(agents, weights, t, table, config.faults, k);
    for (AgentState& a : agents) {
      if (!IsFaulty(config.faults, a.id)) InjectNoise(a, k, config.noise, rng);
    }
    record(k);
  }

  int settle = 0;
  for (int k = 1; k < config.iterations; ++k) {
    for (AgentId j = 1; j <= n; ++j) {
      if (trace.faulty.contains(j)) continue;
      const auto jj = static_cast<std::size_t>(j - 1);
      if (trace.selected_block[static_cast<std::size_t>(k)][jj] !=
          trace.selected_block[static_cast<std::size_t>(k - 1)][jj]) {
        settle = k;
      }
    }
  }
  trace.settling_iteration = settle;
  return trace;
}

}  // namespace resilient_consensus
