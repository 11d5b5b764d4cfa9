// Acceptance gate: one PASS/FAIL line per criterion. Exit status is nonzero
// when any criterion fails.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "resilient_consensus/config.h"
#include "resilient_consensus/engine.h"
#include "resilient_consensus/oracle.h"
#include "resilient_consensus/privacy.h"
#include "resilient_consensus/trace_io.h"
#include "test_support.h"

namespace rc = resilient_consensus;
namespace fs = std::filesystem;
using rc::DiscardSet;
using rc::Topology;

namespace {

const fs::path kConfigs = CONFIG_DIR;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double Seconds(const std::function<void()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Worst |selected - target| over non-faulty agents at the last iteration, and
// whether every one of them selected exactly the faulty set.
std::pair<double, bool> FinalError(const rc::RunTrace& trace, double target) {
  double worst = 0.0;
  bool sets_ok = true;
  const auto last = trace.selected.rows() - 1;
  for (int j = 1; j <= trace.agent_count; ++j) {
    if (trace.faulty.contains(j)) continue;
    worst = std::max(worst, std::abs(trace.selected(last, j - 1) - target));
    const auto b = trace.selected_block.back()[static_cast<std::size_t>(j - 1)];
    sets_ok = sets_ok && trace.blocks[b] == trace.faulty;
  }
  return {worst, sets_ok};
}

Outcome ExampleOne() {
  const auto cfg = rc::LoadConfig(kConfigs / "example1.yaml");
  rc::RunTrace trace;
  const double secs = Seconds([&] { trace = rc::Run(cfg.sim); });
  const double target = rc::CleanAverage(trace.initial_states, trace.faulty);
  auto [err, sets_ok] = FinalError(trace, target);
  const bool pass = trace.faulty == DiscardSet({1}) && std::abs(target - 0.4875) < 1e-12 &&
                    err <= 1e-3 && sets_ok && secs < 1.0;
  return {pass, fmt::format("target={:.10g} max_err={:.3e} selected_F={} runtime={:.3f}s",
                            target, err, sets_ok, secs)};
}

Outcome ExampleTwo() {
  const auto cfg = rc::LoadConfig(kConfigs / "example2.yaml");
  rc::RunTrace trace;
  const double secs = Seconds([&] { trace = rc::Run(cfg.sim); });
  const double target = rc::CleanAverage(trace.initial_states, trace.faulty);
  auto [err, sets_ok] = FinalError(trace, target);
  const bool pass = trace.faulty == DiscardSet({1, 2, 3}) && err <= 5e-3 && secs < 30.0 &&
                    trace.blocks.size() == 176;
  return {pass, fmt::format("subnetworks={} target={:.12g} max_err={:.3e} selected_F={} "
                            "runtime={:.3f}s",
                            trace.blocks.size(), target, err, sets_ok, secs)};
}

Outcome SumConservation() {
  std::mt19937_64 rng(301);
  const double xis[] = {0.1, 1.0};
  const int ts[] = {1, 5, 10};
  double worst = 0.0;
  int runs = 0;
  for (int i = 0; i < 100; ++i) {
    const int n = std::uniform_int_distribution<int>(2, 8)(rng);
    rc::SimConfig c{.topology = rc_test::RandomConnected(n, 0.5, rng)};
    c.x0.resize(static_cast<std::size_t>(n));
    for (double& x : c.x0) x = std::uniform_real_distribution<double>(-5, 5)(rng);
    c.noise = {i % 2 ? rc::NoiseKind::kBounded : rc::NoiseKind::kPlain, xis[i % 2], ts[i % 3]};
    c.iterations = c.noise.noisy_iterations + 2;
    c.seed = rng();
    auto trace = rc::Run(c);
    if (!trace.sum_residual) return {false, "missing residual"};
    worst = std::max(worst, *trace.sum_residual);
    ++runs;
  }
  return {worst <= 1e-9, fmt::format("runs={} worst_residual={:.3e}", runs, worst)};
}

Outcome OracleEquivalence() {
  std::mt19937_64 rng(401);
  std::uniform_real_distribution<double> unit(0, 1);
  double worst_value = 0.0, worst_row = 0.0;
  int blocks = 0;
  for (int i = 0; i < 100; ++i) {
    const int n = std::uniform_int_distribution<int>(3, 7)(rng);
    const int f = std::uniform_int_distribution<int>(0, 2)(rng);
    Topology t = rc_test::RandomConnected(n, 0.6, rng);
    if (!rc::Validate(t, f).connected_after_every_discard) {
      --i;
      continue;
    }
    rc::SimConfig c{.topology = t};
    c.max_faulty = f;
    c.x0.resize(static_cast<std::size_t>(n));
    for (double& x : c.x0) x = unit(rng);
    const int bad = std::uniform_int_distribution<int>(1, n)(rng);
    c.faults.emplace(bad, rc::FaultModel::Constant(3 * unit(rng) - 1));
    c.iterations = 2001;
    c.noise = {rc::NoiseKind::kBounded, 0.1, 10};
    c.seed = rng();
    c.record_blocks = true;
    auto trace = rc::Run(c);
    const auto& last = trace.block_values.back();
    for (std::size_t b = 0; b < trace.blocks.size(); ++b) {
      const DiscardSet& s = trace.blocks[b];
      if (s.contains(bad)) continue;
      auto w = rc::DoublyStochastic(t, s);
      auto r = rc::StubbornLimit(t, s, w, c.faults);
      for (Eigen::Index k = 0; k < r.convex_weights.rows(); ++k) {
        worst_row = std::max(worst_row, std::abs(r.convex_weights.row(k).sum() - 1.0));
      }
      for (std::size_t k = 0; k < r.partition.regular.size(); ++k) {
        const int j = r.partition.regular[k];
        worst_value = std::max(worst_value, std::abs(last(j - 1, static_cast<Eigen::Index>(b)) -
                                                     r.limits(static_cast<Eigen::Index>(k))));
      }
      ++blocks;
    }
  }
  return {worst_value <= 1e-8 && worst_row <= 1e-10,
          fmt::format("instances=100 contaminated_blocks={} worst_value_err={:.3e} "
                      "worst_row_sum_err={:.3e}",
                      blocks, worst_value, worst_row)};
}

Outcome Soundness() {
  std::mt19937_64 rng(501);
  constexpr int kIterations = 1500;
  int failures = 0, with_faults = 0, latest_settle = 0;
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    auto c = rc_test::RandomSoundInstance(rng, kIterations);
    auto trace = rc::Run(c);
    with_faults += !c.faults.empty();
    const double target = rc::CleanAverage(trace.initial_states, trace.faulty);
    auto [err, sets_ok] = FinalError(trace, target);
    worst = std::max(worst, err);
    latest_settle = std::max(latest_settle, trace.settling_iteration);
    // Stable over the last third of the run.
    const bool stable = trace.settling_iteration <= 2 * kIterations / 3;
    if (err > 1e-4 || !sets_ok || !stable) ++failures;
  }
  return {failures == 0,
          fmt::format("instances=50 with_faults={} failures={} worst_err={:.3e} "
                      "latest_settling={}",
                      with_faults, failures, worst, latest_settle)};
}

Outcome PrivacyAgreement() {
  std::mt19937_64 rng(601);
  int disagreements = 0, pairs = 0;
  for (int i = 0; i < 200; ++i) {
    const int n = std::uniform_int_distribution<int>(2, 8)(rng);
    Topology t = rc_test::RandomConnected(n, std::uniform_real_distribution<double>(0.2, 0.9)(rng), rng);
    auto w = rc::DoublyStochastic(t, {});
    for (int u = 1; u <= n; ++u) {
      for (int v = 1; v <= n; ++v) {
        if (u == v) continue;
        ++pairs;
        disagreements += rc::PrivacyHolds(t, w, u, v).is_private !=
                         rc_test::GraphConditionPrivate(t, u, v);
      }
    }
  }
  const Topology star = rc::builtin::Star(6);
  auto ws = rc::DoublyStochastic(star, {});
  bool star_ok = true;
  for (int leaf = 2; leaf <= 6; ++leaf) {
    star_ok = star_ok && !rc::PrivacyHolds(star, ws, 1, leaf).is_private;
  }
  const Topology g1 = rc::builtin::G1Example();
  int exposed = 0;
  std::string exposures;
  for (int u = 1; u <= 5; ++u) {
    for (const auto& [target, ok] : rc::AuditAll(g1, 1, {u}).overall) {
      if (!ok) {
        ++exposed;
        exposures += fmt::format(" {}->{}", u, target);
      }
    }
  }
  const bool g1_ok = exposed == 0;
  return {disagreements == 0 && star_ok && g1_ok,
          fmt::format("pairs={} disagreements={} star_center_sees_all_leaves={} "
                      "g1_all_private={} (exposed observer->target:{})",
                      pairs, disagreements, star_ok, g1_ok, exposures.empty() ? " none" : exposures)};
}

Outcome DoublyStochasticSuite() {
  std::mt19937_64 rng(701);
  double worst_sum = 0.0, worst_power = 0.0;
  bool symmetric = true;
  int matrices = 0, powered = 0;
  for (int i = 0; i < 100; ++i) {
    const int n = std::uniform_int_distribution<int>(2, 10)(rng);
    const int f = std::min(n - 1, std::uniform_int_distribution<int>(0, 2)(rng));
    Topology t = rc_test::RandomConnected(n, 0.5, rng);
    rc::SubsetTable table(n, f);
    for (const DiscardSet& s : table.sets()) {
      auto w = rc::DoublyStochastic(t, s);
      ++matrices;
      symmetric = symmetric && w.entries() == w.entries().transpose();
      const Eigen::MatrixXd b = w.SurvivingBlock();
      worst_sum = std::max({worst_sum, (b.rowwise().sum().array() - 1.0).abs().maxCoeff(),
                            (b.colwise().sum().array() - 1.0).abs().maxCoeff()});
      if (!rc_test::BfsConnected(n, t.edges(), rc_test::ToSet(s))) continue;
      const auto m = b.rows();
      Eigen::MatrixXd p = Eigen::MatrixXd::Identity(m, m);
      for (int k = 0; k < 500; ++k) p = p * b;
      const Eigen::MatrixXd j = Eigen::MatrixXd::Constant(m, m, 1.0 / static_cast<double>(m));
      worst_power = std::max(worst_power, (p - j).cwiseAbs().rowwise().sum().maxCoeff());
      ++powered;
    }
  }
  return {worst_sum <= 1e-12 && symmetric && worst_power <= 1e-9,
          fmt::format("graphs=100 matrices={} worst_sum_err={:.3e} symmetric={} "
                      "connected_blocks={} worst_power_err={:.3e}",
                      matrices, worst_sum, symmetric, powered, worst_power)};
}

Outcome Determinism() {
  bool same = true;
  std::size_t bytes = 0;
  for (const char* name : {"example1.yaml", "example2.yaml"}) {
    auto cfg = rc::LoadConfig(kConfigs / name);
    cfg.sim.record_blocks = true;
    std::string first;
    for (int rep = 0; rep < 3; ++rep) {
      std::ostringstream csv;
      rc::WriteTraceCsv(csv, rc::Run(cfg.sim), true);
      if (rep == 0) {
        first = csv.str();
        bytes += first.size();
      } else {
        same = same && csv.str() == first;
      }
    }
  }
  return {same, fmt::format("configs=2 repeats=3 identical={} bytes_per_pass={}", same, bytes)};
}

}  // namespace

int main() {
  const std::pair<const char*, Outcome (*)()> criteria[] = {
      {"example I reproduction", ExampleOne},
      {"example II reproduction", ExampleTwo},
      {"sum conservation", SumConservation},
      {"stubborn-limit oracle equivalence", OracleEquivalence},
      {"soundness property suite", Soundness},
      {"privacy auditor agreement", PrivacyAgreement},
      {"doubly-stochastic suite", DoublyStochasticSuite},
      {"determinism", Determinism},
  };
  int failed = 0;
  int index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, fmt::format("exception: {}", e.what())};
    }
    failed += !o.pass;
    fmt::print("{} criterion {}: {} | {}\n", o.pass ? "PASS" : "FAIL", index, name, o.detail);
  }
  fmt::print("{} of {} criteria passed\n", index - failed, index);
  return failed == 0 ? 0 : 1;
}
