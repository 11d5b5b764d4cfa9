#include "resilient_consensus/config.h"

#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

namespace resilient_consensus {
namespace {

template <typename T>
T Get(const YAML::Node& root, const char* key, T fallback) {
  const YAML::Node n = root[key];
  if (!n) return fallback;
  try {
    return n.as<T>();
  } catch (const YAML::Exception& e) {
    throw ConfigError(fmt::format("bad value for '{}': {}", key, e.what()));
  }
}

template <typename T>
T Require(const YAML::Node& root, const char* key) {
  if (!root[key]) throw ConfigError(fmt::format("missing key '{}'", key));
  return Get<T>(root, key, T{});
}

Topology ReadTopology(const YAML::Node& root,
                      const std::filesystem::path& base_dir) {
  const int n = Get<int>(root, "agents", 0);
  const int sources = (root["topology"] ? 1 : 0) + (root["edges"] ? 1 : 0) +
                      (root["edge_file"] ? 1 : 0);
  if (sources != 1) {
    throw ConfigError("give exactly one of 'topology', 'edges', 'edge_file'");
  }
  if (root["topology"]) {
    Topology t = MakeBuiltin(Get<std::string>(root, "topology", ""));
    if (n != 0 && n != t.agent_count()) {
      throw ConfigError(fmt::format("agents={} but topology has {} agents", n,
                                    t.agent_count()));
    }
    return t;
  }
  if (root["edge_file"]) {
    std::filesystem::path p = Get<std::string>(root, "edge_file", "");
    if (p.is_relative()) p = base_dir / p;
    std::ifstream in(p);
    if (!in) throw ConfigError(fmt::format("cannot open edge file {}", p.string()));
    return ParseEdgeList(in, n);
  }
  const auto pairs = Get<std::vector<std::vector<int>>>(root, "edges", {});
  std::vector<Topology::Edge> edges;
  int largest = 0;
  for (const auto& e : pairs) {
    if (e.size() != 2) throw ConfigError("each edge needs exactly two agents");
    edges.emplace_back(e[0], e[1]);
    largest = std::max({largest, e[0], e[1]});
  }
  return Topology(n != 0 ? n : largest, edges);
}

FaultAssignment ReadFaults(const YAML::Node& root) {
  FaultAssignment faults;
  const YAML::Node node = root["faults"];
  if (!node) return faults;
  if (!node.IsMap()) throw ConfigError("'faults' must map agent ids to models");
  for (const auto& kv : node) {
    const int id = kv.first.as<int>();
    const YAML::Node m = kv.second;
    FaultModel model;
    model.kind = ParseFaultKind(Get<std::string>(m, "kind", "constant"));
    model.offset = Get<double>(m, "c", 0.0);
    model.amplitude = Get<double>(m, "a", 0.0);
    faults.emplace(id, model);
  }
  return faults;
}

NoiseKind ParseNoiseKind(const std::string& s) {
  if (s == "plain") return NoiseKind::kPlain;
  if (s == "bounded") return NoiseKind::kBounded;
  throw ConfigError(fmt::format("unknown noise_policy '{}'", s));
}

SelectionRule ParseSelector(const std::string& s) {
  if (s == "pivot_consistent") return SelectionRule::kPivotConsistent;
  if (s == "first_distinct") return SelectionRule::kFirstDistinct;
  throw ConfigError(fmt::format("unknown selector '{}'", s));
}

}  // namespace

ExperimentConfig ParseConfig(const std::string& yaml_text,
                             const std::filesystem::path& base_dir) {
  ExperimentConfig cfg;
  try {
    const YAML::Node root = YAML::Load(yaml_text);
    if (!root.IsMap()) throw ConfigError("config must be a mapping");
    SimConfig& sim = cfg.sim;
    sim.topology = ReadTopology(root, base_dir);
    sim.x0 = Require<std::vector<double>>(root, "x0");
    sim.faults = ReadFaults(root);
    sim.max_faulty = Get<int>(root, "f", 0);
    sim.iterations = Require<int>(root, "iterations");
    sim.noise.noisy_iterations = Get<int>(root, "noisy_iterations", 0);
    sim.noise.xi = Get<double>(root, "xi", 0.0);
    sim.noise.kind = ParseNoiseKind(Get<std::string>(root, "noise_policy", "plain"));
    sim.selector.eps = Get<double>(root, "eps", 1e-6);
    sim.selector.dominance = Get<double>(root, "dominance", 0.0);
    sim.selector.rule =
        ParseSelector(Get<std::string>(root, "selector", "pivot_consistent"));
    sim.seed = Get<std::uint64_t>(root, "seed", 0);
    cfg.output = Get<std::string>(root, "output", cfg.output);
    CheckConfig(sim);
  } catch (const ConfigError&) {
    throw;
  } catch (const YAML::Exception& e) {
    throw ConfigError(fmt::format("YAML: {}", e.what()));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

ExperimentConfig LoadConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config {}", path.string()));
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseConfig(buf.str(), path.parent_path());
}

}  // namespace resilient_consensus
