#include "resilient_consensus/trace_io.h"

#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>
#include <fmt/ranges.h>
#include <json.hpp>

#include "resilient_consensus/oracle.h"

namespace resilient_consensus {
namespace {

std::string Real(double x) { return fmt::format("{:.17g}", x); }

double ParseReal(std::string_view s) {
  if (s == "nan" || s == "-nan") return std::nan("");
  double x = 0.0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw std::runtime_error(fmt::format("trace: bad number '{}'", s));
  }
  return x;
}

int ParseInt(std::string_view s) {
  int x = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw std::runtime_error(fmt::format("trace: bad integer '{}'", s));
  }
  return x;
}

std::vector<std::string_view> Split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

RunReport MakeReport(const RunTrace& trace) {
  RunReport r;
  r.agent_count = trace.agent_count;
  r.max_faulty = trace.max_faulty;
  r.faulty = trace.faulty;
  r.fault_bound_exceeded = trace.fault_bound_exceeded;
  r.target = CleanAverage(trace.initial_states, trace.faulty);
  const auto last = trace.selected.rows() - 1;
  for (AgentId j = 1; j <= trace.agent_count; ++j) {
    const double x = trace.selected(last, j - 1);
    r.final_states.push_back(x);
    r.final_sets.push_back(
        trace.blocks.at(trace.selected_block.back()[static_cast<std::size_t>(j - 1)]));
    if (!trace.faulty.contains(j)) {
      r.max_error = std::max(r.max_error, std::abs(x - r.target));
    }
  }
  r.settling_iteration = trace.settling_iteration;
  r.sum_residual = trace.sum_residual;
  return r;
}

std::string ReportJson(const RunReport& r) {
  nlohmann::ordered_json j;
  j["agents"] = r.agent_count;
  j["max_faulty"] = r.max_faulty;
  j["faulty"] = r.faulty.members();
  j["fault_bound_exceeded"] = r.fault_bound_exceeded;
  j["target"] = r.target;
  j["max_error"] = r.max_error;
  j["settling_iteration"] = r.settling_iteration;
  j["sum_conservation_residual"] =
      r.sum_residual ? nlohmann::ordered_json(*r.sum_residual) : nullptr;
  auto& agents = j["final"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < r.final_states.size(); ++i) {
    agents.push_back({{"agent", i + 1},
                      {"state", r.final_states[i]},
                      {"set", r.final_sets[i].ToString()},
                      {"faulty", r.faulty.contains(static_cast<AgentId>(i + 1))}});
  }
  return j.dump(2) + "\n";
}

void WriteTraceCsv(std::ostream& out, const RunTrace& trace, bool full_trace) {
  if (full_trace && trace.block_values.size() !=
                        static_cast<std::size_t>(trace.iterations)) {
    throw std::invalid_argument("full trace needs a run with record_blocks");
  }
  out << "# n=" << trace.agent_count << "\n";
  out << "# f=" << trace.max_faulty << "\n";
  out << "# iterations=" << trace.iterations << "\n";
  out << "# noisy_iterations=" << trace.noisy_iterations << "\n";
  out << "# faulty=" << trace.faulty.ToString() << "\n";
  out << "# fault_bound_exceeded=" << (trace.fault_bound_exceeded ? 1 : 0) << "\n";
  std::vector<std::string> x0;
  for (double x : trace.initial_states) x0.push_back(Real(x));
  out << "# x0=" << fmt::format("{}", fmt::join(x0, " ")) << "\n";
  out << "# settling_iteration=" << trace.settling_iteration << "\n";
  out << "# sum_conservation_residual="
      << (trace.sum_residual ? Real(*trace.sum_residual) : "none") << "\n";

  out << "iteration,agent,selected_state,selected_set";
  if (full_trace) {
    for (const DiscardSet& s : trace.blocks) out << ",block" << s.ToString();
  }
  out << "\n";
  for (int k = 0; k < trace.iterations; ++k) {
    for (int j = 0; j < trace.agent_count; ++j) {
      const auto block =
          trace.selected_block[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)];
      out << k << ',' << j + 1 << ',' << Real(trace.selected(k, j)) << ','
          << trace.blocks[block].ToString();
      if (full_trace) {
        const auto& b = trace.block_values[static_cast<std::size_t>(k)];
        for (Eigen::Index c = 0; c < b.cols(); ++c) out << ',' << Real(b(j, c));
      }
      out << '\n';
    }
  }
}

RunTrace ReadTraceCsv(std::istream& in) {
  std::map<std::string, std::string, std::less<>> meta;
  std::string line;
  while (std::getline(in, line) && line.starts_with("# ")) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::runtime_error("trace: bad metadata");
    meta[line.substr(2, eq - 2)] = line.substr(eq + 1);
  }
  auto need = [&](const char* key) -> const std::string& {
    auto it = meta.find(key);
    if (it == meta.end()) {
      throw std::runtime_error(fmt::format("trace: missing '{}'", key));
    }
    return it->second;
  };

  RunTrace t;
  t.agent_count = ParseInt(need("n"));
  t.max_faulty = ParseInt(need("f"));
  t.iterations = ParseInt(need("iterations"));
  t.noisy_iterations = ParseInt(need("noisy_iterations"));
  t.faulty = DiscardSet::Parse(need("faulty"));
  t.fault_bound_exceeded = need("fault_bound_exceeded") == "1";
  for (std::string_view x : Split(need("x0"), ' ')) {
    t.initial_states.push_back(ParseReal(x));
  }
  t.settling_iteration = ParseInt(need("settling_iteration"));
  if (const auto& r = need("sum_conservation_residual"); r != "none") {
    t.sum_residual = ParseReal(r);
  }
  const SubsetTable table(t.agent_count, t.max_faulty);
  t.blocks = table.sets();

  const auto header = Split(line, ',');
  if (header.size() < 4 || header[0] != "iteration") {
    throw std::runtime_error("trace: bad header");
  }
  const std::size_t block_cols = header.size() - 4;
  if (block_cols != 0 && block_cols != table.size()) {
    throw std::runtime_error("trace: block column count");
  }
  t.selected.resize(t.iterations, t.agent_count);
  t.selected_block.assign(static_cast<std::size_t>(t.iterations),
                          std::vector<std::size_t>(static_cast<std::size_t>(t.agent_count)));
  if (block_cols != 0) {
    t.block_values.assign(static_cast<std::size_t>(t.iterations),
                          Eigen::MatrixXd(t.agent_count, static_cast<Eigen::Index>(block_cols)));
  }
  long rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = Split(line, ',');
    if (cells.size() != header.size()) throw std::runtime_error("trace: row width");
    const int k = ParseInt(cells[0]);
    const int j = ParseInt(cells[1]);
    if (k < 0 || k >= t.iterations || j < 1 || j > t.agent_count) {
      throw std::runtime_error("trace: row index out of range");
    }
    t.selected(k, j - 1) = ParseReal(cells[2]);
    t.selected_block[static_cast<std::size_t>(k)][static_cast<std::size_t>(j - 1)] =
        table.index_of(DiscardSet::Parse(cells[3]));
    for (std::size_t c = 0; c < block_cols; ++c) {
      t.block_values[static_cast<std::size_t>(k)](j - 1, static_cast<Eigen::Index>(c)) =
          ParseReal(cells[4 + c]);
    }
    ++rows;
  }
  if (rows != static_cast<long>(t.iterations) * t.agent_count) {
    throw std::runtime_error("trace: row count");
  }
  return t;
}

}  // namespace resilient_consensus
