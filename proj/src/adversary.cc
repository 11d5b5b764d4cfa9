#include "resilient_consensus/adversary.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include <fmt/format.h>

namespace resilient_consensus {

std::string_view ToString(FaultKind kind) {
  switch (kind) {
    case FaultKind::kConstant:
      return "constant";
    case FaultKind::kDampedCosine:
      return "damped_cosine";
    case FaultKind::kDampedSine:
      return "damped_sine";
  }
  return "unknown";
}

FaultKind ParseFaultKind(std::string_view text) {
  if (text == "constant") return FaultKind::kConstant;
  if (text == "damped_cosine") return FaultKind::kDampedCosine;
  if (text == "damped_sine") return FaultKind::kDampedSine;
  throw std::invalid_argument(fmt::format("unknown fault kind '{}'", text));
}

double Eval(const FaultModel& m, int k) {
  if (k < 0) throw std::invalid_argument("Eval: iteration must be >= 0");
  const double kk = static_cast<double>(k);
  switch (m.kind) {
    case FaultKind::kConstant:
      return m.offset;
    case FaultKind::kDampedCosine:
      return m.offset + m.amplitude * std::cos(kk) / (kk + 1.0);
    case FaultKind::kDampedSine:
      return m.offset + m.amplitude * std::sin(kk) / (kk + 1.0);
  }
  return m.offset;
}

double Asymptote(const FaultModel& m) { return m.offset; }

DiscardSet FaultySet(const FaultAssignment& faults) {
  std::vector<AgentId> ids;
  ids.reserve(faults.size());
  for (const auto& [id, model] : faults) ids.push_back(id);
  return DiscardSet(std::move(ids));
}

}  // namespace resilient_consensus
