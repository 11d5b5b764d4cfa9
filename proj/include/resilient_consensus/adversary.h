#pragma once

#include <map>
#include <string>
#include <string_view>

#include "resilient_consensus/topology.h"

namespace resilient_consensus {

enum class FaultKind { kConstant, kDampedCosine, kDampedSine };

std::string_view ToString(FaultKind kind);
/// Accepts "constant", "damped_cosine", "damped_sine".
FaultKind ParseFaultKind(std::string_view text);

/// A faulty agent's broadcast trajectory, c + a·g(k)/(k+1) with
/// g ∈ {0, cos, sin}. Every kind converges to c.
struct FaultModel {
  FaultKind kind = FaultKind::kConstant;
  double offset = 0.0;
  double amplitude = 0.0;

  static FaultModel Constant(double c) { return {FaultKind::kConstant, c, 0.0}; }
  static FaultModel DampedCosine(double c, double a) {
    return {FaultKind::kDampedCosine, c, a};
  }
  static FaultModel DampedSine(double c, double a) {
    return {FaultKind::kDampedSine, c, a};
  }

  friend bool operator==(const FaultModel&, const FaultModel&) = default;
};

/// Throws std::invalid_argument for k < 0.
double Eval(const FaultModel& m, int k);
double Asymptote(const FaultModel& m);

/// Keys are the faulty agents.
using FaultAssignment = std::map<AgentId, FaultModel>;

DiscardSet FaultySet(const FaultAssignment& faults);

}  // namespace resilient_consensus
