#pragma once

#include <memory>
#include <string>
#include <vector>

#include "qssm/model.hpp"

namespace qssm {

inline constexpr double kFdStep = 1e-6;
inline constexpr double kGradRelTol = 1e-7;
inline constexpr double kShiftTol = 1e-12;

// Tiny randomized model plus a fixed batch, the shared fixture for all
// derivative cross-checks.
struct GradCheckProblem {
  std::unique_ptr<ModelBundle> bundle;
  std::vector<WindowSample> batch;
};

GradCheckProblem build_gradcheck_problem(std::uint64_t seed,
                                         GateKind kind = GateKind::Quantum);

using NamedGrads = std::vector<std::pair<std::string, Vector>>;

NamedGrads analytic_grads(ModelBundle& bundle,
                          const std::vector<WindowSample>& batch);
// Central differences of the eval-mode loss, one entry at a time.
NamedGrads fd_grads(ModelBundle& bundle, const std::vector<WindowSample>& batch,
                    double step = kFdStep);

struct ParamCheck {
  std::string name;
  double max_rel_err = 0.0;
  double analytic_at_max = 0.0;
  double fd_at_max = 0.0;
  bool passed = true;
};

struct GradCheckReport {
  std::vector<ParamCheck> params;
  double max_rel_err = 0.0;
  std::string worst_param;
  double max_shift_err = 0.0;  // parameter-shift vs analytic circuit slope
  bool passed = false;
};

// rel = |a - n| / max(|a|, |n|, 0.01); the floor turns the comparison
// absolute where both sides are tiny, keeping it above FD noise.
GradCheckReport compare_grads(const NamedGrads& analytic, const NamedGrads& fd,
                              double tol = kGradRelTol);

// Full cross-check: analytic vs finite differences over every parameter,
// plus parameter-shift vs analytic angle slopes for the quantum gate.
GradCheckReport run_gradcheck(std::uint64_t seed,
                              GateKind kind = GateKind::Quantum);

std::string gradcheck_text(const GradCheckReport& report);

}  // namespace qssm
