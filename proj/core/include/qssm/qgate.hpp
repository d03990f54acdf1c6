#pragma once

#include <complex>
#include <span>

#include "qssm/tensor.hpp"

namespace qssm {

/// Single-qubit statevector: amplitudes of |0> and |1>.
struct QubitState {
  std::complex<double> amp0{1.0, 0.0};
  std::complex<double> amp1{0.0, 0.0};
};

/// Trainables of the variational gate: two independent RY-RX circuits,
/// a linear mixer over their Z expectations, and the clamp bounds.
struct GateParams {
  double theta1 = 0.0;
  double phi1 = 0.0;
  double theta2 = 0.0;
  double phi2 = 0.0;
  double w1 = 0.0;
  double w2 = 0.0;
  double b_g = 0.0;
  double g_min = 0.05;
  double g_max = 0.95;
};

/// Forward result with every intermediate the backward pass needs.
struct GateOutput {
  double g = 0.5;      // clamp(sigmoid(s), g_min, g_max)
  double z1 = 0.0;     // <Z> of circuit 1
  double z2 = 0.0;     // <Z> of circuit 2
  double s = 0.0;      // w1 z1 + w2 z2 + b_g
  bool clipped = false;
};

/// Gradient of a scalar loss w.r.t. each gate trainable.
struct GateGrads {
  double theta1 = 0.0;
  double phi1 = 0.0;
  double theta2 = 0.0;
  double phi2 = 0.0;
  double w1 = 0.0;
  double w2 = 0.0;
  double b_g = 0.0;
};

enum class GateAngle { Theta1, Phi1, Theta2, Phi2 };

/// Numerically stable logistic sigmoid.
double sigmoid(double x);

/// RX(phi) * RY(theta) * |0>, built from the explicit 2x2 complex rotation
/// matrices. Throws std::invalid_argument on non-finite angles.
QubitState prepare_state(double theta, double phi);

/// Pauli-Z expectation |amp0|^2 - |amp1|^2. Throws std::logic_error if the
/// state norm deviates from 1 by more than 1e-9.
double expect_z(const QubitState& state);

/// Validates the clamp-bound invariants (0 < g_min < g_max < 1, finite
/// trainables). Throws std::invalid_argument on violation.
void validate(const GateParams& params);

GateOutput gate_forward(const GateParams& params);

/// Chain-rule gradients through sigmoid and the two circuits. All-zero when
/// the clamp was active (the clamp has zero slope outside the active band).
GateGrads gate_backward(const GateOutput& output, const GateParams& params,
                        double upstream);

/// Parameter-shift derivative of the selected angle's circuit expectation:
/// (z(a + pi/2) - z(a - pi/2)) / 2 evaluated through the statevector.
double param_shift_grad(const GateParams& params, GateAngle which);

/// Classical ablation gate: clamp(sigmoid(w . x_mean + b), g_min, g_max).
struct ClassicalGateParams {
  Vector w;           // one weight per input feature
  double b = 0.0;
  double g_min = 0.05;
  double g_max = 0.95;
};

struct ClassicalGateOutput {
  double g = 0.5;
  double s = 0.0;
  bool clipped = false;
};

ClassicalGateOutput classical_gate_forward(const ClassicalGateParams& params,
                                           std::span<const double> x_mean);

/// Returns (dL/dw, dL/db); zero when the clamp was active.
std::pair<Vector, double> classical_gate_backward(
    const ClassicalGateOutput& output, const ClassicalGateParams& params,
    std::span<const double> x_mean, double upstream);

}  // namespace qssm
