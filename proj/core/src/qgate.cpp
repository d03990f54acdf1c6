#include "qssm/qgate.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qssm {

namespace {

using cd = std::complex<double>;

struct Mat2 {
  cd a, b, c, d;  // [[a, b], [c, d]]
};

Mat2 ry(double theta) {
  const double h = 0.5 * theta;
  return {cd(std::cos(h), 0.0), cd(-std::sin(h), 0.0), cd(std::sin(h), 0.0),
          cd(std::cos(h), 0.0)};
}

Mat2 rx(double phi) {
  const double h = 0.5 * phi;
  return {cd(std::cos(h), 0.0), cd(0.0, -std::sin(h)), cd(0.0, -std::sin(h)),
          cd(std::cos(h), 0.0)};
}

QubitState apply(const Mat2& m, const QubitState& s) {
  return {m.a * s.amp0 + m.b * s.amp1, m.c * s.amp0 + m.d * s.amp1};
}

double clamp(double x, double lo, double hi) {
  return x < lo ? lo : (x > hi ? hi : x);
}

}  // namespace

double sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

QubitState prepare_state(double theta, double phi) {
  if (!std::isfinite(theta) || !std::isfinite(phi)) {
    throw std::invalid_argument("prepare_state: non-finite rotation angle");
  }
  QubitState s;  // |0>
  s = apply(ry(theta), s);
  s = apply(rx(phi), s);
  return s;
}

double expect_z(const QubitState& state) {
  const double p0 = std::norm(state.amp0);
  const double p1 = std::norm(state.amp1);
  if (std::abs(p0 + p1 - 1.0) > 1e-9) {
    throw std::logic_error("expect_z: state is not normalized");
  }
  return p0 - p1;
}

void validate(const GateParams& p) {
  if (!(p.g_min > 0.0 && p.g_min < p.g_max && p.g_max < 1.0)) {
    throw std::invalid_argument("gate params: need 0 < g_min < g_max < 1");
  }
  const double vals[] = {p.theta1, p.phi1, p.theta2, p.phi2, p.w1, p.w2, p.b_g};
  for (double v : vals) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("gate params: non-finite entry");
    }
  }
}

GateOutput gate_forward(const GateParams& p) {
  validate(p);
  GateOutput out;
  out.z1 = expect_z(prepare_state(p.theta1, p.phi1));
  out.z2 = expect_z(prepare_state(p.theta2, p.phi2));
  out.s = p.w1 * out.z1 + p.w2 * out.z2 + p.b_g;
  const double sig = sigmoid(out.s);
  out.g = clamp(sig, p.g_min, p.g_max);
  out.clipped = sig < p.g_min || sig > p.g_max;
  return out;
}

GateGrads gate_backward(const GateOutput& out, const GateParams& p,
                        double upstream) {
  GateGrads g;
  if (out.clipped) return g;
  const double sig = sigmoid(out.s);
  const double dsig = sig * (1.0 - sig);
  const double u = upstream * dsig;
  g.theta1 = u * p.w1 * (-std::sin(p.theta1) * std::cos(p.phi1));
  g.phi1 = u * p.w1 * (-std::cos(p.theta1) * std::sin(p.phi1));
  g.theta2 = u * p.w2 * (-std::sin(p.theta2) * std::cos(p.phi2));
  g.phi2 = u * p.w2 * (-std::cos(p.theta2) * std::sin(p.phi2));
  g.w1 = u * out.z1;
  g.w2 = u * out.z2;
  g.b_g = u;
  return g;
}

double param_shift_grad(const GateParams& p, GateAngle which) {
  const double shift = std::numbers::pi / 2.0;
  auto z = [](double theta, double phi) {
    return expect_z(prepare_state(theta, phi));
  };
  switch (which) {
    case GateAngle::Theta1:
      return 0.5 * (z(p.theta1 + shift, p.phi1) - z(p.theta1 - shift, p.phi1));
    case GateAngle::Phi1:
      return 0.5 * (z(p.theta1, p.phi1 + shift) - z(p.theta1, p.phi1 - shift));
    case GateAngle::Theta2:
      return 0.5 * (z(p.theta2 + shift, p.phi2) - z(p.theta2 - shift, p.phi2));
    case GateAngle::Phi2:
      return 0.5 * (z(p.theta2, p.phi2 + shift) - z(p.theta2, p.phi2 - shift));
  }
  throw std::invalid_argument("param_shift_grad: unknown angle identifier");
}

ClassicalGateOutput classical_gate_forward(const ClassicalGateParams& p,
                                           std::span<const double> x_mean) {
  if (p.w.size() != x_mean.size()) {
    throw std::invalid_argument("classical gate: weight/input size mismatch");
  }
  if (!(p.g_min > 0.0 && p.g_min < p.g_max && p.g_max < 1.0)) {
    throw std::invalid_argument("classical gate: need 0 < g_min < g_max < 1");
  }
  ClassicalGateOutput out;
  out.s = dot(p.w, x_mean) + p.b;
  const double sig = sigmoid(out.s);
  out.g = clamp(sig, p.g_min, p.g_max);
  out.clipped = sig < p.g_min || sig > p.g_max;
  return out;
}

std::pair<Vector, double> classical_gate_backward(
    const ClassicalGateOutput& out, const ClassicalGateParams& p,
    std::span<const double> x_mean, double upstream) {
  Vector dw(p.w.size(), 0.0);
  double db = 0.0;
  if (!out.clipped) {
    const double sig = sigmoid(out.s);
    const double u = upstream * sig * (1.0 - sig);
    for (std::size_t i = 0; i < dw.size(); ++i) dw[i] = u * x_mean[i];
    db = u;
  }
  return {std::move(dw), db};
}

}  // namespace qssm
