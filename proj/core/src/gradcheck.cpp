#include "qssm/gradcheck.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace qssm {

namespace {

double eval_loss(ModelBundle& bundle, const std::vector<WindowSample>& batch) {
  RngStream unused(0);
  return bundle.model
      .forward_loss(batch, RunMode::Eval, unused, bundle.store)
      .first;
}

// Slope of z_i = <Z>(theta_i, phi_i) w.r.t. one angle, read off the same
// closed form the backward pass uses.
double analytic_circuit_slope(const GateParams& p, GateAngle which) {
  switch (which) {
    case GateAngle::Theta1: return -std::sin(p.theta1) * std::cos(p.phi1);
    case GateAngle::Phi1: return -std::cos(p.theta1) * std::sin(p.phi1);
    case GateAngle::Theta2: return -std::sin(p.theta2) * std::cos(p.phi2);
    case GateAngle::Phi2: return -std::cos(p.theta2) * std::sin(p.phi2);
  }
  throw std::invalid_argument("bad gate angle");
}

}  // namespace

GradCheckProblem build_gradcheck_problem(std::uint64_t seed, GateKind kind) {
  ModelDims dims;
  dims.f_in = 3;
  dims.f_out = 2;
  dims.window = 4;
  dims.horizon = 2;
  dims.proj_width = 4;
  dims.latent_width = 4;

  GradCheckProblem problem;
  problem.bundle = make_bundle(dims, kind, /*dropout_p=*/0.0, 0.05, 0.95,
                               /*calendar_indices=*/{2});
  QssmModel& model = problem.bundle->model;

  RngStream rng(derive_seed(seed, 11));
  model.init_params(rng, problem.bundle->store);
  if (kind == GateKind::Quantum) {
    const double pi = std::numbers::pi;
    model.gate.theta1 = pi * (2.0 * rng.uniform() - 1.0);
    model.gate.phi1 = pi * (2.0 * rng.uniform() - 1.0);
    model.gate.theta2 = pi * (2.0 * rng.uniform() - 1.0);
    model.gate.phi2 = pi * (2.0 * rng.uniform() - 1.0);
    model.gate.w1 = 2.0 * rng.uniform() - 1.0;
    model.gate.w2 = 2.0 * rng.uniform() - 1.0;
    model.gate.b_g = rng.uniform() - 0.5;
  } else {
    for (double& w : model.classical_gate.w) w = rng.uniform() - 0.5;
    model.classical_gate.b = rng.uniform() - 0.5;
  }
  model.backbone.alpha = 2.0 * rng.uniform() - 1.0;
  problem.bundle->store.mark_mutated();

  RngStream data_rng(derive_seed(seed, 12));
  for (int b = 0; b < 2; ++b) {
    WindowSample s;
    s.x = Matrix(dims.window, dims.f_in);
    for (double& v : s.x.data) v = data_rng.normal();
    s.y = Matrix(dims.horizon, dims.f_out);
    for (double& v : s.y.data) v = 0.5 * data_rng.normal();
    s.x_last.resize(dims.f_out);
    for (std::size_t j = 0; j < dims.f_out; ++j) {
      s.x_last[j] = s.x(dims.window - 1, j);
    }
    problem.batch.push_back(std::move(s));
  }
  return problem;
}

NamedGrads analytic_grads(ModelBundle& bundle,
                          const std::vector<WindowSample>& batch) {
  bundle.store.zero_grads();
  RngStream unused(0);
  auto [loss, cache] =
      bundle.model.forward_loss(batch, RunMode::Eval, unused, bundle.store);
  (void)loss;
  bundle.model.backward(cache, bundle.store);
  NamedGrads out;
  out.reserve(bundle.store.size());
  for (std::size_t i = 0; i < bundle.store.size(); ++i) {
    const ParamEntry& e = bundle.store.entry(i);
    out.emplace_back(e.name, e.grad);
  }
  bundle.store.zero_grads();
  return out;
}

NamedGrads fd_grads(ModelBundle& bundle, const std::vector<WindowSample>& batch,
                    double step) {
  NamedGrads out;
  out.reserve(bundle.store.size());
  for (std::size_t i = 0; i < bundle.store.size(); ++i) {
    ParamEntry& e = bundle.store.entry(i);
    Vector grads(e.size);
    auto value = e.value();
    for (std::size_t j = 0; j < e.size; ++j) {
      const double saved = value[j];
      value[j] = saved + step;
      bundle.store.mark_mutated();
      const double up = eval_loss(bundle, batch);
      value[j] = saved - step;
      bundle.store.mark_mutated();
      const double down = eval_loss(bundle, batch);
      value[j] = saved;
      bundle.store.mark_mutated();
      grads[j] = (up - down) / (2.0 * step);
    }
    out.emplace_back(e.name, std::move(grads));
  }
  return out;
}

GradCheckReport compare_grads(const NamedGrads& analytic, const NamedGrads& fd,
                              double tol) {
  if (analytic.size() != fd.size()) {
    throw std::invalid_argument("compare_grads: parameter list mismatch");
  }
  GradCheckReport report;
  report.passed = true;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const auto& [name, a] = analytic[i];
    const auto& [fd_name, n] = fd[i];
    if (name != fd_name || a.size() != n.size()) {
      throw std::invalid_argument("compare_grads: parameter list mismatch at " +
                                  name);
    }
    ParamCheck check;
    check.name = name;
    for (std::size_t j = 0; j < a.size(); ++j) {
      const double denom =
          std::max({std::fabs(a[j]), std::fabs(n[j]), 0.01});
      const double rel = std::fabs(a[j] - n[j]) / denom;
      if (rel > check.max_rel_err) {
        check.max_rel_err = rel;
        check.analytic_at_max = a[j];
        check.fd_at_max = n[j];
      }
    }
    check.passed = check.max_rel_err <= tol;
    if (!check.passed) report.passed = false;
    if (check.max_rel_err > report.max_rel_err) {
      report.max_rel_err = check.max_rel_err;
      report.worst_param = name;
    }
    report.params.push_back(std::move(check));
  }
  return report;
}

GradCheckReport run_gradcheck(std::uint64_t seed, GateKind kind) {
  GradCheckProblem problem = build_gradcheck_problem(seed, kind);
  if (problem.bundle->model.decoder.dropout_p != 0.0) {
    throw std::logic_error("gradcheck requires dropout disabled");
  }
  const NamedGrads analytic = analytic_grads(*problem.bundle, problem.batch);
  const NamedGrads numeric = fd_grads(*problem.bundle, problem.batch);
  GradCheckReport report = compare_grads(analytic, numeric);

  if (kind == GateKind::Quantum) {
    const GateParams& p = problem.bundle->model.gate;
    for (GateAngle angle : {GateAngle::Theta1, GateAngle::Phi1,
                            GateAngle::Theta2, GateAngle::Phi2}) {
      const double shift = param_shift_grad(p, angle);
      const double exact = analytic_circuit_slope(p, angle);
      report.max_shift_err =
          std::max(report.max_shift_err, std::fabs(shift - exact));
    }
    if (report.max_shift_err > kShiftTol) report.passed = false;
  }
  return report;
}

std::string gradcheck_text(const GradCheckReport& report) {
  std::ostringstream out;
  for (const ParamCheck& p : report.params) {
    out << (p.passed ? "  ok   " : "  FAIL ") << p.name
        << "  max_rel_err=" << format_double(p.max_rel_err)
        << "  analytic=" << format_double(p.analytic_at_max)
        << "  fd=" << format_double(p.fd_at_max) << '\n';
  }
  out << "max relative error: " << format_double(report.max_rel_err);
  if (!report.worst_param.empty()) out << " (" << report.worst_param << ")";
  out << '\n';
  out << "parameter-shift max error: " << format_double(report.max_shift_err)
      << '\n';
  out << (report.passed ? "gradcheck passed\n" : "gradcheck FAILED\n");
  return out.str();
}

}  // namespace qssm
