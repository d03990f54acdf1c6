#include "qssm/tensor.hpp"

#include <cmath>
#include <stdexcept>

namespace qssm {

void matvec(const Matrix& m, std::span<const double> x, std::span<double> y) {
  if (x.size() != m.cols || y.size() != m.rows) {
    throw std::invalid_argument("matvec: shape mismatch");
  }
  for (std::size_t i = 0; i < m.rows; ++i) {
    const double* row = m.data.data() + i * m.cols;
    double acc = 0.0;
    for (std::size_t j = 0; j < m.cols; ++j) acc += row[j] * x[j];
    y[i] = acc;
  }
}

void matvec_t(const Matrix& m, std::span<const double> x, std::span<double> y) {
  if (x.size() != m.rows || y.size() != m.cols) {
    throw std::invalid_argument("matvec_t: shape mismatch");
  }
  for (std::size_t j = 0; j < m.cols; ++j) y[j] = 0.0;
  for (std::size_t i = 0; i < m.rows; ++i) {
    const double* row = m.data.data() + i * m.cols;
    const double xi = x[i];
    for (std::size_t j = 0; j < m.cols; ++j) y[j] += row[j] * xi;
  }
}

void outer_acc(Matrix& m, std::span<const double> y, std::span<const double> x,
               double a) {
  if (y.size() != m.rows || x.size() != m.cols) {
    throw std::invalid_argument("outer_acc: shape mismatch");
  }
  for (std::size_t i = 0; i < m.rows; ++i) {
    double* row = m.data.data() + i * m.cols;
    const double s = a * y[i];
    for (std::size_t j = 0; j < m.cols; ++j) row[j] += s * x[j];
  }
}

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  if (x.size() != y.size()) throw std::invalid_argument("axpy: size mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

double l2_norm(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return std::sqrt(acc);
}

double mean_of(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x;
  return v.empty() ? 0.0 : acc / static_cast<double>(v.size());
}

bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace qssm
