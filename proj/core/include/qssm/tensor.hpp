#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace qssm {

using Vector = std::vector<double>;

/// Dense row-major matrix of doubles.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

  std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
  std::span<const double> row(std::size_t i) const {
    return {data.data() + i * cols, cols};
  }

  std::size_t size() const { return data.size(); }
  void fill(double v) { data.assign(data.size(), v); }
};

// y = M x
void matvec(const Matrix& m, std::span<const double> x, std::span<double> y);
// y = M^T x
void matvec_t(const Matrix& m, std::span<const double> x, std::span<double> y);
// M += a y x^T
void outer_acc(Matrix& m, std::span<const double> y, std::span<const double> x,
               double a = 1.0);

double dot(std::span<const double> a, std::span<const double> b);
// y += a x
void axpy(double a, std::span<const double> x, std::span<double> y);

double l2_norm(std::span<const double> v);
double mean_of(std::span<const double> v);

bool all_finite(std::span<const double> v);

}  // namespace qssm
