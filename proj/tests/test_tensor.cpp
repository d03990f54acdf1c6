#include <cmath>
#include <limits>

#include "doctest.h"
#include "qssm/tensor.hpp"

using qssm::Matrix;
using qssm::Vector;

TEST_CASE("matrix is row-major with span row views") {
  Matrix m(2, 3);
  m(0, 0) = 1;
  m(0, 2) = 3;
  m(1, 1) = 5;
  CHECK(m.data[0] == 1);
  CHECK(m.data[2] == 3);
  CHECK(m.data[4] == 5);
  auto r1 = m.row(1);
  r1[0] = 7;
  CHECK(m(1, 0) == 7);
  CHECK(m.size() == 6);
  m.fill(2.0);
  CHECK(m(0, 1) == 2.0);
}

TEST_CASE("matvec and its transpose") {
  Matrix m(2, 2);
  m(0, 0) = 1;
  m(0, 1) = 2;
  m(1, 0) = 3;
  m(1, 1) = 4;
  const Vector x = {5, 6};
  Vector y(2);
  qssm::matvec(m, x, y);
  CHECK(y[0] == 17);
  CHECK(y[1] == 39);
  qssm::matvec_t(m, x, y);
  CHECK(y[0] == 23);
  CHECK(y[1] == 34);
}

TEST_CASE("outer_acc accumulates a*y*x^T") {
  Matrix m(2, 2);
  const Vector y = {1, 2};
  const Vector x = {3, 4};
  qssm::outer_acc(m, y, x, 2.0);
  CHECK(m(0, 0) == 6);
  CHECK(m(0, 1) == 8);
  CHECK(m(1, 0) == 12);
  CHECK(m(1, 1) == 16);
  qssm::outer_acc(m, y, x);
  CHECK(m(0, 0) == 9);
}

TEST_CASE("vector helpers") {
  const Vector a = {1, 2, 3};
  const Vector b = {4, 5, 6};
  CHECK(qssm::dot(a, b) == 32);

  Vector y = {1, 1, 1};
  qssm::axpy(2.0, a, y);
  CHECK(y[0] == 3);
  CHECK(y[2] == 7);

  const Vector v = {3, 4};
  CHECK(qssm::l2_norm(v) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(qssm::mean_of(a) == 2.0);
}

TEST_CASE("all_finite flags NaN and infinity") {
  Vector good = {0.0, -1.5, 1e300};
  CHECK(qssm::all_finite(good));
  Vector with_nan = {0.0, std::numeric_limits<double>::quiet_NaN()};
  CHECK(!qssm::all_finite(with_nan));
  Vector with_inf = {std::numeric_limits<double>::infinity()};
  CHECK(!qssm::all_finite(with_inf));
}
