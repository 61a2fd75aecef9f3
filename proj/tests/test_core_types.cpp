#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pdl/core_types.hpp"

using pdl::CoeffMatrix;
using pdl::DataMatrix;
using pdl::Dictionary;
using pdl::Matrix;

TEST_CASE("consistent dimension triple passes") {
  const DataMatrix X(Matrix::Constant(64, 10, 0.5));
  const Dictionary D(Matrix::Constant(64, 128, 0.5));
  const CoeffMatrix R(Matrix::Zero(128, 10));
  CHECK_NOTHROW(pdl::check_dims(X, D, R));
}

TEST_CASE("atom count mismatch names the offending pair") {
  const DataMatrix X(Matrix::Constant(64, 10, 0.5));
  const Dictionary D(Matrix::Constant(64, 128, 0.5));
  const CoeffMatrix R(Matrix::Zero(127, 10));
  CHECK_THROWS_WITH_AS(pdl::check_dims(X, D, R),
                       doctest::Contains("D/R"), pdl::DimensionMismatch);
}

TEST_CASE("sample count mismatch is rejected") {
  const DataMatrix X(Matrix::Constant(8, 10, 0.5));
  const Dictionary D(Matrix::Constant(8, 4, 0.5));
  const CoeffMatrix R(Matrix::Zero(4, 9));
  CHECK_THROWS_AS(pdl::check_dims(X, D, R), pdl::DimensionMismatch);
}

TEST_CASE("empty data cannot be constructed") {
  CHECK_THROWS_AS(DataMatrix(Matrix(64, 0)), pdl::DimensionMismatch);
  CHECK_THROWS_AS(DataMatrix(Matrix(0, 5)), pdl::DimensionMismatch);
}

TEST_CASE("non-finite data is rejected at construction") {
  Matrix bad = Matrix::Constant(2, 2, 1.0);
  bad(1, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(DataMatrix(std::move(bad)), pdl::DimensionMismatch);
}

TEST_CASE("statistics must match the feature dimension") {
  Matrix v = Matrix::Constant(3, 2, 1.0);
  pdl::Vector mu = pdl::Vector::Zero(2);
  pdl::Vector sigma = pdl::Vector::Ones(2);
  CHECK_THROWS_AS(DataMatrix(std::move(v), std::move(mu), std::move(sigma)),
                  pdl::DimensionMismatch);
}
