#include "pdl/core_types.hpp"

#include <sstream>

namespace pdl {

namespace {

void require_shape(const Matrix& v) {
  if (v.rows() < 1 || v.cols() < 1) {
    std::ostringstream msg;
    msg << "data matrix must be at least 1x1, got " << v.rows() << "x" << v.cols();
    throw DimensionMismatch(msg.str());
  }
  if (!v.allFinite()) {
    throw DimensionMismatch("data matrix contains non-finite values");
  }
}

}  // namespace

DataMatrix::DataMatrix(Matrix v) {
  require_shape(v);
  mu = Vector::Zero(v.rows());
  sigma = Vector::Ones(v.rows());
  values = std::move(v);
}

DataMatrix::DataMatrix(Matrix v, Vector mu_in, Vector sigma_in) {
  require_shape(v);
  if (mu_in.size() != v.rows() || sigma_in.size() != v.rows()) {
    std::ostringstream msg;
    msg << "statistics length " << mu_in.size() << "/" << sigma_in.size()
        << " does not match feature dimension " << v.rows();
    throw DimensionMismatch(msg.str());
  }
  values = std::move(v);
  mu = std::move(mu_in);
  sigma = std::move(sigma_in);
}

void check_dims(const DataMatrix& X, const Dictionary& D, const CoeffMatrix& R) {
  std::ostringstream msg;
  if (X.dim() < 1 || X.samples() < 1) {
    msg << "X must be at least 1x1, got " << X.dim() << "x" << X.samples();
    throw DimensionMismatch(msg.str());
  }
  if (D.dim() < 1 || D.n_atoms() < 1) {
    msg << "D must be at least 1x1, got " << D.dim() << "x" << D.n_atoms();
    throw DimensionMismatch(msg.str());
  }
  if (X.dim() != D.dim()) {
    msg << "X/D: feature dimension " << X.dim() << " vs " << D.dim();
    throw DimensionMismatch(msg.str());
  }
  if (D.n_atoms() != R.n_atoms()) {
    msg << "D/R: atom count " << D.n_atoms() << " vs " << R.n_atoms();
    throw DimensionMismatch(msg.str());
  }
  if (X.samples() != R.samples()) {
    msg << "X/R: sample count " << X.samples() << " vs " << R.samples();
    throw DimensionMismatch(msg.str());
  }
}

}  // namespace pdl
