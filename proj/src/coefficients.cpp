#include "semicontrol/coefficients.hpp"

#include <Eigen/Eigenvalues>

#include "semicontrol/errors.hpp"

namespace semicontrol {

void EllipticCoefficients::finalize() {
  if (iso_a_) {
    lambda_A_ = iso_a_->values().minCoeff();
  } else {
    if (matrix_.rows() != matrix_.cols() || matrix_.rows() < 1 || matrix_.rows() > 3)
      throw ValidationError("EllipticCoefficients: a must be n x n with n in 1..3");
    if (!matrix_.isApprox(matrix_.transpose(), 1e-14))
      throw ValidationError("EllipticCoefficients: a must be symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(matrix_);
    lambda_A_ = es.eigenvalues().minCoeff();
  }
  if (!(lambda_A_ > 0.0))
    throw ValidationError("EllipticCoefficients: ellipticity violated, Lambda_A <= 0");
  if (a0_field_) {
    if (a0_field_->values().minCoeff() < 0.0)
      throw ValidationError("EllipticCoefficients: a0 must be >= 0");
  } else if (a0_const_ < 0.0) {
    throw ValidationError("EllipticCoefficients: a0 must be >= 0");
  }
}

EllipticCoefficients EllipticCoefficients::laplacian(double a0) {
  EllipticCoefficients c;
  c.matrix_ = Eigen::MatrixXd::Identity(3, 3);
  c.a0_const_ = a0;
  c.finalize();
  return c;
}

EllipticCoefficients EllipticCoefficients::constant(Eigen::MatrixXd a, double a0) {
  EllipticCoefficients c;
  c.matrix_ = std::move(a);
  c.a0_const_ = a0;
  c.finalize();
  return c;
}

EllipticCoefficients EllipticCoefficients::constant(Eigen::MatrixXd a, SpatialField a0) {
  EllipticCoefficients c;
  c.matrix_ = std::move(a);
  c.a0_field_ = std::move(a0);
  c.finalize();
  return c;
}

EllipticCoefficients EllipticCoefficients::isotropic(SpatialField a, SpatialField a0) {
  EllipticCoefficients c;
  c.iso_a_ = std::move(a);
  c.a0_field_ = std::move(a0);
  c.finalize();
  return c;
}

EllipticCoefficients EllipticCoefficients::isotropic(SpatialField a, double a0) {
  EllipticCoefficients c;
  c.iso_a_ = std::move(a);
  c.a0_const_ = a0;
  c.finalize();
  return c;
}

bool EllipticCoefficients::is_diagonal() const {
  if (iso_a_) return true;
  const int n = static_cast<int>(matrix_.rows());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j && matrix_(i, j) != 0.0) return false;
  return true;
}

bool EllipticCoefficients::a0_identically_zero(const GridSpec& grid) const {
  if (a0_field_) {
    for (long p = 0; p < grid.node_count(); ++p)
      if ((*a0_field_)[p] > 0.0) return false;
    return true;
  }
  return a0_const_ == 0.0;
}

void EllipticCoefficients::validate(const GridSpec& grid) const {
  if (iso_a_ && !iso_a_->grid().same_grid(grid))
    throw ValidationError("EllipticCoefficients: isotropic field lives on a different grid");
  if (a0_field_ && !a0_field_->grid().same_grid(grid))
    throw ValidationError("EllipticCoefficients: a0 field lives on a different grid");
  if (!iso_a_ && matrix_.rows() < grid.dim())
    throw ValidationError("EllipticCoefficients: matrix smaller than grid dimension");
}

}  // namespace semicontrol
