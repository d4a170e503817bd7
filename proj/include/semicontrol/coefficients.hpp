#pragma once

#include <Eigen/Core>
#include <optional>

#include "semicontrol/fields.hpp"

namespace semicontrol {

/// Coefficients of the second-order operator
///   A y = -sum_ij d_j(a_ij(x) d_i y) + a0(x) y.
/// The diffusion part is either a constant symmetric n x n matrix or an
/// isotropic nodal field a(x) * I; a0 is a nonnegative nodal field or
/// constant.  The ellipticity constant Lambda_A is computed at construction
/// and must be positive.
class EllipticCoefficients {
public:
  /// a = I, constant a0.
  static EllipticCoefficients laplacian(double a0 = 0.0);
  static EllipticCoefficients constant(Eigen::MatrixXd a, double a0);
  static EllipticCoefficients constant(Eigen::MatrixXd a, SpatialField a0);
  static EllipticCoefficients isotropic(SpatialField a, SpatialField a0);
  static EllipticCoefficients isotropic(SpatialField a, double a0);

  bool is_isotropic() const { return iso_a_.has_value(); }
  bool is_diagonal() const;

  const Eigen::MatrixXd& matrix() const { return matrix_; }
  double iso_at(long node) const { return (*iso_a_)[node]; }
  double a0_at(long node) const { return a0_field_ ? (*a0_field_)[node] : a0_const_; }
  bool a0_identically_zero(const GridSpec& grid) const;

  double lambda_A() const { return lambda_A_; }

  /// Shape/ellipticity checks against a concrete grid.
  void validate(const GridSpec& grid) const;

private:
  EllipticCoefficients() = default;
  void finalize();

  Eigen::MatrixXd matrix_;                // n x n; empty when isotropic
  std::optional<SpatialField> iso_a_;     // nodal isotropic diffusion
  double a0_const_ = 0.0;
  std::optional<SpatialField> a0_field_;
  double lambda_A_ = 0.0;
};

}  // namespace semicontrol
