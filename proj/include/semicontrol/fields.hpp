#pragma once

#include <Eigen/Core>
#include <functional>
#include <memory>

#include "semicontrol/grid.hpp"

namespace semicontrol {

/// One real value per spatial node.
class SpatialField {
public:
  SpatialField() = default;
  SpatialField(GridPtr grid, Eigen::VectorXd values);

  static SpatialField zero(GridPtr grid);
  static SpatialField constant(GridPtr grid, double c);
  static SpatialField sample(GridPtr grid,
                             const std::function<double(const std::array<double, 3>&)>& fn);

  bool empty() const { return !grid_; }
  const GridSpec& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  const Eigen::VectorXd& values() const { return values_; }
  double operator[](long node) const { return values_[node]; }
  long size() const { return values_.size(); }

private:
  GridPtr grid_;
  Eigen::VectorXd values_;
};

/// One real value per (time level m = 0..nt, spatial node), level-major.
class SpaceTimeField {
public:
  SpaceTimeField() = default;
  SpaceTimeField(GridPtr grid, Eigen::VectorXd values);

  static SpaceTimeField zero(GridPtr grid);
  static SpaceTimeField constant(GridPtr grid, double c);
  /// fn(x, t) evaluated at every node of every time level.
  static SpaceTimeField sample(
      GridPtr grid, const std::function<double(const std::array<double, 3>&, double)>& fn);

  bool empty() const { return !grid_; }
  const GridSpec& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  const Eigen::VectorXd& values() const { return values_; }
  long size() const { return values_.size(); }

  Eigen::Ref<const Eigen::VectorXd> level(int m) const {
    return values_.segment(static_cast<long>(m) * grid_->node_count(), grid_->node_count());
  }
  double at(int m, long node) const { return values_[m * grid_->node_count() + node]; }

private:
  GridPtr grid_;
  Eigen::VectorXd values_;
};

/// One real value per boundary node, in the grid's boundary enumeration.
class BoundaryField {
public:
  BoundaryField() = default;
  BoundaryField(GridPtr grid, Eigen::VectorXd values);

  static BoundaryField zero(GridPtr grid);
  static BoundaryField constant(GridPtr grid, double c);
  static BoundaryField sample(GridPtr grid,
                              const std::function<double(const std::array<double, 3>&)>& fn);

  bool empty() const { return !grid_; }
  const GridSpec& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  const Eigen::VectorXd& values() const { return values_; }
  double operator[](long ordinal) const { return values_[ordinal]; }
  long size() const { return values_.size(); }

private:
  GridPtr grid_;
  Eigen::VectorXd values_;
};

}  // namespace semicontrol
