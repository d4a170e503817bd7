#include "semicontrol/fields.hpp"

#include "semicontrol/errors.hpp"

namespace semicontrol {

namespace {
void require(bool ok, const char* what) {
  if (!ok) throw ValidationError(what);
}
}  // namespace

SpatialField::SpatialField(GridPtr grid, Eigen::VectorXd values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  require(static_cast<bool>(grid_), "SpatialField: null grid");
  require(values_.size() == grid_->node_count(), "SpatialField: value count != node count");
  require(values_.allFinite(), "SpatialField: non-finite value");
}

SpatialField SpatialField::zero(GridPtr grid) {
  const long n = grid->node_count();
  return SpatialField(std::move(grid), Eigen::VectorXd::Zero(n));
}

SpatialField SpatialField::constant(GridPtr grid, double c) {
  const long n = grid->node_count();
  return SpatialField(std::move(grid), Eigen::VectorXd::Constant(n, c));
}

SpatialField SpatialField::sample(
    GridPtr grid, const std::function<double(const std::array<double, 3>&)>& fn) {
  Eigen::VectorXd v(grid->node_count());
  for (long p = 0; p < grid->node_count(); ++p) v[p] = fn(grid->coords(p));
  return SpatialField(std::move(grid), std::move(v));
}

SpaceTimeField::SpaceTimeField(GridPtr grid, Eigen::VectorXd values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  require(static_cast<bool>(grid_), "SpaceTimeField: null grid");
  require(grid_->has_time(), "SpaceTimeField: grid has no time axis");
  require(values_.size() == grid_->space_time_count(),
          "SpaceTimeField: value count != (nt+1) * node count");
  require(values_.allFinite(), "SpaceTimeField: non-finite value");
}

SpaceTimeField SpaceTimeField::zero(GridPtr grid) {
  const long n = grid->space_time_count();
  return SpaceTimeField(std::move(grid), Eigen::VectorXd::Zero(n));
}

SpaceTimeField SpaceTimeField::constant(GridPtr grid, double c) {
  const long n = grid->space_time_count();
  return SpaceTimeField(std::move(grid), Eigen::VectorXd::Constant(n, c));
}

SpaceTimeField SpaceTimeField::sample(
    GridPtr grid, const std::function<double(const std::array<double, 3>&, double)>& fn) {
  Eigen::VectorXd v(grid->space_time_count());
  const long n = grid->node_count();
  for (int m = 0; m <= grid->nt(); ++m) {
    const double t = m * grid->tau();
    for (long p = 0; p < n; ++p) v[m * n + p] = fn(grid->coords(p), t);
  }
  return SpaceTimeField(std::move(grid), std::move(v));
}

BoundaryField::BoundaryField(GridPtr grid, Eigen::VectorXd values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  require(static_cast<bool>(grid_), "BoundaryField: null grid");
  require(values_.size() == grid_->boundary_count(),
          "BoundaryField: value count != boundary node count");
  require(values_.allFinite(), "BoundaryField: non-finite value");
}

BoundaryField BoundaryField::zero(GridPtr grid) {
  const long n = grid->boundary_count();
  return BoundaryField(std::move(grid), Eigen::VectorXd::Zero(n));
}

BoundaryField BoundaryField::constant(GridPtr grid, double c) {
  const long n = grid->boundary_count();
  return BoundaryField(std::move(grid), Eigen::VectorXd::Constant(n, c));
}

BoundaryField BoundaryField::sample(
    GridPtr grid, const std::function<double(const std::array<double, 3>&)>& fn) {
  Eigen::VectorXd v(grid->boundary_count());
  for (long b = 0; b < grid->boundary_count(); ++b)
    v[b] = fn(grid->coords(grid->boundary_nodes()[b]));
  return BoundaryField(std::move(grid), std::move(v));
}

}  // namespace semicontrol
