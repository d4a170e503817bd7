#pragma once

#include <Eigen/Core>
#include <array>
#include <memory>
#include <vector>

namespace semicontrol {

/// Uniform tensor-product grid on the box (0,L_1) x ... x (0,L_n), with an
/// optional time axis [0,T] split into nt implicit-Euler steps.
///
/// Nodes are enumerated lexicographically by coordinate tuple (x1,...,xn),
/// last axis fastest, so a linear sweep over flat indices emits rows in the
/// order the CSV writers expect.  Spatial quadrature weights are composite
/// trapezoid per axis; the time rule used by space-time norms is the
/// right-endpoint rectangle rule over levels 1..nt.
class GridSpec {
public:
  static std::shared_ptr<const GridSpec> spatial(std::vector<int> nx,
                                                 std::vector<double> lengths);
  static std::shared_ptr<const GridSpec> space_time(std::vector<int> nx,
                                                    std::vector<double> lengths,
                                                    int nt, double T);

  int dim() const { return dim_; }
  int nx(int axis) const { return nx_[axis]; }
  double length(int axis) const { return length_[axis]; }
  double h(int axis) const { return h_[axis]; }

  bool has_time() const { return nt_ > 0; }
  int nt() const { return nt_; }
  double final_time() const { return T_; }
  double tau() const { return tau_; }

  long node_count() const { return node_count_; }
  long boundary_count() const { return static_cast<long>(boundary_nodes_.size()); }
  long interior_count() const { return static_cast<long>(interior_nodes_.size()); }
  long space_time_count() const { return (nt_ + 1) * node_count_; }

  long index(const std::array<int, 3>& mi) const;
  std::array<int, 3> multi_index(long idx) const;
  std::array<double, 3> coords(long idx) const;
  bool is_boundary(long idx) const;

  const std::vector<long>& interior_nodes() const { return interior_nodes_; }
  const std::vector<long>& boundary_nodes() const { return boundary_nodes_; }
  /// Position of a spatial node inside boundary_nodes(), -1 if interior.
  long boundary_ordinal(long node) const { return boundary_ordinal_[node]; }

  /// Spatial trapezoid weight per node.
  const Eigen::VectorXd& node_weight() const { return node_weight_; }
  /// Surface quadrature weight per boundary node; nodes shared by several
  /// faces (edges, corners) accumulate the weight of every face they lie on.
  const Eigen::VectorXd& boundary_weight() const { return boundary_weight_; }

  /// prod_i h_i: the weight of every interior node.
  double cell_volume() const { return cell_volume_; }
  double domain_volume() const { return domain_volume_; }

  bool same_grid(const GridSpec& other) const { return this == &other; }

private:
  GridSpec(std::vector<int> nx, std::vector<double> lengths, int nt, double T);

  int dim_ = 0;
  std::array<int, 3> nx_{1, 1, 1};
  std::array<double, 3> length_{0, 0, 0};
  std::array<double, 3> h_{0, 0, 0};
  int nt_ = 0;
  double T_ = 0.0;
  double tau_ = 0.0;
  long node_count_ = 0;
  double cell_volume_ = 0.0;
  double domain_volume_ = 0.0;

  std::vector<long> interior_nodes_;
  std::vector<long> boundary_nodes_;
  std::vector<long> boundary_ordinal_;
  Eigen::VectorXd node_weight_;
  Eigen::VectorXd boundary_weight_;
};

using GridPtr = std::shared_ptr<const GridSpec>;

}  // namespace semicontrol
