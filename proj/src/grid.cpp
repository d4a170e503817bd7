#include "semicontrol/grid.hpp"

#include <cmath>
#include <stdexcept>

#include "semicontrol/errors.hpp"

namespace semicontrol {

namespace {
// Hard cap on stored values so a typo in a config cannot OOM the process.
constexpr long kMaxStoredValues = 1L << 28;
}  // namespace

GridSpec::GridSpec(std::vector<int> nx, std::vector<double> lengths, int nt, double T) {
  if (nx.empty() || nx.size() > 3 || nx.size() != lengths.size())
    throw std::invalid_argument("GridSpec: need 1..3 axes with matching nx/length lists");
  dim_ = static_cast<int>(nx.size());
  node_count_ = 1;
  domain_volume_ = 1.0;
  cell_volume_ = 1.0;
  for (int d = 0; d < dim_; ++d) {
    if (nx[d] < 3) throw std::invalid_argument("GridSpec: nx must be >= 3 per axis");
    if (!(lengths[d] > 0.0)) throw std::invalid_argument("GridSpec: lengths must be positive");
    nx_[d] = nx[d];
    length_[d] = lengths[d];
    h_[d] = lengths[d] / (nx[d] - 1);
    node_count_ *= nx[d];
    domain_volume_ *= lengths[d];
    cell_volume_ *= h_[d];
  }
  nt_ = nt;
  T_ = T;
  if (nt_ > 0) {
    if (!(T > 0.0)) throw std::invalid_argument("GridSpec: final time must be positive");
    tau_ = T / nt_;
  } else if (nt_ < 0 || T != 0.0) {
    throw std::invalid_argument("GridSpec: spatial grid must have nt=0, T=0");
  }
  if ((nt_ + 1) * node_count_ > kMaxStoredValues)
    throw std::invalid_argument("GridSpec: node count exceeds addressable budget");

  node_weight_.resize(node_count_);
  boundary_ordinal_.assign(node_count_, -1);
  for (long p = 0; p < node_count_; ++p) {
    const auto mi = multi_index(p);
    double w = 1.0;
    bool boundary = false;
    for (int d = 0; d < dim_; ++d) {
      const bool edge = (mi[d] == 0 || mi[d] == nx_[d] - 1);
      w *= edge ? 0.5 * h_[d] : h_[d];
      boundary = boundary || edge;
    }
    node_weight_[p] = w;
    if (boundary) {
      boundary_ordinal_[p] = static_cast<long>(boundary_nodes_.size());
      boundary_nodes_.push_back(p);
    } else {
      interior_nodes_.push_back(p);
    }
  }

  // Face-accumulated surface weights.  In 1D the two endpoints carry the
  // counting measure (weight 1).
  boundary_weight_ = Eigen::VectorXd::Zero(boundary_count());
  for (long b = 0; b < boundary_count(); ++b) {
    const auto mi = multi_index(boundary_nodes_[b]);
    double total = 0.0;
    for (int d = 0; d < dim_; ++d) {
      if (mi[d] != 0 && mi[d] != nx_[d] - 1) continue;
      double wface = 1.0;
      for (int c = 0; c < dim_; ++c) {
        if (c == d) continue;
        const bool edge = (mi[c] == 0 || mi[c] == nx_[c] - 1);
        wface *= edge ? 0.5 * h_[c] : h_[c];
      }
      total += wface;
    }
    boundary_weight_[b] = total;
  }
}

std::shared_ptr<const GridSpec> GridSpec::spatial(std::vector<int> nx,
                                                  std::vector<double> lengths) {
  return std::shared_ptr<const GridSpec>(new GridSpec(std::move(nx), std::move(lengths), 0, 0.0));
}

std::shared_ptr<const GridSpec> GridSpec::space_time(std::vector<int> nx,
                                                     std::vector<double> lengths,
                                                     int nt, double T) {
  if (nt < 1) throw std::invalid_argument("GridSpec: space_time grid needs nt >= 1");
  return std::shared_ptr<const GridSpec>(new GridSpec(std::move(nx), std::move(lengths), nt, T));
}

long GridSpec::index(const std::array<int, 3>& mi) const {
  long idx = 0;
  for (int d = 0; d < dim_; ++d) idx = idx * nx_[d] + mi[d];
  return idx;
}

std::array<int, 3> GridSpec::multi_index(long idx) const {
  std::array<int, 3> mi{0, 0, 0};
  for (int d = dim_ - 1; d >= 0; --d) {
    mi[d] = static_cast<int>(idx % nx_[d]);
    idx /= nx_[d];
  }
  return mi;
}

std::array<double, 3> GridSpec::coords(long idx) const {
  const auto mi = multi_index(idx);
  std::array<double, 3> x{0, 0, 0};
  for (int d = 0; d < dim_; ++d) x[d] = mi[d] * h_[d];
  return x;
}

bool GridSpec::is_boundary(long idx) const { return boundary_ordinal_[idx] >= 0; }

}  // namespace semicontrol
