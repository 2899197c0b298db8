#include "asyncdgd/block_vector.hpp"

#include <stdexcept>

namespace asyncdgd {

BlockVector::BlockVector(int nodes, int dim, Eigen::VectorXd flat)
    : n_(nodes), d_(dim), data_(std::move(flat)) {
  if (data_.size() != static_cast<Eigen::Index>(nodes) * dim) {
    throw std::invalid_argument("BlockVector: flat data length must be n*d");
  }
}

double block_max_norm(const BlockVector& x, const BlockVector& y) {
  if (!x.same_shape(y)) {
    throw std::invalid_argument("block_max_norm: shape mismatch");
  }
  double m = 0.0;
  for (int i = 0; i < x.nodes(); ++i) {
    m = std::max(m, (x.block(i) - y.block(i)).norm());
  }
  return m;
}

double block_max_norm(const BlockVector& x) {
  double m = 0.0;
  for (int i = 0; i < x.nodes(); ++i) {
    m = std::max(m, x.block(i).norm());
  }
  return m;
}

}  // namespace asyncdgd
