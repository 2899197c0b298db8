#pragma once

#include <Eigen/Dense>

namespace asyncdgd {

// Stacked iterate x = (x_1^T, ..., x_n^T)^T of n blocks of dimension d.
class BlockVector {
 public:
  BlockVector() = default;
  BlockVector(int nodes, int dim)
      : n_(nodes), d_(dim), data_(Eigen::VectorXd::Zero(
                                static_cast<Eigen::Index>(nodes) * dim)) {}
  BlockVector(int nodes, int dim, Eigen::VectorXd flat);

  int nodes() const { return n_; }
  int dim() const { return d_; }

  Eigen::Ref<Eigen::VectorXd> block(int i) {
    return data_.segment(static_cast<Eigen::Index>(i) * d_, d_);
  }
  Eigen::Ref<const Eigen::VectorXd> block(int i) const {
    return data_.segment(static_cast<Eigen::Index>(i) * d_, d_);
  }

  Eigen::VectorXd& flat() { return data_; }
  const Eigen::VectorXd& flat() const { return data_; }

  bool same_shape(const BlockVector& other) const {
    return n_ == other.n_ && d_ == other.d_;
  }

 private:
  int n_ = 0;
  int d_ = 0;
  Eigen::VectorXd data_;
};

// max_i ||x_i - y_i||_2
double block_max_norm(const BlockVector& x, const BlockVector& y);

// max_i ||x_i||_2
double block_max_norm(const BlockVector& x);

}  // namespace asyncdgd
