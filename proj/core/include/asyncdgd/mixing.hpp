#pragma once

#include <Eigen/Dense>

#include "asyncdgd/graph.hpp"

namespace asyncdgd {

// Symmetric stochastic averaging matrix with sparsity matching the graph.
struct MixingMatrix {
  Eigen::MatrixXd W;
  double beta = 1.0;               // max(|lambda_2|, |lambda_n|)
  bool positive_definite = false;  // lambda_n > 0

  int n() const { return static_cast<int>(W.rows()); }
  double self_weight(int i) const { return W(i, i); }
  double min_self_weight() const { return W.diagonal().minCoeff(); }

  // Checks symmetry, nonnegativity, row sums, zero pattern against g.
  void validate(const Graph& g, double tol = 1e-12) const;
};

// w_ij = 1/(max(deg_i, deg_j)+1) on edges, diagonal completes rows to 1.
MixingMatrix metropolis_weights(const Graph& g);

// (W + I)/2; positive definite, preserves the off-diagonal zero pattern.
MixingMatrix lazy_transform(const MixingMatrix& w);

// max(|lambda_2|, |lambda_n|); throws if >= 1 - 1e-12.
double spectral_beta(const Eigen::MatrixXd& W);

MixingMatrix make_mixing_matrix(Eigen::MatrixXd W);

}  // namespace asyncdgd
