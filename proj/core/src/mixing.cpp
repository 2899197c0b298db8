#include "asyncdgd/mixing.hpp"

#include <stdexcept>

namespace asyncdgd {

namespace {

void spectral_summary(const Eigen::MatrixXd& W, double* beta, bool* pd) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(W);
  const auto& ev = es.eigenvalues();  // ascending
  const Eigen::Index n = ev.size();
  const double lambda_min = ev[0];
  const double lambda_2 = n >= 2 ? ev[n - 2] : 0.0;
  *beta = std::max(std::abs(lambda_2), std::abs(lambda_min));
  *pd = lambda_min > 0.0;
}

}  // namespace

void MixingMatrix::validate(const Graph& g, double tol) const {
  const int m = n();
  if (m != g.n) throw std::invalid_argument("mixing: size mismatch with graph");
  for (int i = 0; i < m; ++i) {
    double row = 0.0;
    for (int j = 0; j < m; ++j) {
      const double w = W(i, j);
      if (w < 0) throw std::invalid_argument("mixing: negative weight");
      if (std::abs(w - W(j, i)) > tol) {
        throw std::invalid_argument("mixing: not symmetric");
      }
      const bool is_edge =
          i != j && std::binary_search(g.adjacency[i].begin(),
                                       g.adjacency[i].end(), j);
      if (i != j && !is_edge && w != 0.0) {
        throw std::invalid_argument("mixing: nonzero weight off the edge set");
      }
      if (is_edge && w == 0.0) {
        throw std::invalid_argument("mixing: zero weight on an edge");
      }
      row += w;
    }
    if (std::abs(row - 1.0) > tol) {
      throw std::invalid_argument("mixing: row sum differs from 1");
    }
  }
}

MixingMatrix metropolis_weights(const Graph& g) {
  if (!g.connected()) throw std::invalid_argument("metropolis: graph not connected");
  const int n = g.n;
  Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n, n);
  for (auto [i, j] : g.edges) {
    const double w = 1.0 / (std::max(g.degree(i), g.degree(j)) + 1.0);
    W(i, j) = w;
    W(j, i) = w;
  }
  for (int i = 0; i < n; ++i) {
    W(i, i) = 1.0 - W.row(i).sum();
  }
  return make_mixing_matrix(std::move(W));
}

MixingMatrix lazy_transform(const MixingMatrix& w) {
  Eigen::MatrixXd L = 0.5 * (w.W + Eigen::MatrixXd::Identity(w.n(), w.n()));
  return make_mixing_matrix(std::move(L));
}

double spectral_beta(const Eigen::MatrixXd& W) {
  double beta;
  bool pd;
  spectral_summary(W, &beta, &pd);
  if (beta >= 1.0 - 1e-12) {
    throw std::invalid_argument("spectral_beta: beta >= 1, graph disconnected or W invalid");
  }
  return beta;
}

MixingMatrix make_mixing_matrix(Eigen::MatrixXd W) {
  MixingMatrix m;
  m.W = std::move(W);
  spectral_summary(m.W, &m.beta, &m.positive_definite);
  return m;
}

}  // namespace asyncdgd
