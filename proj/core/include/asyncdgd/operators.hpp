#pragma once

#include <cstdint>
#include <vector>

#include "asyncdgd/block_vector.hpp"
#include "asyncdgd/graph.hpp"
#include "asyncdgd/mixing.hpp"
#include "asyncdgd/oracles.hpp"

namespace asyncdgd {

enum class AlgKind { prox_dgd, dgd_atc };

struct AlgorithmSpec {
  AlgKind kind = AlgKind::prox_dgd;
  ConsensusProblem problem;
  Graph graph;
  MixingMatrix W;
  double alpha = 0.0;
  // Permits alpha at or above the theorem bound (explicitly requested
  // out-of-range runs). Callers are expected to watermark such outputs.
  bool stepsize_override = false;

  // Throws on an invalid step-size or an unsupported problem/W combination.
  void validate() const;
};

AlgorithmSpec make_spec(AlgKind kind, ConsensusProblem problem, Graph graph,
                        MixingMatrix W, double alpha);

// Exclusive step-size upper bound: 2 min_i(w_ii/L_i) for prox_dgd,
// 2/max_i L_i for dgd_atc.
double max_stepsize(AlgKind kind, const ConsensusProblem& problem,
                    const MixingMatrix& W);

struct ContractionReport {
  double factor = 1.0;                 // rho or rho_hat
  std::vector<double> per_node;        // per-node contraction factors
  bool valid = false;                  // requires all mu_i > 0
};

ContractionReport contraction_factor(const AlgorithmSpec& spec);
ContractionReport contraction_factor(AlgKind kind,
                                     const ConsensusProblem& problem,
                                     const MixingMatrix& W, double alpha);

// One neighbor input: node id and its (possibly stale) value. For prox_dgd the
// value is x_j; for dgd_atc it is the message y_j = x_j - alpha*grad f_j(x_j).
struct NeighborInput {
  int node;
  Eigen::VectorXd value;
};

// DGD-ATC message emitted by node j for its current iterate.
Eigen::VectorXd atc_message(const AlgorithmSpec& spec, int j,
                            const Eigen::VectorXd& x_j);

// Single-block update of node i. `inputs` must cover exactly N_i (any order;
// summation is performed in ascending node id with the self term in place).
// The gradient/self term always uses self_x, the node's own current iterate.
Eigen::VectorXd apply_T_block(const AlgorithmSpec& spec, int i,
                              const std::vector<NeighborInput>& inputs,
                              const Eigen::VectorXd& self_x);

// Synchronous one-step map T applied to all blocks.
BlockVector apply_T_full(const AlgorithmSpec& spec, const BlockVector& x);

// Max over `samples` random points of
// ||T(x)-x*||_inf^b / ||x-x*||_inf^b. Requires ||T(x*)-x*||_inf^b <= 1e-10.
double measure_pseudo_contraction(const AlgorithmSpec& spec,
                                  const BlockVector& x_star, int samples,
                                  std::uint64_t seed);

}  // namespace asyncdgd
