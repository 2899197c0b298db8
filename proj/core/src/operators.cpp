#include "asyncdgd/operators.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace asyncdgd {

void AlgorithmSpec::validate() const {
  problem.validate();
  if (graph.n != problem.n || W.n() != problem.n) {
    throw std::invalid_argument("spec: graph/W/problem size mismatch");
  }
  W.validate(graph);
  if (!(alpha > 0)) throw std::invalid_argument("spec: alpha must be > 0");
  const double bound = max_stepsize(kind, problem, W);
  if (alpha >= bound && !stepsize_override) {
    throw std::invalid_argument("spec: alpha violates the step-size condition");
  }
  if (kind == AlgKind::dgd_atc) {
    if (!W.positive_definite) {
      throw std::invalid_argument("spec: dgd_atc requires positive definite W");
    }
    if (!problem.all_prox_zero()) {
      throw std::invalid_argument("spec: dgd_atc requires all h_i = 0");
    }
  }
}

AlgorithmSpec make_spec(AlgKind kind, ConsensusProblem problem, Graph graph,
                        MixingMatrix W, double alpha) {
  AlgorithmSpec spec;
  spec.kind = kind;
  spec.problem = std::move(problem);
  spec.graph = std::move(graph);
  spec.W = std::move(W);
  spec.alpha = alpha;
  spec.validate();
  return spec;
}

double max_stepsize(AlgKind kind, const ConsensusProblem& problem,
                    const MixingMatrix& W) {
  if (kind == AlgKind::prox_dgd) {
    double m = std::numeric_limits<double>::infinity();
    for (int i = 0; i < problem.n; ++i) {
      m = std::min(m, W.self_weight(i) / problem.smooth[i].L);
    }
    return 2.0 * m;
  }
  return 2.0 / problem.max_L();
}

ContractionReport contraction_factor(AlgKind kind,
                                     const ConsensusProblem& problem,
                                     const MixingMatrix& W, double alpha) {
  ContractionReport r;
  r.per_node.resize(problem.n, 1.0);
  r.valid = true;
  for (int i = 0; i < problem.n; ++i) {
    const auto& f = problem.smooth[i];
    if (f.mu <= 0.0) {
      r.valid = false;
      continue;
    }
    const double ratio = kind == AlgKind::prox_dgd
                             ? alpha * f.L / W.self_weight(i)
                             : alpha * f.L;
    r.per_node[i] = std::sqrt(1.0 - alpha * f.mu * (2.0 - ratio));
  }
  if (!r.valid) {
    r.factor = 1.0;
    return r;
  }
  r.factor = *std::max_element(r.per_node.begin(), r.per_node.end());
  return r;
}

ContractionReport contraction_factor(const AlgorithmSpec& spec) {
  return contraction_factor(spec.kind, spec.problem, spec.W, spec.alpha);
}

Eigen::VectorXd atc_message(const AlgorithmSpec& spec, int j,
                            const Eigen::VectorXd& x_j) {
  return x_j - spec.alpha * spec.problem.smooth[j].gradient(x_j);
}

Eigen::VectorXd apply_T_block(const AlgorithmSpec& spec, int i,
                              const std::vector<NeighborInput>& inputs,
                              const Eigen::VectorXd& self_x) {
  const auto& neighbors = spec.graph.adjacency[i];
  if (inputs.size() != neighbors.size()) {
    throw std::invalid_argument("apply_T_block: wrong neighbor input count");
  }
  // index inputs by node id; require exactly N_i
  std::vector<const Eigen::VectorXd*> by_node(spec.problem.n, nullptr);
  for (const auto& in : inputs) {
    if (in.node < 0 || in.node >= spec.problem.n || by_node[in.node]) {
      throw std::invalid_argument("apply_T_block: bad neighbor input");
    }
    by_node[in.node] = &in.value;
  }
  for (int j : neighbors) {
    if (!by_node[j]) {
      throw std::invalid_argument("apply_T_block: missing neighbor input");
    }
  }

  // fixed summation order: ascending node id over N_i with the self term at
  // position i; identical in both engines so replays are bitwise equal
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(spec.problem.d);
  if (spec.kind == AlgKind::prox_dgd) {
    bool self_added = false;
    for (int j : neighbors) {
      if (!self_added && j > i) {
        acc.noalias() += spec.W.W(i, i) * self_x;
        self_added = true;
      }
      acc.noalias() += spec.W.W(i, j) * (*by_node[j]);
    }
    if (!self_added) acc.noalias() += spec.W.W(i, i) * self_x;
    acc.noalias() -= spec.alpha * spec.problem.smooth[i].gradient(self_x);
    return spec.problem.prox[i].prox(acc, spec.alpha);
  }
  // dgd_atc: inputs are messages y_j; self message computed fresh
  bool self_added = false;
  for (int j : neighbors) {
    if (!self_added && j > i) {
      acc.noalias() += spec.W.W(i, i) * atc_message(spec, i, self_x);
      self_added = true;
    }
    acc.noalias() += spec.W.W(i, j) * (*by_node[j]);
  }
  if (!self_added) acc.noalias() += spec.W.W(i, i) * atc_message(spec, i, self_x);
  return acc;
}

BlockVector apply_T_full(const AlgorithmSpec& spec, const BlockVector& x) {
  if (x.nodes() != spec.problem.n || x.dim() != spec.problem.d) {
    throw std::invalid_argument("apply_T_full: shape mismatch");
  }
  // precompute messages once per sender for dgd_atc
  std::vector<Eigen::VectorXd> msgs;
  if (spec.kind == AlgKind::dgd_atc) {
    msgs.reserve(spec.problem.n);
    for (int j = 0; j < spec.problem.n; ++j) {
      msgs.push_back(atc_message(spec, j, x.block(j)));
    }
  }
  BlockVector out(x.nodes(), x.dim());
  for (int i = 0; i < spec.problem.n; ++i) {
    std::vector<NeighborInput> inputs;
    inputs.reserve(spec.graph.adjacency[i].size());
    for (int j : spec.graph.adjacency[i]) {
      inputs.push_back({j, spec.kind == AlgKind::prox_dgd
                               ? Eigen::VectorXd(x.block(j))
                               : msgs[j]});
    }
    out.block(i) = apply_T_block(spec, i, inputs, x.block(i));
  }
  return out;
}

double measure_pseudo_contraction(const AlgorithmSpec& spec,
                                  const BlockVector& x_star, int samples,
                                  std::uint64_t seed) {
  const BlockVector tx = apply_T_full(spec, x_star);
  if (block_max_norm(tx, x_star) > 1e-10) {
    throw std::invalid_argument(
        "measure_pseudo_contraction: x_star is not a verified fixed point");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> scale_dist(-3.0, 2.0);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    BlockVector x = x_star;
    const double scale = std::pow(10.0, scale_dist(rng));
    for (Eigen::Index t = 0; t < x.flat().size(); ++t) {
      x.flat()[t] += scale * gauss(rng);
    }
    const double denom = block_max_norm(x, x_star);
    if (denom == 0.0) continue;
    const double num = block_max_norm(apply_T_full(spec, x), x_star);
    worst = std::max(worst, num / denom);
  }
  return worst;
}

}  // namespace asyncdgd
