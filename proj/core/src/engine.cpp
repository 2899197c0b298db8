#include "asyncdgd/engine.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace asyncdgd {

double consensus_error(const BlockVector& x) {
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(x.dim());
  for (int i = 0; i < x.nodes(); ++i) mean += x.block(i);
  mean /= x.nodes();
  double worst = 0.0;
  for (int i = 0; i < x.nodes(); ++i) {
    worst = std::max(worst, (x.block(i) - mean).norm());
  }
  return worst;
}

double mean_point_F(const ConsensusProblem& p, const BlockVector& x) {
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(x.dim());
  for (int i = 0; i < x.nodes(); ++i) mean += x.block(i);
  mean /= x.nodes();
  BlockVector bar(x.nodes(), x.dim());
  for (int i = 0; i < x.nodes(); ++i) bar.block(i) = mean;
  return eval_F(p, bar);
}

namespace {

void record_metrics(const AlgorithmSpec& spec, const TraceOptions& opts,
                    const BlockVector& x, RunTrace* trace) {
  if (opts.x_star) {
    trace->dist_to_star.push_back(block_max_norm(x, *opts.x_star));
  }
  if (opts.record_F) trace->F_value.push_back(eval_F(spec.problem, x));
  if (opts.record_consensus) trace->consensus_error.push_back(consensus_error(x));
  if (opts.record_mean_F) trace->mean_F.push_back(mean_point_F(spec.problem, x));
}

void maybe_snapshot(long long k, long long K, const TraceOptions& opts,
                    const BlockVector& x, RunTrace* trace) {
  const bool take = k == 0 || k == K ||
                    (opts.snapshot_stride > 0 && k % opts.snapshot_stride == 0);
  if (take) {
    trace->snapshot_ks.push_back(k);
    trace->snapshots.push_back(x);
  }
}

// Per-node value history: the block value in effect from iterate index
// `since` onward. Stale lookups resolve through this piecewise-constant view.
struct NodeHistory {
  std::vector<long long> since;
  std::vector<Eigen::VectorXd> value;    // x_j
  std::vector<Eigen::VectorXd> message;  // y_j (dgd_atc only)

  const Eigen::VectorXd& value_at(long long s) const {
    return value[pos(s)];
  }
  const Eigen::VectorXd& message_at(long long s) const {
    return message[pos(s)];
  }
  size_t pos(long long s) const {
    // last entry with since <= s; s < 0 resolves to the initial value
    auto it = std::upper_bound(since.begin(), since.end(), s);
    return it == since.begin() ? 0 : static_cast<size_t>(it - since.begin() - 1);
  }
};

}  // namespace

RunTrace simulate(const AlgorithmSpec& spec, const Schedule& schedule,
                  const BlockVector& x0, const TraceOptions& opts) {
  spec.validate();
  schedule.validate();
  const int n = spec.problem.n;
  if (schedule.n != n || x0.nodes() != n || x0.dim() != spec.problem.d) {
    throw std::invalid_argument("simulate: shape mismatch");
  }
  const long long K = schedule.horizon();

  RunTrace trace;
  trace.kind = spec.kind;
  trace.n = n;
  trace.d = spec.problem.d;
  trace.x0 = x0;
  trace.schedule = schedule;

  std::vector<NodeHistory> hist(n);
  const bool atc = spec.kind == AlgKind::dgd_atc;
  for (int j = 0; j < n; ++j) {
    hist[j].since.push_back(0);
    hist[j].value.push_back(x0.block(j));
    if (atc) hist[j].message.push_back(atc_message(spec, j, x0.block(j)));
  }

  BlockVector x = x0;
  record_metrics(spec, opts, x, &trace);
  maybe_snapshot(0, K, opts, x, &trace);

  for (long long k = 0; k < K; ++k) {
    const auto& e = schedule.entries[k];
    const int i = e.node;
    const auto& neighbors = schedule.graph.adjacency[i];
    std::vector<NeighborInput> inputs;
    inputs.reserve(neighbors.size());
    for (size_t t = 0; t < neighbors.size(); ++t) {
      const int j = neighbors[t];
      const long long s = e.stale[t];
      inputs.push_back({j, atc ? hist[j].message_at(s) : hist[j].value_at(s)});
    }
    Eigen::VectorXd next = apply_T_block(spec, i, inputs, x.block(i));
    x.block(i) = next;
    hist[i].since.push_back(k + 1);
    if (atc) hist[i].message.push_back(atc_message(spec, i, next));
    hist[i].value.push_back(std::move(next));
    record_metrics(spec, opts, x, &trace);
    maybe_snapshot(k + 1, K, opts, x, &trace);
  }
  trace.x_final = x;
  return trace;
}

RunTrace run_synchronous(const AlgorithmSpec& spec, long long iterations,
                         const BlockVector& x0, const TraceOptions& opts) {
  spec.validate();
  RunTrace trace;
  trace.kind = spec.kind;
  trace.n = spec.problem.n;
  trace.d = spec.problem.d;
  trace.x0 = x0;

  BlockVector x = x0;
  record_metrics(spec, opts, x, &trace);
  maybe_snapshot(0, iterations, opts, x, &trace);
  for (long long k = 0; k < iterations; ++k) {
    x = apply_T_full(spec, x);
    record_metrics(spec, opts, x, &trace);
    maybe_snapshot(k + 1, iterations, opts, x, &trace);
  }
  trace.x_final = x;
  return trace;
}

void write_trace_csv(std::ostream& os, const RunTrace& trace) {
  const bool ts = !trace.timestamps_ns.empty();
  const bool mf = !trace.mean_F.empty();
  os << "k,active_node,distance_to_fixed_point,F_value,consensus_error";
  if (mf) os << ",mean_F";
  if (ts) os << ",timestamp_ns";
  os << '\n';
  const long long K = trace.schedule.horizon();
  char buf[64];
  auto fmt = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  for (long long k = 0; k <= K; ++k) {
    os << k << ',';
    if (k > 0 && k <= K && K > 0) {
      os << trace.schedule.entries[k - 1].node;
    }
    os << ',';
    if (static_cast<size_t>(k) < trace.dist_to_star.size()) {
      os << fmt(trace.dist_to_star[k]);
    }
    os << ',';
    if (static_cast<size_t>(k) < trace.F_value.size()) {
      os << fmt(trace.F_value[k]);
    }
    os << ',';
    if (static_cast<size_t>(k) < trace.consensus_error.size()) {
      os << fmt(trace.consensus_error[k]);
    }
    if (mf) {
      os << ',';
      if (static_cast<size_t>(k) < trace.mean_F.size()) {
        os << fmt(trace.mean_F[k]);
      }
    }
    if (ts) {
      os << ',';
      if (k > 0 && static_cast<size_t>(k - 1) < trace.timestamps_ns.size()) {
        os << trace.timestamps_ns[k - 1];
      }
    }
    os << '\n';
  }
}

}  // namespace asyncdgd
