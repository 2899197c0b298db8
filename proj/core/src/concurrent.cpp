#include <chrono>
#include <condition_variable>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

#include "asyncdgd/engine.hpp"

namespace asyncdgd {

namespace {

struct Slot {
  Eigen::VectorXd value;  // x_j (prox_dgd) or y_j (dgd_atc)
  long long index = 0;    // iterate index at which the sender's value became current
  bool fresh = false;
};

struct NodeBuffer {
  std::mutex mu;
  std::condition_variable cv;
  std::vector<Slot> slots;  // one per neighbor, adjacency order
  int fresh_count = 0;
  bool stop = false;
};

struct Sequencer {
  std::mutex mu;
  long long next_k = 0;
  long long budget = 0;
  BlockVector x;
  std::vector<long long> value_index;  // per node
  RunTrace* trace = nullptr;
  const TraceOptions* opts = nullptr;
  const AlgorithmSpec* spec = nullptr;
  std::chrono::steady_clock::time_point start;
  bool done = false;
};

void record_committed(Sequencer& seq, long long k) {
  auto& trace = *seq.trace;
  if (seq.opts->x_star) {
    trace.dist_to_star.push_back(block_max_norm(seq.x, *seq.opts->x_star));
  }
  if (seq.opts->record_F) trace.F_value.push_back(eval_F(seq.spec->problem, seq.x));
  if (seq.opts->record_consensus) {
    trace.consensus_error.push_back(consensus_error(seq.x));
  }
  if (seq.opts->record_mean_F) {
    trace.mean_F.push_back(mean_point_F(seq.spec->problem, seq.x));
  }
  trace.timestamps_ns.push_back(
      std::chrono::duration_cast<std::chrono::nanoseconds>(
          std::chrono::steady_clock::now() - seq.start)
          .count());
  const long long stride = seq.opts->snapshot_stride;
  if ((k + 1) == seq.budget || (stride > 0 && (k + 1) % stride == 0)) {
    trace.snapshot_ks.push_back(k + 1);
    trace.snapshots.push_back(seq.x);
  }
}

void worker(int i, const AlgorithmSpec& spec, int threshold, Sequencer& seq,
            std::vector<NodeBuffer>& buffers) {
  const auto& neighbors = spec.graph.adjacency[i];
  const bool atc = spec.kind == AlgKind::dgd_atc;
  Eigen::VectorXd my_x;
  {
    std::lock_guard<std::mutex> lk(seq.mu);
    my_x = seq.x.block(i);
  }
  NodeBuffer& buf = buffers[i];
  while (true) {
    std::vector<NeighborInput> inputs;
    std::vector<long long> stale;
    {
      std::unique_lock<std::mutex> lk(buf.mu);
      // Activation rule: at least `threshold` fresh neighbor messages. A
      // timed fallback activates on a single fresh message so the run cannot
      // stall when the remaining peers are all waiting too.
      while (!buf.stop && buf.fresh_count < threshold) {
        if (buf.cv.wait_for(lk, std::chrono::milliseconds(50)) ==
                std::cv_status::timeout &&
            buf.fresh_count >= 1) {
          break;
        }
      }
      if (buf.stop) return;
      inputs.reserve(neighbors.size());
      stale.reserve(neighbors.size());
      for (size_t t = 0; t < neighbors.size(); ++t) {
        Slot& slot = buf.slots[t];
        inputs.push_back({neighbors[t], slot.value});
        stale.push_back(slot.index);
        slot.fresh = false;
      }
      buf.fresh_count = 0;
    }

    Eigen::VectorXd next = apply_T_block(spec, i, inputs, my_x);
    Eigen::VectorXd msg = atc ? atc_message(spec, i, next) : next;

    {
      std::lock_guard<std::mutex> lk(seq.mu);
      if (seq.done || seq.next_k >= seq.budget) {
        if (!seq.done) {
          seq.done = true;
          for (auto& b : buffers) {
            std::lock_guard<std::mutex> blk(b.mu);
            b.stop = true;
            b.cv.notify_all();
          }
        }
        return;
      }
      const long long k = seq.next_k++;
      seq.x.block(i) = next;
      seq.value_index[i] = k + 1;
      ScheduleEntry entry;
      entry.node = i;
      entry.stale = std::move(stale);
      seq.trace->schedule.entries.push_back(std::move(entry));
      record_committed(seq, k);
      // broadcast while holding the sequencer lock so per-sender FIFO order
      // and index assignment stay consistent
      for (size_t t = 0; t < neighbors.size(); ++t) {
        const int j = neighbors[t];
        NodeBuffer& nb = buffers[j];
        std::lock_guard<std::mutex> blk(nb.mu);
        const auto& back_adj = spec.graph.adjacency[j];
        const size_t pos = static_cast<size_t>(
            std::lower_bound(back_adj.begin(), back_adj.end(), i) -
            back_adj.begin());
        Slot& slot = nb.slots[pos];
        slot.value = msg;
        slot.index = k + 1;
        if (!slot.fresh) {
          slot.fresh = true;
          ++nb.fresh_count;
        }
        nb.cv.notify_all();
      }
      if (seq.next_k >= seq.budget) {
        seq.done = true;
        for (auto& b : buffers) {
          std::lock_guard<std::mutex> blk(b.mu);
          b.stop = true;
          b.cv.notify_all();
        }
        my_x = std::move(next);
        return;
      }
    }
    my_x = std::move(next);
  }
}

}  // namespace

RunTrace run_concurrent(const AlgorithmSpec& spec, long long update_budget,
                        int activation_threshold, const BlockVector& x0,
                        const TraceOptions& opts) {
  spec.validate();
  const int n = spec.problem.n;
  if (x0.nodes() != n || x0.dim() != spec.problem.d) {
    throw std::invalid_argument("run_concurrent: shape mismatch");
  }
  if (update_budget <= 0) {
    throw std::invalid_argument("run_concurrent: budget must be > 0");
  }

  RunTrace trace;
  trace.kind = spec.kind;
  trace.n = n;
  trace.d = spec.problem.d;
  trace.x0 = x0;
  trace.schedule.n = n;
  trace.schedule.graph = spec.graph;
  trace.schedule.entries.reserve(update_budget);

  Sequencer seq;
  seq.budget = update_budget;
  seq.x = x0;
  seq.value_index.assign(n, 0);
  seq.trace = &trace;
  seq.opts = &opts;
  seq.spec = &spec;
  seq.start = std::chrono::steady_clock::now();

  // initial metric sample at x^0
  if (opts.x_star) trace.dist_to_star.push_back(block_max_norm(x0, *opts.x_star));
  if (opts.record_F) trace.F_value.push_back(eval_F(spec.problem, x0));
  if (opts.record_consensus) trace.consensus_error.push_back(consensus_error(x0));
  if (opts.record_mean_F) trace.mean_F.push_back(mean_point_F(spec.problem, x0));
  trace.snapshot_ks.push_back(0);
  trace.snapshots.push_back(x0);

  const bool atc = spec.kind == AlgKind::dgd_atc;
  std::vector<NodeBuffer> buffers(n);
  for (int i = 0; i < n; ++i) {
    const auto& adj = spec.graph.adjacency[i];
    buffers[i].slots.resize(adj.size());
    for (size_t t = 0; t < adj.size(); ++t) {
      const int j = adj[t];
      // initialization broadcast: every node shares its value before round one
      buffers[i].slots[t].value =
          atc ? atc_message(spec, j, x0.block(j)) : Eigen::VectorXd(x0.block(j));
      buffers[i].slots[t].index = 0;
      buffers[i].slots[t].fresh = true;
      ++buffers[i].fresh_count;
    }
  }

  std::vector<std::thread> threads;
  threads.reserve(n);
  for (int i = 0; i < n; ++i) {
    int thr = activation_threshold;
    if (thr <= 0) thr = std::max(spec.graph.degree(i) - 1, 1);
    thr = std::min(thr, spec.graph.degree(i));
    threads.emplace_back([&, i, thr]() {
      try {
        worker(i, spec, thr, seq, buffers);
      } catch (const std::exception& ex) {
        std::lock_guard<std::mutex> lk(seq.mu);
        trace.failed = true;
        trace.failure = ex.what();
        seq.done = true;
        for (auto& b : buffers) {
          std::lock_guard<std::mutex> blk(b.mu);
          b.stop = true;
          b.cv.notify_all();
        }
      }
    });
  }
  for (auto& t : threads) t.join();

  trace.x_final = seq.x;
  return trace;
}

}  // namespace asyncdgd
