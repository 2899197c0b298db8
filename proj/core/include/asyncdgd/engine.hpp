#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "asyncdgd/block_vector.hpp"
#include "asyncdgd/operators.hpp"
#include "asyncdgd/schedule.hpp"

namespace asyncdgd {

struct TraceOptions {
  std::optional<BlockVector> x_star;  // enables distance_to_fixed_point
  long long snapshot_stride = 0;      // 0: first and last only
  bool record_F = false;
  bool record_consensus = false;
  bool record_mean_F = false;  // F evaluated at the consensus average
};

struct RunTrace {
  AlgKind kind = AlgKind::prox_dgd;
  int n = 0;
  int d = 0;
  BlockVector x0;
  BlockVector x_final;
  Schedule schedule;  // input schedule (simulate) or recorded (concurrent)

  std::vector<long long> snapshot_ks;
  std::vector<BlockVector> snapshots;

  // per-iterate series indexed by k = 0..K (value at iterate x^k)
  std::vector<double> dist_to_star;
  std::vector<double> F_value;
  std::vector<double> consensus_error;
  std::vector<double> mean_F;            // F(1 (x) xbar^k)
  std::vector<long long> timestamps_ns;  // concurrent mode, per update

  bool failed = false;
  std::string failure;
};

// Replays a schedule deterministically. Block updates use apply_T_block with
// historical inputs; identical arithmetic order to the concurrent runtime.
RunTrace simulate(const AlgorithmSpec& spec, const Schedule& schedule,
                  const BlockVector& x0, const TraceOptions& opts = {});

// Synchronous baseline: iterates apply_T_full.
RunTrace run_synchronous(const AlgorithmSpec& spec, long long iterations,
                         const BlockVector& x0, const TraceOptions& opts = {});

// Real per-node workers with single-slot per-neighbor message buffers. A
// global sequencer assigns iteration indices in update-completion order and
// records every consumed stale index, yielding a replayable Schedule.
// activation_threshold <= 0 selects the default max(|N_i|-1, 1).
RunTrace run_concurrent(const AlgorithmSpec& spec, long long update_budget,
                        int activation_threshold, const BlockVector& x0,
                        const TraceOptions& opts = {});

// CSV: k,active_node,distance_to_fixed_point,F_value,consensus_error
// (+mean_F and timestamp_ns when present). Missing metrics are empty fields.
void write_trace_csv(std::ostream& os, const RunTrace& trace);

double consensus_error(const BlockVector& x);

// F evaluated with every block replaced by the consensus average.
double mean_point_F(const ConsensusProblem& p, const BlockVector& x);

}  // namespace asyncdgd
