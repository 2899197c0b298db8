#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <vector>

#include "asyncdgd/graph.hpp"

namespace asyncdgd {

// One global iteration: exactly one active node, with the stale index of the
// value it consumed from each neighbor (ascending neighbor order). A stale
// index s means the active node used block j of the global iterate x^s; the
// self index s_ii = k is implicit. Negative s denotes pre-start information
// (the initial value, aged as if computed at that virtual index).
struct ScheduleEntry {
  int node = 0;
  std::vector<long long> stale;
};

struct Schedule {
  int n = 0;
  Graph graph;
  std::vector<ScheduleEntry> entries;
  bool round_structured = false;  // set by gen_synchronous

  long long horizon() const { return static_cast<long long>(entries.size()); }
  void validate() const;
};

// Round-robin activation; every read points at the last round boundary.
// K must be a multiple of n.
Schedule gen_synchronous(const Graph& g, long long K);

// Random schedule provably satisfying the (B, D) partial-asynchrony clauses.
// Rejects B < n-1: with one activation per iteration a window of B+1 < n slots
// cannot cover all n nodes.
Schedule gen_partial_async(const Graph& g, long long B, long long D,
                           long long K, std::uint64_t seed);

// Unbounded but divergence-compliant delays; gaps and delays grow ~ log k.
Schedule gen_total_async(const Graph& g, double growth, long long K,
                         std::uint64_t seed);

// Attains m^k = floor(k/(B+D+1)) exactly. Requires B >= n+1 and D >= 1 so the
// laggard chain fits the single-activation indexing.
Schedule gen_worst_case(const Graph& g, long long B, long long D, long long K);

// Realizes (B, D) once in a warmup window, then cyclic with zero delays.
Schedule gen_best_case(const Graph& g, long long B, long long D, long long K);

struct PartialAsyncReport {
  bool holds = false;
  long long B_min = 0;
  long long D_min = 0;
};

// Smallest (B, D) the schedule satisfies; holds=false if some node never
// activates within the horizon.
PartialAsyncReport verify_partial_async(const Schedule& s);

struct DelayMetrics {
  std::vector<long long> tau;        // tau^k, size K
  std::vector<long long> km;         // epoch boundaries k^0=0, k^1, ...
  std::vector<long long> mk;         // m^k = max{m : k^m <= k}, size K
  long long observed_B = 0;
  long long observed_D = 0;
  std::map<long long, long long> delay_histogram;  // age -> count over all reads
  long long total_reads = 0;
};

DelayMetrics delay_metrics(const Schedule& s);

// Text lines "k i s1 s2 ..." (neighbor ascending); round-trips exactly.
void write_schedule(std::ostream& os, const Schedule& s);
Schedule read_schedule(std::istream& is, const Graph& g);

}  // namespace asyncdgd
