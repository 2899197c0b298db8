#include "asyncdgd/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace asyncdgd {

void Schedule::validate() const {
  if (n != graph.n) throw std::invalid_argument("schedule: n/graph mismatch");
  for (long long k = 0; k < horizon(); ++k) {
    const auto& e = entries[k];
    if (e.node < 0 || e.node >= n) {
      throw std::invalid_argument("schedule: node out of range");
    }
    if (e.stale.size() != graph.adjacency[e.node].size()) {
      throw std::invalid_argument("schedule: stale list size mismatch");
    }
    for (long long s : e.stale) {
      if (s > k) throw std::invalid_argument("schedule: stale index > k");
    }
  }
}

Schedule gen_synchronous(const Graph& g, long long K) {
  if (K % g.n != 0) {
    throw std::invalid_argument("gen_synchronous: K must be a multiple of n");
  }
  Schedule s;
  s.n = g.n;
  s.graph = g;
  s.round_structured = true;
  s.entries.reserve(K);
  for (long long k = 0; k < K; ++k) {
    const long long round_start = (k / g.n) * g.n;
    ScheduleEntry e;
    e.node = static_cast<int>(k % g.n);
    e.stale.assign(g.adjacency[e.node].size(), round_start);
    s.entries.push_back(std::move(e));
  }
  return s;
}

namespace {

// EDF-style feasibility: with one activation per step, the remaining nodes
// sorted by slack must each fit before their deadline.
bool feasible_after(const std::vector<long long>& slack, int skip) {
  std::vector<long long> rest;
  rest.reserve(slack.size());
  for (int i = 0; i < static_cast<int>(slack.size()); ++i) {
    if (i != skip) rest.push_back(slack[i]);
  }
  std::sort(rest.begin(), rest.end());
  for (size_t j = 0; j < rest.size(); ++j) {
    if (rest[j] < static_cast<long long>(j) + 1) return false;
  }
  return true;
}

}  // namespace

Schedule gen_partial_async(const Graph& g, long long B, long long D,
                           long long K, std::uint64_t seed) {
  const int n = g.n;
  if (B < n - 1) {
    throw std::invalid_argument(
        "gen_partial_async: B < n-1 is infeasible under single-activation "
        "indexing (a window of B+1 slots must cover all n nodes)");
  }
  if (D < 0) throw std::invalid_argument("gen_partial_async: D must be >= 0");
  std::mt19937_64 rng(seed);
  Schedule s;
  s.n = n;
  s.graph = g;
  s.entries.reserve(K);
  // slack[i] = steps until node i's activation deadline (inclusive of now)
  std::vector<long long> last(n, -1);
  std::uniform_int_distribution<int> pick_node(0, n - 1);
  for (long long k = 0; k < K; ++k) {
    std::vector<long long> slack(n);
    for (int i = 0; i < n; ++i) slack[i] = last[i] + B + 1 - k;
    int active = pick_node(rng);
    if (slack[active] > 0 && !feasible_after(slack, active)) {
      active = static_cast<int>(
          std::min_element(slack.begin(), slack.end()) - slack.begin());
    } else if (slack[active] <= 0) {
      // the random pick is overdue anyway; keep it
    }
    // overdue guard: always serve the most urgent node when at deadline
    const int urgent = static_cast<int>(
        std::min_element(slack.begin(), slack.end()) - slack.begin());
    if (slack[urgent] <= 0) active = urgent;
    last[active] = k;
    ScheduleEntry e;
    e.node = active;
    const long long lo = std::max<long long>(0, k - D);
    std::uniform_int_distribution<long long> pick_stale(lo, k);
    for (size_t t = 0; t < g.adjacency[active].size(); ++t) {
      e.stale.push_back(pick_stale(rng));
    }
    s.entries.push_back(std::move(e));
  }
  return s;
}

Schedule gen_total_async(const Graph& g, double growth, long long K,
                         std::uint64_t seed) {
  if (growth <= 0) throw std::invalid_argument("gen_total_async: growth must be > 0");
  const int n = g.n;
  std::mt19937_64 rng(seed);
  Schedule s;
  s.n = n;
  s.graph = g;
  s.entries.reserve(K);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::uniform_int_distribution<int> factor(1, n);
  long long k = 0;
  int block = 0;
  while (k < K) {
    // block: c mini-rounds of the n-1 non-laggard nodes, then one laggard slot
    const int laggard = block % n;
    const long long c = std::max<long long>(
        1, static_cast<long long>(std::ceil(growth * (1.0 + std::log1p(static_cast<double>(k))))));
    std::vector<int> others;
    for (int i = 0; i < n; ++i) {
      if (i != laggard) others.push_back(i);
    }
    std::vector<int> slots;
    for (long long r = 0; r < c; ++r) {
      std::shuffle(others.begin(), others.end(), rng);
      slots.insert(slots.end(), others.begin(), others.end());
    }
    slots.push_back(laggard);
    for (int node : slots) {
      if (k >= K) break;
      ScheduleEntry e;
      e.node = node;
      const long long bound = static_cast<long long>(
          std::ceil(growth * (1.0 + std::log1p(static_cast<double>(k)))));
      for (size_t t = 0; t < g.adjacency[node].size(); ++t) {
        long long delay;
        if (node == laggard) {
          delay = bound * n;  // pin the laggard at the growing delay envelope
        } else {
          delay = std::uniform_int_distribution<long long>(0, bound * factor(rng))(rng);
        }
        e.stale.push_back(std::max<long long>(0, k - delay));
      }
      s.entries.push_back(std::move(e));
      ++k;
    }
    ++block;
  }
  return s;
}

Schedule gen_worst_case(const Graph& g, long long B, long long D, long long K) {
  const int n = g.n;
  if (B < n + 1 || D < 1) {
    throw std::invalid_argument(
        "gen_worst_case: requires B >= n+1 and D >= 1 so the laggard update "
        "chain fits the single-activation indexing");
  }
  const long long P = B + D + 1;
  // laggard node 0 updates at u_m = m*P + D - 1 and on the (B+1)-grid between
  std::set<long long> laggard_slots;
  for (long long j = 1; D - 1 - j * (B + 1) >= 0; ++j) {
    laggard_slots.insert(D - 1 - j * (B + 1));
  }
  for (long long m = 0;; ++m) {
    const long long um = m * P + D - 1;
    if (um >= K) break;
    for (long long t = um; t < (m + 1) * P + D - 1 && t < K; t += B + 1) {
      if (t >= 0) laggard_slots.insert(t);
    }
  }
  Schedule s;
  s.n = n;
  s.graph = g;
  s.entries.reserve(K);
  int rr = 1 % n;
  for (long long k = 0; k < K; ++k) {
    int node;
    if (laggard_slots.count(k)) {
      node = 0;
    } else {
      node = rr;
      rr = rr + 1 >= n ? (n > 1 ? 1 : 0) : rr + 1;
    }
    ScheduleEntry e;
    e.node = node;
    e.stale.assign(g.adjacency[node].size(), k - D);  // may be negative
    s.entries.push_back(std::move(e));
  }
  return s;
}

Schedule gen_best_case(const Graph& g, long long B, long long D, long long K) {
  const int n = g.n;
  if (B < n || D < 0) {
    throw std::invalid_argument("gen_best_case: requires B >= n and D >= 0");
  }
  Schedule s;
  s.n = n;
  s.graph = g;
  s.entries.reserve(K);
  int rr = 1 % n;
  for (long long k = 0; k < K; ++k) {
    ScheduleEntry e;
    long long stale;
    if (k < B) {
      // warmup: the other nodes rotate with fresh reads, node 0 stays silent
      e.node = rr;
      rr = rr + 1 >= n ? (n > 1 ? 1 : 0) : rr + 1;
      stale = k;
    } else if (k == B) {
      // the single (B, D) event: node 0 first activates at B with age-D reads
      e.node = 0;
      stale = k - D;  // may be negative
    } else {
      e.node = static_cast<int>((k - B - 1) % n);
      stale = k;
    }
    e.stale.assign(g.adjacency[e.node].size(), stale);
    s.entries.push_back(std::move(e));
  }
  return s;
}

PartialAsyncReport verify_partial_async(const Schedule& s) {
  const int n = s.n;
  const long long K = s.horizon();
  PartialAsyncReport r;
  std::vector<long long> first(n, -1), last(n, -1), max_gap(n, 0);
  long long max_delay = 0;
  for (long long k = 0; k < K; ++k) {
    const auto& e = s.entries[k];
    if (first[e.node] < 0) {
      first[e.node] = k;
    } else {
      max_gap[e.node] = std::max(max_gap[e.node], k - last[e.node]);
    }
    last[e.node] = k;
    for (long long st : e.stale) max_delay = std::max(max_delay, k - st);
  }
  for (int i = 0; i < n; ++i) {
    if (first[i] < 0) {
      r.holds = false;
      return r;
    }
  }
  long long B = 0;
  for (int i = 0; i < n; ++i) {
    B = std::max({B, first[i], max_gap[i] - 1});
  }
  r.holds = true;
  r.B_min = B;
  r.D_min = max_delay;
  return r;
}

DelayMetrics delay_metrics(const Schedule& s) {
  const int n = s.n;
  const long long K = s.horizon();
  DelayMetrics m;
  m.tau.resize(K);
  m.mk.resize(K);

  std::vector<long long> last(n, -1);
  // min stale index consumed at each node's most recent update (incl. self).
  // A node that has not updated yet still holds its initial value; that block
  // counts as information of virtual index -1, which keeps the first epoch
  // open until every node has gone through the operator at least once.
  std::vector<long long> min_at_last(n, -1);
  std::vector<long long> r(K);
  std::vector<long long> first(n, -1), max_gap(n, 0);
  for (long long k = 0; k < K; ++k) {
    const auto& e = s.entries[k];
    if (first[e.node] < 0) {
      first[e.node] = k;
    } else {
      max_gap[e.node] = std::max(max_gap[e.node], k - last[e.node]);
    }
    long long mn = k;  // self read s_ii = k
    for (long long st : e.stale) {
      mn = std::min(mn, st);
      ++m.delay_histogram[k - st];
      ++m.total_reads;
      m.observed_D = std::max(m.observed_D, k - st);
    }
    last[e.node] = k;
    min_at_last[e.node] = mn;
    long long oldest = std::numeric_limits<long long>::max();
    for (int i = 0; i < n; ++i) oldest = std::min(oldest, min_at_last[i]);
    m.tau[k] = k - oldest;
    r[k] = oldest;
  }
  for (int i = 0; i < n; ++i) {
    if (first[i] >= 0) {
      m.observed_B = std::max({m.observed_B, first[i], max_gap[i] - 1});
    }
  }

  // suffix minima of r, then the k^m recursion
  std::vector<long long> suffix_min(K);
  long long cur = std::numeric_limits<long long>::max();
  for (long long k = K - 1; k >= 0; --k) {
    cur = std::min(cur, r[k]);
    suffix_min[k] = cur;
  }
  m.km.push_back(0);
  long long scan = 0;
  while (true) {
    const long long target = m.km.back();
    while (scan < K && suffix_min[scan] < target) ++scan;
    if (scan >= K) break;
    const long long next = scan + 1;
    if (next <= m.km.back() || next > K) break;
    m.km.push_back(next);
    if (next >= K) break;
  }
  size_t idx = 0;
  for (long long k = 0; k < K; ++k) {
    while (idx + 1 < m.km.size() && m.km[idx + 1] <= k) ++idx;
    m.mk[k] = static_cast<long long>(idx);
  }
  return m;
}

void write_schedule(std::ostream& os, const Schedule& s) {
  for (long long k = 0; k < s.horizon(); ++k) {
    const auto& e = s.entries[k];
    os << k << ' ' << e.node;
    for (long long st : e.stale) os << ' ' << st;
    os << '\n';
  }
}

Schedule read_schedule(std::istream& is, const Graph& g) {
  Schedule s;
  s.n = g.n;
  s.graph = g;
  std::string line;
  long long expect = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    long long k;
    ScheduleEntry e;
    if (!(ls >> k >> e.node)) throw std::invalid_argument("schedule: bad line");
    if (k != expect) throw std::invalid_argument("schedule: non-contiguous k");
    long long st;
    while (ls >> st) e.stale.push_back(st);
    s.entries.push_back(std::move(e));
    ++expect;
  }
  s.validate();
  return s;
}

}  // namespace asyncdgd
