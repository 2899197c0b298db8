#include "asyncdgd/graph.hpp"

#include <algorithm>
#include <istream>
#include <numeric>
#include <ostream>
#include <random>
#include <set>
#include <stdexcept>

namespace asyncdgd {

bool Graph::connected() const {
  if (n == 0) return false;
  std::vector<char> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int v : adjacency[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        stack.push_back(v);
      }
    }
  }
  return count == n;
}

Graph make_graph(int n, std::vector<std::pair<int, int>> edges) {
  if (n <= 0) throw std::invalid_argument("graph: n must be > 0");
  Graph g;
  g.n = n;
  std::set<std::pair<int, int>> dedup;
  for (auto [a, b] : edges) {
    if (a == b) throw std::invalid_argument("graph: self-loop");
    if (a > b) std::swap(a, b);
    if (a < 0 || b >= n) throw std::invalid_argument("graph: node out of range");
    if (!dedup.insert({a, b}).second) {
      throw std::invalid_argument("graph: duplicate edge");
    }
  }
  g.edges.assign(dedup.begin(), dedup.end());
  g.adjacency.assign(n, {});
  for (auto [a, b] : g.edges) {
    g.adjacency[a].push_back(b);
    g.adjacency[b].push_back(a);
  }
  for (auto& lst : g.adjacency) std::sort(lst.begin(), lst.end());
  return g;
}

Graph line_graph(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return make_graph(n, std::move(e));
}

Graph ring_graph(int n) {
  if (n < 3) throw std::invalid_argument("ring: need n >= 3");
  auto g = line_graph(n).edges;
  g.emplace_back(0, n - 1);
  return make_graph(n, std::move(g));
}

Graph star_graph(int n) {
  if (n < 2) throw std::invalid_argument("star: need n >= 2");
  std::vector<std::pair<int, int>> e;
  for (int i = 1; i < n; ++i) e.emplace_back(0, i);
  return make_graph(n, std::move(e));
}

Graph complete_graph(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return make_graph(n, std::move(e));
}

Graph random_connected_graph(int n, int m_edges, std::uint64_t seed) {
  if (m_edges < n - 1) {
    throw std::invalid_argument("random_connected: need m_edges >= n-1");
  }
  const long long max_edges = static_cast<long long>(n) * (n - 1) / 2;
  if (m_edges > max_edges) {
    throw std::invalid_argument("random_connected: m_edges exceeds complete graph");
  }
  std::mt19937_64 rng(seed);
  // random spanning tree: attach each node to a uniformly chosen earlier node
  // of a random permutation
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::set<std::pair<int, int>> chosen;
  for (int i = 1; i < n; ++i) {
    std::uniform_int_distribution<int> pick(0, i - 1);
    int a = perm[i], b = perm[pick(rng)];
    if (a > b) std::swap(a, b);
    chosen.insert({a, b});
  }
  std::uniform_int_distribution<int> node(0, n - 1);
  while (static_cast<int>(chosen.size()) < m_edges) {
    int a = node(rng), b = node(rng);
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    chosen.insert({a, b});
  }
  return make_graph(n, {chosen.begin(), chosen.end()});
}

void write_edge_list(std::ostream& os, const Graph& g) {
  for (auto [a, b] : g.edges) os << a << ' ' << b << '\n';
}

Graph read_edge_list(std::istream& is, int n) {
  std::vector<std::pair<int, int>> e;
  int a, b;
  while (is >> a >> b) e.emplace_back(a, b);
  return make_graph(n, std::move(e));
}

}  // namespace asyncdgd
