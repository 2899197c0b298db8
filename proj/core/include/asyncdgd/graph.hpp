#pragma once

#include <cstdint>
#include <iosfwd>
#include <utility>
#include <vector>

namespace asyncdgd {

// Undirected connected graph over nodes 0..n-1.
struct Graph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;   // i < j, sorted, no duplicates
  std::vector<std::vector<int>> adjacency;  // sorted neighbor lists

  bool connected() const;
  int degree(int i) const { return static_cast<int>(adjacency[i].size()); }
};

Graph make_graph(int n, std::vector<std::pair<int, int>> edges);

Graph line_graph(int n);
Graph ring_graph(int n);
Graph star_graph(int n);
// Random spanning tree plus uniformly chosen extra edges; deterministic per seed.
Graph random_connected_graph(int n, int m_edges, std::uint64_t seed);
Graph complete_graph(int n);

// Edge-list text: one "i j" pair per line, 0-indexed.
void write_edge_list(std::ostream& os, const Graph& g);
Graph read_edge_list(std::istream& is, int n);

}  // namespace asyncdgd
