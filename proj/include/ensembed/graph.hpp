#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ensembed/types.hpp"

namespace ensembed {

/// Simple undirected graph over dense node ids 0..N-1.
///
/// Edges are stored once as ordered pairs (u < v) and queried symmetrically.
/// Self-loops and duplicate edges are rejected at construction. Immutable
/// after construction, safe to share read-only across threads.
class Graph {
 public:
  Graph(int num_nodes, std::vector<std::pair<int, int>> edges);

  int num_nodes() const { return num_nodes_; }
  int num_edges() const { return static_cast<int>(edges_.size()); }

  /// Sorted, deduplicated edge list with u < v in every pair.
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }

  /// Sorted neighbor list of u. Throws if u is out of range.
  const std::vector<int>& neighbors(int u) const;

  int degree(int u) const { return static_cast<int>(neighbors(u).size()); }

  bool has_edge(int u, int v) const;

 private:
  int num_nodes_ = 0;
  std::vector<std::pair<int, int>> edges_;
  std::vector<std::vector<int>> adjacency_;
};

/// Parse an undirected edge list file.
///
/// Format: one edge per line, two whitespace-separated decimal node ids.
/// Lines starting with '#' and blank lines are ignored. An optional first
/// data line "N <count>" declares the node count; otherwise the node count is
/// 1 + the largest id seen. Duplicate and reversed edge lines collapse to one
/// edge; self-loops and malformed lines are errors (with line numbers).
Graph load_edge_list(const std::string& path);

/// Parse a ground-truth label file: one "node_id label" pair per line, '#'
/// comments allowed. Every node in [0, num_nodes) must be labeled exactly
/// once. Distinct label values are remapped, in increasing numeric order, to
/// the contiguous range 0..k-1.
IntVector load_labels(const std::string& path, int num_nodes);

/// Dense N x N binary adjacency matrix: symmetric with zero diagonal.
template <typename Scalar = Real>
MatX<Scalar> adjacency(const Graph& g) {
  const int n = g.num_nodes();
  MatX<Scalar> a = MatX<Scalar>::Zero(n, n);
  for (const auto& [u, v] : g.edges()) {
    a(u, v) = Scalar(1);
    a(v, u) = Scalar(1);
  }
  return a;
}

} // namespace ensembed
