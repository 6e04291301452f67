#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "mmdual/error.hpp"

namespace mmdual {

using NodeId = std::size_t;

/// Raised by erdos_renyi when no connected sample was drawn in max_tries.
class NotConnectedAfterRetries : public Error {
 public:
  using Error::Error;
};

/// Undirected simple graph on nodes 0..n-1.
///
/// Neighbor lists are kept sorted ascending so that message schedules built
/// from them are deterministic. Instances are immutable once built.
class Graph {
 public:
  Graph() = default;
  explicit Graph(std::size_t n);
  /// Throws InvalidInput on self-loops and IndexOutOfRange on bad endpoints.
  /// Duplicate edges are collapsed.
  Graph(std::size_t n, const std::vector<std::pair<NodeId, NodeId>>& edges);

  std::size_t num_nodes() const { return adjacency_.size(); }
  std::size_t num_edges() const { return num_edges_; }

  bool adjacent(NodeId i, NodeId j) const;
  const std::vector<NodeId>& neighbors(NodeId i) const;

  /// Unordered edges as (i, j) with i < j, lexicographically sorted.
  std::vector<std::pair<NodeId, NodeId>> edges() const;

  static Graph complete(std::size_t n);
  static Graph path(std::size_t n);
  static Graph cycle(std::size_t n);

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  void check_node(NodeId i) const;

  std::vector<std::vector<NodeId>> adjacency_;
  std::size_t num_edges_ = 0;
};

/// Sorted neighbor list of node i; throws IndexOutOfRange.
const std::vector<NodeId>& neighbors(const Graph& g, NodeId i);

/// True iff a breadth-first sweep from node 0 reaches every node.
bool is_connected(const Graph& g);

/// G(n, p) sample, redrawn until connected. Pairs (i, j), i < j, are visited
/// in lexicographic order and each is kept with probability p; the generator
/// stream continues across redraws so the result is a function of the seed.
Graph erdos_renyi(std::size_t n, double p, std::uint64_t seed, int max_tries = 1000);

/// Edge-list text: optional "# nodes <n>" header, then one "i j" pair per
/// line. Blank lines and other '#' comments are ignored. Without the header
/// the node count is one past the largest endpoint.
Graph read_edge_list(std::istream& in);
Graph read_edge_list_file(const std::string& path);
void write_edge_list(std::ostream& out, const Graph& g);

}  // namespace mmdual
