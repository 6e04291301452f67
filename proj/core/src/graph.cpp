#include "mmdual/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <queue>
#include <sstream>

#include "mmdual/rng.hpp"

namespace mmdual {

Graph::Graph(std::size_t n) : adjacency_(n) {}

Graph::Graph(std::size_t n, const std::vector<std::pair<NodeId, NodeId>>& edges) : adjacency_(n) {
  for (const auto& [i, j] : edges) {
    check_node(i);
    check_node(j);
    if (i == j) {
      throw InvalidInput("self-loop on node " + std::to_string(i));
    }
    adjacency_[i].push_back(j);
    adjacency_[j].push_back(i);
  }
  num_edges_ = 0;
  for (auto& list : adjacency_) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    num_edges_ += list.size();
  }
  num_edges_ /= 2;
}

void Graph::check_node(NodeId i) const {
  if (i >= adjacency_.size()) {
    throw IndexOutOfRange("node " + std::to_string(i) + " out of range for graph with " +
                          std::to_string(adjacency_.size()) + " nodes");
  }
}

bool Graph::adjacent(NodeId i, NodeId j) const {
  check_node(i);
  check_node(j);
  return std::binary_search(adjacency_[i].begin(), adjacency_[i].end(), j);
}

const std::vector<NodeId>& Graph::neighbors(NodeId i) const {
  check_node(i);
  return adjacency_[i];
}

std::vector<std::pair<NodeId, NodeId>> Graph::edges() const {
  std::vector<std::pair<NodeId, NodeId>> out;
  out.reserve(num_edges_);
  for (NodeId i = 0; i < adjacency_.size(); ++i) {
    for (NodeId j : adjacency_[i]) {
      if (i < j) out.emplace_back(i, j);
    }
  }
  return out;
}

Graph Graph::complete(std::size_t n) {
  std::vector<std::pair<NodeId, NodeId>> e;
  for (NodeId i = 0; i < n; ++i)
    for (NodeId j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return Graph(n, e);
}

Graph Graph::path(std::size_t n) {
  std::vector<std::pair<NodeId, NodeId>> e;
  for (NodeId i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return Graph(n, e);
}

Graph Graph::cycle(std::size_t n) {
  std::vector<std::pair<NodeId, NodeId>> e;
  for (NodeId i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  if (n > 2) e.emplace_back(n - 1, 0);
  return Graph(n, e);
}

const std::vector<NodeId>& neighbors(const Graph& g, NodeId i) { return g.neighbors(i); }

bool is_connected(const Graph& g) {
  const std::size_t n = g.num_nodes();
  if (n <= 1) return true;
  std::vector<char> seen(n, 0);
  std::queue<NodeId> frontier;
  frontier.push(0);
  seen[0] = 1;
  std::size_t reached = 1;
  while (!frontier.empty()) {
    const NodeId u = frontier.front();
    frontier.pop();
    for (NodeId v : g.neighbors(u)) {
      if (!seen[v]) {
        seen[v] = 1;
        ++reached;
        frontier.push(v);
      }
    }
  }
  return reached == n;
}

Graph erdos_renyi(std::size_t n, double p, std::uint64_t seed, int max_tries) {
  if (n == 0) throw InvalidInput("erdos_renyi: n must be at least 1");
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("erdos_renyi: p must lie in [0, 1]");
  Rng rng(seed);
  for (int attempt = 0; attempt < max_tries; ++attempt) {
    std::vector<std::pair<NodeId, NodeId>> e;
    for (NodeId i = 0; i < n; ++i) {
      for (NodeId j = i + 1; j < n; ++j) {
        if (rng.uniform() < p) e.emplace_back(i, j);
      }
    }
    Graph g(n, e);
    if (is_connected(g)) return g;
  }
  throw NotConnectedAfterRetries("erdos_renyi: no connected graph with n=" + std::to_string(n) +
                                 ", p=" + std::to_string(p) + " after " +
                                 std::to_string(max_tries) + " draws");
}

Graph read_edge_list(std::istream& in) {
  std::vector<std::pair<NodeId, NodeId>> e;
  std::size_t declared = 0;
  bool has_header = false;
  std::size_t max_node = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#') {
      std::istringstream hs(line.substr(first + 1));
      std::string key;
      if (hs >> key && key == "nodes") {
        if (!(hs >> declared)) throw InvalidInput("edge list: bad node header on line " + std::to_string(line_no));
        has_header = true;
      }
      continue;
    }
    std::istringstream ls(line);
    long long i = -1;
    long long j = -1;
    std::string rest;
    if (!(ls >> i >> j) || i < 0 || j < 0 || (ls >> rest)) {
      throw InvalidInput("edge list: expected 'i j' on line " + std::to_string(line_no));
    }
    e.emplace_back(static_cast<NodeId>(i), static_cast<NodeId>(j));
    max_node = std::max({max_node, static_cast<NodeId>(i), static_cast<NodeId>(j)});
  }
  std::size_t n = has_header ? declared : (e.empty() ? 0 : max_node + 1);
  if (!has_header && e.empty()) throw InvalidInput("edge list: empty file without a node header");
  return Graph(n, e);
}

Graph read_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open edge list '" + path + "'");
  return read_edge_list(in);
}

void write_edge_list(std::ostream& out, const Graph& g) {
  out << "# nodes " << g.num_nodes() << '\n';
  for (const auto& [i, j] : g.edges()) out << i << ' ' << j << '\n';
}

}  // namespace mmdual
