#include "ensembed/graph.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace ensembed {

namespace {

bool is_blank(const std::string& line) {
  return line.find_first_not_of(" \t\r\n") == std::string::npos;
}

bool parse_int(const std::string& token, long long& out) {
  const char* first = token.data();
  const char* last = token.data() + token.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

[[noreturn]] void parse_fail(const std::string& path, int line_no,
                             const std::string& what) {
  throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + what);
}

} // namespace

Graph::Graph(int num_nodes, std::vector<std::pair<int, int>> edges)
    : num_nodes_(num_nodes) {
  if (num_nodes_ <= 0)
    throw std::invalid_argument("graph must have at least one node");
  edges_.reserve(edges.size());
  for (auto [u, v] : edges) {
    if (u == v)
      throw std::invalid_argument("self-loop at node " + std::to_string(u));
    if (u < 0 || v < 0 || u >= num_nodes_ || v >= num_nodes_)
      throw std::invalid_argument("edge endpoint out of range: " +
                                  std::to_string(u) + " " + std::to_string(v));
    if (u > v) std::swap(u, v);
    edges_.emplace_back(u, v);
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());

  adjacency_.assign(num_nodes_, {});
  for (const auto& [u, v] : edges_) {
    adjacency_[u].push_back(v);
    adjacency_[v].push_back(u);
  }
  for (auto& nbrs : adjacency_) std::sort(nbrs.begin(), nbrs.end());
}

const std::vector<int>& Graph::neighbors(int u) const {
  if (u < 0 || u >= num_nodes_)
    throw std::out_of_range("node id " + std::to_string(u) +
                            " out of range [0, " + std::to_string(num_nodes_) +
                            ")");
  return adjacency_[u];
}

bool Graph::has_edge(int u, int v) const {
  const auto& nbrs = neighbors(u);
  return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

Graph load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edge list file: " + path);

  std::vector<std::pair<int, int>> edges;
  long long declared_nodes = -1;
  long long max_id = -1;
  bool first_data_line = true;

  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line) || line[0] == '#') continue;

    std::istringstream ls(line);
    std::string a, b, extra;
    ls >> a >> b;
    if (first_data_line && a == "N") {
      first_data_line = false;
      if (!parse_int(b, declared_nodes) || declared_nodes <= 0)
        parse_fail(path, line_no, "bad node-count header: '" + line + "'");
      if (ls >> extra)
        parse_fail(path, line_no, "trailing tokens after node-count header");
      continue;
    }
    first_data_line = false;

    long long u = 0, v = 0;
    if (b.empty() || !parse_int(a, u) || !parse_int(b, v) || (ls >> extra))
      parse_fail(path, line_no, "expected two integer node ids, got '" + line +
                                    "'");
    if (u < 0 || v < 0)
      parse_fail(path, line_no, "negative node id");
    if (u == v)
      parse_fail(path, line_no, "self-loop at node " + std::to_string(u));
    if (declared_nodes >= 0 && std::max(u, v) >= declared_nodes)
      parse_fail(path, line_no,
                 "edge endpoint " + std::to_string(std::max(u, v)) +
                     " exceeds declared node count " +
                     std::to_string(declared_nodes));
    edges.emplace_back(static_cast<int>(u), static_cast<int>(v));
    max_id = std::max({max_id, u, v});
  }

  if (declared_nodes < 0 && edges.empty())
    throw std::runtime_error("empty edge list file: " + path);

  const int n = static_cast<int>(declared_nodes >= 0 ? declared_nodes
                                                     : max_id + 1);
  return Graph(n, std::move(edges));
}

IntVector load_labels(const std::string& path, int num_nodes) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open label file: " + path);

  IntVector raw = IntVector::Constant(num_nodes, -1);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line) || line[0] == '#') continue;

    std::istringstream ls(line);
    std::string a, b, extra;
    ls >> a >> b;
    long long node = 0, label = 0;
    if (b.empty() || !parse_int(a, node) || !parse_int(b, label) ||
        (ls >> extra))
      parse_fail(path, line_no,
                 "expected 'node_id label', got '" + line + "'");
    if (node < 0 || node >= num_nodes)
      parse_fail(path, line_no, "node id " + std::to_string(node) +
                                    " out of range [0, " +
                                    std::to_string(num_nodes) + ")");
    if (label < 0) parse_fail(path, line_no, "negative label");
    if (raw(static_cast<int>(node)) != -1)
      parse_fail(path, line_no,
                 "duplicate label for node " + std::to_string(node));
    raw(static_cast<int>(node)) = static_cast<int>(label);
  }

  std::map<int, int> remap;
  for (int i = 0; i < num_nodes; ++i) {
    if (raw(i) < 0)
      throw std::runtime_error(path + ": node " + std::to_string(i) +
                               " has no label");
    remap.emplace(raw(i), 0);
  }
  int next = 0;
  for (auto& [value, dense] : remap) dense = next++;

  IntVector labels(num_nodes);
  for (int i = 0; i < num_nodes; ++i) labels(i) = remap.at(raw(i));
  return labels;
}

} // namespace ensembed
