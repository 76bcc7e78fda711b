#include "gramforge/graph.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>

#include "gramforge/error.hpp"

namespace gramforge {

Edge normalized(int i, int j) {
  return i < j ? Edge{i, j} : Edge{j, i};
}

Graph::Graph(int n, std::vector<Edge> edges) : n_(n) {
  if (n < 1) fail(ErrorKind::ParseError, "graph needs at least one node");
  edges_.reserve(edges.size());
  for (auto [i, j] : edges) {
    if (i == j) fail(ErrorKind::InvalidEdge, "self-loop at node " + std::to_string(i));
    if (i < 0 || j < 0 || i >= n || j >= n)
      fail(ErrorKind::InvalidEdge, "edge endpoint out of range");
    edges_.push_back(normalized(i, j));
  }
  std::sort(edges_.begin(), edges_.end());
  edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
  adj_.assign(n_, {});
  for (auto [i, j] : edges_) {
    adj_[i].push_back(j);
    adj_[j].push_back(i);
  }
  for (auto& nb : adj_) std::sort(nb.begin(), nb.end());
}

const std::vector<int>& Graph::neighbors(int v) const {
  if (v < 0 || v >= n_) fail(ErrorKind::InvalidEdge, "node out of range");
  return adj_[v];
}

int Graph::degree(int v) const { return static_cast<int>(neighbors(v).size()); }

bool Graph::has_edge(int i, int j) const {
  if (i == j || i < 0 || j < 0 || i >= n_ || j >= n_) return false;
  const auto& nb = adj_[i];
  return std::binary_search(nb.begin(), nb.end(), j);
}

int Graph::edge_index(int i, int j) const {
  Edge e = normalized(i, j);
  auto it = std::lower_bound(edges_.begin(), edges_.end(), e);
  if (it == edges_.end() || *it != e) return -1;
  return static_cast<int>(it - edges_.begin());
}

std::uint64_t Graph::adjacency_mask(int v) const {
  if (n_ > 64) fail(ErrorKind::SizeGuard, "adjacency masks need n <= 64");
  std::uint64_t m = 0;
  for (int u : neighbors(v)) m |= std::uint64_t{1} << u;
  return m;
}

bool Graph::is_clique(const std::vector<int>& nodes) const {
  for (size_t a = 0; a < nodes.size(); ++a)
    for (size_t b = a + 1; b < nodes.size(); ++b)
      if (!has_edge(nodes[a], nodes[b])) return false;
  return true;
}

Graph Graph::complement() const {
  std::vector<Edge> ce;
  for (int i = 0; i < n_; ++i)
    for (int j = i + 1; j < n_; ++j)
      if (!has_edge(i, j)) ce.push_back({i, j});
  return Graph(n_, std::move(ce));
}

Graph Graph::induced_subgraph(const std::vector<int>& nodes) const {
  std::vector<int> pos(n_, -1);
  for (size_t t = 0; t < nodes.size(); ++t) {
    int v = nodes[t];
    if (v < 0 || v >= n_) fail(ErrorKind::InvalidEdge, "node out of range");
    if (pos[v] >= 0) fail(ErrorKind::InvalidEdge, "repeated node in selection");
    pos[v] = static_cast<int>(t);
  }
  std::vector<Edge> se;
  for (auto [i, j] : edges_)
    if (pos[i] >= 0 && pos[j] >= 0) se.push_back(normalized(pos[i], pos[j]));
  return Graph(static_cast<int>(nodes.size()), std::move(se));
}

std::vector<std::vector<int>> Graph::connected_components() const {
  std::vector<int> comp(n_, -1);
  std::vector<std::vector<int>> out;
  for (int s = 0; s < n_; ++s) {
    if (comp[s] >= 0) continue;
    int id = static_cast<int>(out.size());
    out.push_back({});
    std::vector<int> stack{s};
    comp[s] = id;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      out[id].push_back(v);
      for (int u : adj_[v])
        if (comp[u] < 0) {
          comp[u] = id;
          stack.push_back(u);
        }
    }
    std::sort(out[id].begin(), out[id].end());
  }
  return out;
}

Graph delete_edge(const Graph& g, Edge e) {
  e = normalized(e.first, e.second);
  if (!g.has_edge(e.first, e.second))
    fail(ErrorKind::InvalidEdge, "cannot delete a missing edge");
  std::vector<Edge> edges;
  edges.reserve(g.edge_count() - 1);
  for (auto ge : g.edges())
    if (ge != e) edges.push_back(ge);
  return Graph(g.node_count(), std::move(edges));
}

Graph contract_edge(const Graph& g, Edge e) {
  auto [u, v] = normalized(e.first, e.second);
  if (!g.has_edge(u, v)) fail(ErrorKind::InvalidEdge, "cannot contract a missing edge");
  int n = g.node_count();
  auto relabel = [&](int i) {
    if (i == v) return u;
    if (i == n - 1) return v;  // last label fills the freed slot
    return i;
  };
  std::vector<Edge> edges;
  for (auto [a, b] : g.edges()) {
    int x = relabel(a), y = relabel(b);
    if (x != y) edges.push_back(normalized(x, y));
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return Graph(n - 1, std::move(edges));
}

Graph suspension(const Graph& g) {
  int n = g.node_count();
  std::vector<Edge> edges = g.edges();
  for (int i = 0; i < n; ++i) edges.push_back({i, n});
  return Graph(n + 1, std::move(edges));
}

Graph apex_iterate(const Graph& g, int k) {
  if (k < 0) fail(ErrorKind::ParseError, "apex count must be nonnegative");
  Graph out = g;
  for (int t = 0; t < k; ++t) out = suspension(out);
  return out;
}

namespace {

Graph complete_graph(int n) {
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) edges.push_back({i, j});
  return Graph(n, std::move(edges));
}

Graph complete_bipartite(int n, int m) {
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) edges.push_back({i, n + j});
  return Graph(n + m, std::move(edges));
}

Graph cycle_graph(int n) {
  if (n < 3) fail(ErrorKind::UnknownName, "cycles need at least 3 nodes");
  std::vector<Edge> edges;
  for (int i = 0; i < n; ++i) edges.push_back(normalized(i, (i + 1) % n));
  return Graph(n, std::move(edges));
}

// K6 minus the perfect matching (0,3),(1,4),(2,5); parts {0,3},{1,4},{2,5}.
Graph k222_graph() {
  std::vector<Edge> edges;
  for (int i = 0; i < 6; ++i)
    for (int j = i + 1; j < 6; ++j)
      if (j - i != 3) edges.push_back({i, j});
  return Graph(6, std::move(edges));
}

// 8-cycle 0..7 plus the four diagonals (i, i+4).
Graph wagner_graph() {
  std::vector<Edge> edges;
  for (int i = 0; i < 8; ++i) edges.push_back(normalized(i, (i + 1) % 8));
  for (int i = 0; i < 4; ++i) edges.push_back({i, i + 4});
  return Graph(8, std::move(edges));
}

// Pentagonal prism: outer cycle 0..4, inner cycle 5..9, rungs (i, i+5).
Graph pentagonal_prism() {
  std::vector<Edge> edges;
  for (int i = 0; i < 5; ++i) {
    edges.push_back(normalized(i, (i + 1) % 5));
    edges.push_back(normalized(5 + i, 5 + (i + 1) % 5));
    edges.push_back({i, i + 5});
  }
  return Graph(10, std::move(edges));
}

// Outer cycle 0..4, inner pentagram 5..9, spokes (i, i+5).
Graph petersen_graph() {
  std::vector<Edge> edges;
  for (int i = 0; i < 5; ++i) {
    edges.push_back(normalized(i, (i + 1) % 5));
    edges.push_back(normalized(5 + i, 5 + (i + 2) % 5));
    edges.push_back({i, i + 5});
  }
  return Graph(10, std::move(edges));
}

bool parse_int(const std::string& s, int& out) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  try {
    out = std::stoi(s);
  } catch (...) {
    return false;
  }
  return true;
}

}  // namespace

Graph named_graph(const std::string& name) {
  std::string s;
  for (char c : name)
    if (c != '_' && c != '{' && c != '}') s.push_back(c);

  std::string lower = s;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "v8") return wagner_graph();
  if (lower == "c5xc2") return pentagonal_prism();
  if (lower == "petersen") return petersen_graph();
  if (lower == "k2,2,2") return k222_graph();

  if (!s.empty() && (s[0] == 'K' || s[0] == 'k')) {
    std::string rest = s.substr(1);
    auto comma = rest.find(',');
    if (comma == std::string::npos) {
      int n;
      if (parse_int(rest, n) && n >= 1) return complete_graph(n);
    } else {
      int n, m;
      if (parse_int(rest.substr(0, comma), n) && parse_int(rest.substr(comma + 1), m) &&
          n >= 1 && m >= 1)
        return complete_bipartite(n, m);
    }
  }
  if (!s.empty() && (s[0] == 'C' || s[0] == 'c')) {
    int n;
    if (parse_int(s.substr(1), n)) return cycle_graph(n);
  }
  fail(ErrorKind::UnknownName, "unknown graph name '" + name + "'");
}

}  // namespace gramforge
