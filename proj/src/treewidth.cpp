#include "gramforge/treewidth.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <numeric>
#include <set>

#include "gramforge/error.hpp"

namespace gramforge {

namespace {

using u64 = std::uint64_t;

// Neighborhood of v in the graph where the vertex set `gone` has been
// eliminated: non-eliminated vertices reachable from v through `gone`.
u64 eliminated_neighborhood(const std::vector<u64>& adj, int v, u64 gone) {
  u64 seen = (u64{1} << v) | adj[v];
  u64 inside = adj[v] & gone;
  while (inside) {
    u64 expand = 0;
    u64 s = inside;
    while (s) {
      int u = std::countr_zero(s);
      s &= s - 1;
      expand |= adj[u];
    }
    u64 fresh = expand & ~seen;
    seen |= fresh;
    inside = fresh & gone;
  }
  return seen & ~gone & ~(u64{1} << v);
}

std::vector<int> exact_elimination_order(const Graph& g, int& width) {
  int n = g.node_count();
  std::vector<u64> adj(n);
  for (int v = 0; v < n; ++v) adj[v] = g.adjacency_mask(v);

  // f[S] = best over orders of eliminating S as a prefix of the max
  // elimination degree inside S; the last vertex of S is eliminated with
  // the rest of S already gone.
  std::vector<std::uint8_t> f(std::size_t{1} << n, 255);
  f[0] = 0;
  for (u64 s = 1; s < (u64{1} << n); ++s) {
    int best = 255;
    u64 rest = s;
    while (rest) {
      int v = std::countr_zero(rest);
      rest &= rest - 1;
      u64 prev = s & ~(u64{1} << v);
      int d = std::popcount(eliminated_neighborhood(adj, v, prev));
      int cand = std::max<int>(f[prev], d);
      best = std::min(best, cand);
    }
    f[s] = static_cast<std::uint8_t>(best);
  }
  u64 full = n == 64 ? ~u64{0} : (u64{1} << n) - 1;
  width = f[full];

  std::vector<int> order(n);
  u64 s = full;
  for (int pos = n - 1; pos >= 0; --pos) {
    u64 rest = s;
    int chosen = -1;
    while (rest) {
      int v = std::countr_zero(rest);
      rest &= rest - 1;
      u64 prev = s & ~(u64{1} << v);
      int d = std::popcount(eliminated_neighborhood(adj, v, prev));
      if (std::max<int>(f[prev], d) == f[s]) {
        chosen = v;
        break;
      }
    }
    order[pos] = chosen;
    s &= ~(u64{1} << chosen);
  }
  return order;
}

std::vector<int> min_fill_order(const Graph& g) {
  int n = g.node_count();
  std::vector<std::set<int>> adj(n);
  for (auto [i, j] : g.edges()) {
    adj[i].insert(j);
    adj[j].insert(i);
  }
  std::vector<bool> gone(n, false);
  std::vector<int> order;
  order.reserve(n);
  for (int step = 0; step < n; ++step) {
    int best = -1;
    long best_fill = std::numeric_limits<long>::max();
    for (int v = 0; v < n; ++v) {
      if (gone[v]) continue;
      long fill = 0;
      std::vector<int> nb(adj[v].begin(), adj[v].end());
      for (size_t a = 0; a < nb.size(); ++a)
        for (size_t b = a + 1; b < nb.size(); ++b)
          if (!adj[nb[a]].count(nb[b])) ++fill;
      if (fill < best_fill || (fill == best_fill && (best < 0 || v < best))) {
        best_fill = fill;
        best = v;
      }
    }
    std::vector<int> nb(adj[best].begin(), adj[best].end());
    for (size_t a = 0; a < nb.size(); ++a)
      for (size_t b = a + 1; b < nb.size(); ++b) {
        adj[nb[a]].insert(nb[b]);
        adj[nb[b]].insert(nb[a]);
      }
    for (int u : nb) adj[u].erase(best);
    adj[best].clear();
    gone[best] = true;
    order.push_back(best);
  }
  return order;
}

// Fill simulation: for each vertex, its neighbors among later-eliminated
// vertices at the moment of elimination.
std::vector<std::vector<int>> higher_neighbors(const Graph& g, const std::vector<int>& order) {
  int n = g.node_count();
  std::vector<std::set<int>> adj(n);
  for (auto [i, j] : g.edges()) {
    adj[i].insert(j);
    adj[j].insert(i);
  }
  std::vector<std::vector<int>> high(n);
  for (int v : order) {
    std::vector<int> nb(adj[v].begin(), adj[v].end());
    high[v] = nb;
    for (size_t a = 0; a < nb.size(); ++a)
      for (size_t b = a + 1; b < nb.size(); ++b) {
        adj[nb[a]].insert(nb[b]);
        adj[nb[b]].insert(nb[a]);
      }
    for (int u : nb) adj[u].erase(v);
    adj[v].clear();
  }
  return high;
}

TreeDecomposition decomposition_from_order(const Graph& g, const std::vector<int>& order) {
  int n = g.node_count();
  auto high = higher_neighbors(g, order);
  std::vector<int> elim_pos(n);
  for (int i = 0; i < n; ++i) elim_pos[order[i]] = i;

  TreeDecomposition td;
  td.bags.resize(n);
  std::vector<int> bag_of(n);
  for (int i = 0; i < n; ++i) {
    int v = order[i];
    td.bags[i] = high[v];
    td.bags[i].push_back(v);
    std::sort(td.bags[i].begin(), td.bags[i].end());
    bag_of[v] = i;
  }
  for (int i = 0; i < n; ++i) {
    int v = order[i];
    if (high[v].empty()) {
      if (i + 1 < n) td.tree_edges.push_back({i, i + 1});
      continue;
    }
    int parent = *std::min_element(
        high[v].begin(), high[v].end(),
        [&](int a, int b) { return elim_pos[a] < elim_pos[b]; });
    td.tree_edges.push_back({i, bag_of[parent]});
  }
  td.width = 0;
  for (const auto& bag : td.bags)
    td.width = std::max(td.width, static_cast<int>(bag.size()) - 1);
  return td;
}

std::vector<int> elimination_order(const Graph& g, int& width, bool& exact) {
  if (g.node_count() <= 20) {
    exact = true;
    return exact_elimination_order(g, width);
  }
  exact = false;
  auto order = min_fill_order(g);
  auto high = higher_neighbors(g, order);
  width = 0;
  for (const auto& h : high) width = std::max(width, static_cast<int>(h.size()));
  return order;
}

}  // namespace

TreewidthResult treewidth(const Graph& g) {
  TreewidthResult res;
  std::vector<int> order = elimination_order(g, res.width, res.exact);
  res.decomposition = decomposition_from_order(g, order);
  return res;
}

bool verify_tree_decomposition(const Graph& g, const TreeDecomposition& td) {
  int n = g.node_count();
  int nb = static_cast<int>(td.bags.size());
  if (nb == 0) return n == 0;

  // tree shape: nb-1 edges, connected
  if (static_cast<int>(td.tree_edges.size()) != nb - 1 && nb > 1) return false;
  std::vector<std::vector<int>> btree(nb);
  for (auto [a, b] : td.tree_edges) {
    if (a < 0 || b < 0 || a >= nb || b >= nb || a == b) return false;
    btree[a].push_back(b);
    btree[b].push_back(a);
  }
  {
    std::vector<bool> seen(nb, false);
    std::vector<int> stack{0};
    seen[0] = true;
    int count = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int u : btree[v])
        if (!seen[u]) {
          seen[u] = true;
          ++count;
          stack.push_back(u);
        }
    }
    if (count != nb) return false;
  }

  std::vector<std::vector<int>> holding(n);
  for (int b = 0; b < nb; ++b)
    for (int v : td.bags[b]) {
      if (v < 0 || v >= n) return false;
      holding[v].push_back(b);
    }
  for (int v = 0; v < n; ++v)
    if (holding[v].empty()) return false;

  for (auto [i, j] : g.edges()) {
    bool covered = false;
    for (int b : holding[i]) {
      const auto& bag = td.bags[b];
      if (std::find(bag.begin(), bag.end(), j) != bag.end()) {
        covered = true;
        break;
      }
    }
    if (!covered) return false;
  }

  // bags holding v must form a connected subtree
  for (int v = 0; v < n; ++v) {
    std::vector<bool> inset(nb, false);
    for (int b : holding[v]) inset[b] = true;
    std::vector<bool> seen(nb, false);
    std::vector<int> stack{holding[v][0]};
    seen[holding[v][0]] = true;
    size_t count = 1;
    while (!stack.empty()) {
      int b = stack.back();
      stack.pop_back();
      for (int u : btree[b])
        if (inset[u] && !seen[u]) {
          seen[u] = true;
          ++count;
          stack.push_back(u);
        }
    }
    if (count != holding[v].size()) return false;
  }

  int width = 0;
  for (const auto& bag : td.bags) width = std::max(width, static_cast<int>(bag.size()) - 1);
  return width == td.width;
}

KTreePlan plan_ktree_embedding(const Graph& g, int k) {
  if (k < 0) fail(ErrorKind::ParseError, "k must be nonnegative");
  int n = g.node_count();

  KTreePlan plan;
  plan.k = k;

  if (n <= k + 1) {
    // degenerate case: the complete graph is the widest usable supergraph
    plan.root_bag.resize(n);
    std::iota(plan.root_bag.begin(), plan.root_bag.end(), 0);
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) edges.push_back({i, j});
    plan.ktree = Graph(n, std::move(edges));
    plan.decomposition.bags = {plan.root_bag};
    plan.decomposition.width = n - 1;
    return plan;
  }

  int width;
  bool exact;
  auto order = elimination_order(g, width, exact);
  if (width > k) {
    std::string msg = exact ? "treewidth " + std::to_string(width) + " exceeds k"
                            : "heuristic width bound " + std::to_string(width) +
                                  " exceeds k (treewidth not certified for n > 20)";
    fail(ErrorKind::InfeasibleWidth, msg);
  }
  auto high = higher_neighbors(g, order);

  // root bag: the last k+1 vertices of the elimination order, made complete
  std::vector<std::set<int>> adj(n);
  for (auto [i, j] : g.edges()) {
    adj[i].insert(j);
    adj[j].insert(i);
  }
  plan.root_bag.assign(order.end() - (k + 1), order.end());
  std::sort(plan.root_bag.begin(), plan.root_bag.end());
  for (int a : plan.root_bag)
    for (int b : plan.root_bag)
      if (a < b) {
        adj[a].insert(b);
        adj[b].insert(a);
      }

  std::vector<std::vector<int>> bags{plan.root_bag};
  std::vector<std::pair<int, int>> tree_edges;

  for (int i = n - k - 2; i >= 0; --i) {
    int v = order[i];
    std::vector<int> clique = high[v];  // already a clique among placed vertices
    std::sort(clique.begin(), clique.end());

    int host = -1;
    for (size_t b = 0; b < bags.size(); ++b) {
      if (std::includes(bags[b].begin(), bags[b].end(), clique.begin(), clique.end())) {
        host = static_cast<int>(b);
        break;
      }
    }
    if (host < 0)
      fail(ErrorKind::NumericalConsistency, "elimination clique not inside any bag");
    for (int u : bags[host]) {
      if (static_cast<int>(clique.size()) >= k) break;
      if (!std::binary_search(clique.begin(), clique.end(), u)) {
        clique.insert(std::upper_bound(clique.begin(), clique.end(), u), u);
      }
    }

    for (int u : clique) {
      adj[v].insert(u);
      adj[u].insert(v);
    }
    KTreePlan::Placement pl;
    pl.node = v;
    pl.parent_clique = clique;
    plan.placements.push_back(pl);

    std::vector<int> bag = clique;
    bag.insert(std::upper_bound(bag.begin(), bag.end(), v), v);
    tree_edges.push_back({static_cast<int>(bags.size()), host});
    bags.push_back(bag);
  }

  std::vector<Edge> edges;
  for (int v = 0; v < n; ++v)
    for (int u : adj[v])
      if (v < u) edges.push_back({v, u});
  plan.ktree = Graph(n, std::move(edges));
  plan.decomposition.bags = bags;
  plan.decomposition.tree_edges = tree_edges;
  plan.decomposition.width = k;
  return plan;
}

Graph embed_in_ktree(const Graph& g, int k) { return plan_ktree_embedding(g, k).ktree; }

}  // namespace gramforge
