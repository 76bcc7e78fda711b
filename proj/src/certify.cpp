#include <cmath>
#include <string>

#include "gramforge/completion.hpp"
#include "gramforge/error.hpp"

namespace gramforge {

namespace {

int barvinok_rank_bound(int m) {
  int b = static_cast<int>(std::floor((std::sqrt(8.0 * m + 1.0) - 1.0) / 2.0));
  while ((b + 1) * (b + 2) / 2 <= m) ++b;
  while (b > 0 && b * (b + 1) / 2 > m) --b;
  return b;
}

Graph complete_graph(int r) { return named_graph("K" + std::to_string(r)); }

}  // namespace

const char* upper_rule_name(UpperRule r) {
  switch (r) {
    case UpperRule::Edgeless: return "edgeless";
    case UpperRule::Forest: return "forest";
    case UpperRule::NoK4: return "no-K4";
    case UpperRule::NoK5NoK222: return "no-K5-no-K222";
    case UpperRule::TreewidthPlusOne: return "treewidth+1";
    case UpperRule::Barvinok: return "barvinok";
  }
  return "?";
}

Certificate certify(const Graph& g) {
  const int n = g.node_count();
  Certificate c;

  int rmax = 1;
  for (int r = 2; r <= 8 && r <= n; ++r) {
    auto m = has_minor(g, complete_graph(r));
    if (!m) break;
    rmax = r;
    c.lower_model = std::move(m);
  }
  c.lower = rmax;
  c.lower_tag = rmax == 1 ? "K1" : "K" + std::to_string(rmax) + "-minor";

  bool octahedron = false;
  if (rmax <= 4) {
    if (auto m = has_minor(g, named_graph("K2,2,2"))) {
      octahedron = true;
      c.lower = 5;
      c.lower_tag = "K222-minor";
      c.lower_model = std::move(m);
    }
  }

  c.tw = treewidth(g);
  c.barvinok_m = n + g.edge_count();
  c.barvinok_bound = barvinok_rank_bound(c.barvinok_m);

  std::vector<std::pair<UpperRule, int>> rules;
  if (g.edge_count() == 0) rules.push_back({UpperRule::Edgeless, 1});
  if (rmax <= 2) rules.push_back({UpperRule::Forest, 2});
  if (rmax <= 3) rules.push_back({UpperRule::NoK4, 3});
  if (rmax <= 4 && !octahedron) rules.push_back({UpperRule::NoK5NoK222, 4});
  rules.push_back({UpperRule::TreewidthPlusOne, c.tw.width + 1});
  rules.push_back({UpperRule::Barvinok, c.barvinok_bound});

  c.upper = rules.front().second;
  c.upper_rule = rules.front().first;
  for (const auto& [rule, bound] : rules)
    if (bound < c.upper) {
      c.upper = bound;
      c.upper_rule = rule;
    }
  return c;
}

bool verify_certificate(const Graph& g, const Certificate& c) {
  if (c.lower < 1 || c.lower > c.upper) return false;

  if (c.lower == 1) {
    if (g.node_count() < 1) return false;
  } else {
    if (!c.lower_model) return false;
    Graph h = c.lower_tag == "K222-minor" ? named_graph("K2,2,2")
                                          : complete_graph(c.lower);
    if (!verify_minor_model(g, h, *c.lower_model)) return false;
  }

  // the treewidth claim rides along whatever rule won; it must validate
  if (!c.tw.decomposition.bags.empty() &&
      (c.tw.decomposition.width != c.tw.width ||
       !verify_tree_decomposition(g, c.tw.decomposition)))
    return false;

  switch (c.upper_rule) {
    case UpperRule::Edgeless:
      return g.edge_count() == 0 && c.upper == 1;
    case UpperRule::Forest:
      return !has_minor(g, complete_graph(3)) && c.upper == 2;
    case UpperRule::NoK4:
      return !has_minor(g, complete_graph(4)) && c.upper == 3;
    case UpperRule::NoK5NoK222:
      return !has_minor(g, complete_graph(5)) &&
             !has_minor(g, named_graph("K2,2,2")) && c.upper == 4;
    case UpperRule::TreewidthPlusOne:
      return verify_tree_decomposition(g, c.tw.decomposition) &&
             c.tw.decomposition.width == c.tw.width && c.upper == c.tw.width + 1;
    case UpperRule::Barvinok:
      return c.barvinok_m == g.node_count() + g.edge_count() &&
             c.barvinok_bound == barvinok_rank_bound(c.barvinok_m) &&
             c.upper == c.barvinok_bound;
  }
  return false;
}

}  // namespace gramforge
