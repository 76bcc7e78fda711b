#include "gramforge/minor.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <numeric>

#include "gramforge/error.hpp"

namespace gramforge {

namespace {

using u64 = std::uint64_t;

int popcount(u64 x) { return std::popcount(x); }

struct Search {
  int gn = 0, hn = 0;
  std::vector<u64> gadj;                  // G adjacency masks
  std::vector<std::pair<int, int>> hedges;  // in search order (both endpoints seeded)
  std::vector<int> order;                 // H-nodes, decreasing degree
  std::vector<int> slot;                  // H-node -> position in order
  bool h_complete = false;
  u64 all = 0;

  std::vector<u64> branch;  // per order position
  u64 used = 0;
  std::vector<u64> result;

  u64 nbr(u64 set) const {
    u64 r = 0;
    u64 s = set;
    while (s) {
      int v = std::countr_zero(s);
      s &= s - 1;
      r |= gadj[v];
    }
    return r & ~set;
  }

  bool connects(u64 a, u64 b, u64 allowed) const {
    // reachability from a to b through allowed vertices
    u64 reach = a;
    for (;;) {
      u64 grown = reach | (nbr(reach) & (allowed | b));
      if (grown & b) return true;
      if (grown == reach) return false;
      reach = grown;
    }
  }

  bool adjacent_sets(u64 a, u64 b) const { return (nbr(a) & b) != 0; }

  bool grow() {
    u64 avail = all & ~used;
    int pick = -1;
    for (size_t e = 0; e < hedges.size(); ++e) {
      auto [a, b] = hedges[e];
      if (adjacent_sets(branch[a], branch[b])) continue;
      if (!connects(branch[a], branch[b], avail)) return false;
      if (pick < 0) pick = static_cast<int>(e);
    }
    if (pick < 0) {
      result = branch;
      return true;
    }
    auto [a, b] = hedges[pick];
    for (int side : {a, b}) {
      u64 options = nbr(branch[side]) & avail;
      while (options) {
        int v = std::countr_zero(options);
        options &= options - 1;
        u64 bit = u64{1} << v;
        branch[side] |= bit;
        used |= bit;
        if (grow()) return true;
        branch[side] &= ~bit;
        used &= ~bit;
      }
    }
    return false;
  }

  bool seed(int t) {
    if (t == hn) return grow();
    u64 avail = all & ~used;
    if (popcount(avail) < hn - t) return false;
    u64 options = avail;
    if (h_complete && t > 0) {
      // complete H is fully symmetric: force increasing seeds
      int prev = std::countr_zero(branch[t - 1]);
      options &= ~((u64{2} << prev) - 1);
    }
    while (options) {
      int v = std::countr_zero(options);
      options &= options - 1;
      u64 bit = u64{1} << v;
      branch[t] = bit;
      used |= bit;
      if (seed(t + 1)) return true;
      branch[t] = 0;
      used &= ~bit;
    }
    return false;
  }
};

}  // namespace

std::optional<MinorModel> has_minor(const Graph& g, const Graph& h) {
  int gn = g.node_count(), hn = h.node_count();
  if (gn > 64) fail(ErrorKind::SizeGuard, "minor search needs n <= 64");
  if (hn > gn || h.edge_count() > g.edge_count()) return std::nullopt;

  Search s;
  s.gn = gn;
  s.hn = hn;
  s.gadj.resize(gn);
  for (int v = 0; v < gn; ++v) s.gadj[v] = g.adjacency_mask(v);
  s.all = gn == 64 ? ~u64{0} : (u64{1} << gn) - 1;

  s.order.resize(hn);
  std::iota(s.order.begin(), s.order.end(), 0);
  std::stable_sort(s.order.begin(), s.order.end(),
                   [&](int a, int b) { return h.degree(a) > h.degree(b); });
  s.slot.assign(hn, 0);
  for (int t = 0; t < hn; ++t) s.slot[s.order[t]] = t;
  for (auto [a, b] : h.edges()) s.hedges.push_back({s.slot[a], s.slot[b]});
  s.h_complete = h.edge_count() == hn * (hn - 1) / 2;
  s.branch.assign(hn, 0);

  if (!s.seed(0)) return std::nullopt;

  MinorModel model;
  model.branch_sets.assign(hn, {});
  for (int hv = 0; hv < hn; ++hv) {
    u64 set = s.result[s.slot[hv]];
    while (set) {
      int v = std::countr_zero(set);
      set &= set - 1;
      model.branch_sets[hv].push_back(v);
    }
  }
  return model;
}

bool verify_minor_model(const Graph& g, const Graph& h, const MinorModel& model) {
  int gn = g.node_count(), hn = h.node_count();
  if (static_cast<int>(model.branch_sets.size()) != hn) return false;
  std::vector<int> owner(gn, -1);
  for (int hv = 0; hv < hn; ++hv) {
    const auto& set = model.branch_sets[hv];
    if (set.empty()) return false;
    for (int v : set) {
      if (v < 0 || v >= gn || owner[v] >= 0) return false;
      owner[v] = hv;
    }
    // connectivity of the branch set
    std::vector<int> stack{set[0]};
    std::vector<bool> seen(gn, false);
    seen[set[0]] = true;
    int count = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int u : g.neighbors(v))
        if (!seen[u] && owner[u] == hv) {
          seen[u] = true;
          ++count;
          stack.push_back(u);
        }
    }
    if (count != static_cast<int>(set.size())) return false;
  }
  for (auto [a, b] : h.edges()) {
    bool found = false;
    for (int v : model.branch_sets[a]) {
      for (int u : g.neighbors(v))
        if (owner[u] == b) {
          found = true;
          break;
        }
      if (found) break;
    }
    if (!found) return false;
  }
  return true;
}

}  // namespace gramforge
