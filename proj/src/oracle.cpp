#include "topoloss/oracle.hpp"

#include <algorithm>
#include <random>
#include <vector>

namespace topoloss::oracle {

namespace {

// Neighbours of `p` on the 4-connected lattice.
std::vector<std::size_t> neighbours(const ScalarGrid& g, std::size_t p) {
  const std::size_t w = g.width();
  const std::size_t x = p % w;
  const std::size_t y = p / w;
  std::vector<std::size_t> out;
  if (x > 0) out.push_back(p - 1);
  if (x + 1 < w) out.push_back(p + 1);
  if (y > 0) out.push_back(p - w);
  if (y + 1 < g.height()) out.push_back(p + w);
  return out;
}

bool reachable_above(const ScalarGrid& g, std::size_t q, std::size_t r, float threshold) {
  if (g[q] < threshold || g[r] < threshold) return false;
  std::vector<bool> seen(g.size(), false);
  std::vector<std::size_t> todo{q};
  seen[q] = true;
  while (!todo.empty()) {
    const std::size_t p = todo.back();
    todo.pop_back();
    if (p == r) return true;
    for (std::size_t n : neighbours(g, p)) {
      if (!seen[n] && g[n] >= threshold) {
        seen[n] = true;
        todo.push_back(n);
      }
    }
  }
  return false;
}

bool reachable_in(std::size_t n, const std::vector<std::vector<std::size_t>>& adj, std::size_t q,
                  std::size_t r) {
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> todo{q};
  seen[q] = true;
  while (!todo.empty()) {
    const std::size_t p = todo.back();
    todo.pop_back();
    if (p == r) return true;
    for (std::size_t m : adj[p]) {
      if (!seen[m]) {
        seen[m] = true;
        todo.push_back(m);
      }
    }
  }
  return false;
}

}  // namespace

float maximin_bruteforce(const ScalarGrid& pred, std::size_t q, std::size_t r) {
  std::vector<float> levels(pred.values().begin(), pred.values().end());
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  // The lowest level always connects; find the highest one that still does.
  std::size_t lo = 0, hi = levels.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi + 1) / 2;
    if (reachable_above(pred, q, r, levels[mid]))
      lo = mid;
    else
      hi = mid - 1;
  }
  return levels[lo];
}

std::size_t bottleneck_pixel(const ScalarGrid& pred, std::size_t q, std::size_t r) {
  const float m = maximin_bruteforce(pred, q, r);
  const auto at_level = std::count(pred.values().begin(), pred.values().end(), m);
  if (at_level == 1)
    return static_cast<std::size_t>(
        std::find(pred.values().begin(), pred.values().end(), m) - pred.values().begin());

  // Several pixels share the bottleneck value: replay the tie rule. Edges
  // above the level are all present; level edges join in (smaller index,
  // larger index) order until q and r meet.
  struct LevelEdge {
    std::size_t lo, hi;
  };
  std::vector<std::vector<std::size_t>> adj(pred.size());
  std::vector<LevelEdge> level_edges;
  for (std::size_t p = 0; p < pred.size(); ++p) {
    for (std::size_t n : neighbours(pred, p)) {
      if (n < p) continue;
      const float a = std::min(pred[p], pred[n]);
      if (a > m) {
        adj[p].push_back(n);
        adj[n].push_back(p);
      } else if (a == m) {
        level_edges.push_back({p, n});
      }
    }
  }
  std::sort(level_edges.begin(), level_edges.end(), [](const LevelEdge& a, const LevelEdge& b) {
    return a.lo != b.lo ? a.lo < b.lo : a.hi < b.hi;
  });
  for (const auto& e : level_edges) {
    adj[e.lo].push_back(e.hi);
    adj[e.hi].push_back(e.lo);
    if (reachable_in(pred.size(), adj, q, r)) return pred[e.hi] < pred[e.lo] ? e.hi : e.lo;
  }
  return q;  // unreachable for q != r on a connected lattice
}

PairWeights bruteforce_pair_weights(const ScalarGrid& pred, const LabelGrid& labels,
                                    const BinaryMask& region) {
  PairWeights out{Grid<std::int64_t>(pred.width(), pred.height(), 0),
                  Grid<std::int64_t>(pred.width(), pred.height(), 0)};
  for (std::size_t q = 0; q < pred.size(); ++q) {
    if (labels[q] == 0) continue;
    for (std::size_t r = q + 1; r < pred.size(); ++r) {
      if (labels[r] == 0) continue;
      const std::size_t b = bottleneck_pixel(pred, q, r);
      if (labels[q] != labels[r] && region[b]) ++out.w[b];
      if (labels[q] == labels[r] && !region[b]) ++out.v[b];
    }
  }
  return out;
}

PairwiseLosses bruteforce_pairwise_losses(const ScalarGrid& pred, const ScalarGrid& target,
                                          const LabelGrid& labels, const BinaryMask& region) {
  PairwiseLosses out;
  for (std::size_t q = 0; q < pred.size(); ++q) {
    if (labels[q] == 0) continue;
    for (std::size_t r = q + 1; r < pred.size(); ++r) {
      if (labels[r] == 0) continue;
      const std::size_t b = bottleneck_pixel(pred, q, r);
      if (labels[q] != labels[r] && region[b]) {
        const double cost = maximin_bruteforce(pred, q, r);
        out.dis += cost * cost;
      }
      if (labels[q] == labels[r] && !region[b]) {
        const double d = double(pred[b]) - target[b];
        out.conn += d * d;
      }
    }
  }
  return out;
}

Instance random_instance(std::uint64_t seed) {
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + 1);
  std::uniform_int_distribution<std::uint32_t> side(3, 6);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Instance inst;
  while (true) {
    const std::uint32_t w = side(rng);
    const std::uint32_t h = side(rng);
    const double density = 0.25 + 0.25 * unit(rng);
    BinaryMask region(w, h);
    for (auto& v : region.values()) v = unit(rng) < density ? 1 : 0;
    LabelGrid labels = connected_components(complement(region), Connectivity::four);
    if (labels.count < 2 || labels.count > 4) continue;
    inst.region = std::move(region);
    inst.labels = std::move(labels);
    break;
  }
  const std::uint32_t w = inst.region.width(), h = inst.region.height();
  inst.pred = ScalarGrid(w, h);
  inst.target = ScalarGrid(w, h);
  const bool tied = seed % 2 == 1;
  std::uniform_int_distribution<int> level(0, 3);
  std::uniform_real_distribution<float> value(-1.0f, 20.0f);
  std::uniform_real_distribution<float> target(0.0f, 20.0f);
  for (std::size_t i = 0; i < inst.pred.size(); ++i) {
    inst.pred[i] = tied ? static_cast<float>(level(rng)) : value(rng);
    inst.target[i] = target(rng);
  }
  return inst;
}

}  // namespace topoloss::oracle
