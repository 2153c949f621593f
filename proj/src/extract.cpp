#include "topoloss/extract.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <vector>

namespace topoloss {

namespace {

// Ring order N, NE, E, SE, S, SW, W, NW (P2..P9 in Zhang-Suen terms).
constexpr std::array<int, 8> kDx = {0, 1, 1, 1, 0, -1, -1, -1};
constexpr std::array<int, 8> kDy = {-1, -1, 0, 1, 1, 1, 0, -1};

using Ring = std::array<bool, 8>;

Ring ring_at(const BinaryMask& m, int x, int y) {
  Ring r{};
  for (int k = 0; k < 8; ++k) r[k] = m.contains(x + kDx[k], y + kDy[k]) && m(x + kDx[k], y + kDy[k]);
  return r;
}

int ring_count(const Ring& r) { return static_cast<int>(std::count(r.begin(), r.end(), true)); }

int transitions(const Ring& r) {
  int a = 0;
  for (int k = 0; k < 8; ++k) a += !r[k] && r[(k + 1) % 8];
  return a;
}

// (8,4) simple point: one 8-connected foreground group among the neighbours
// and exactly one 4-connected background run touching a 4-neighbour.
bool is_simple(const Ring& r) {
  std::array<int, 8> comp{};
  for (int k = 0; k < 8; ++k) comp[k] = k;
  auto root = [&](int k) {
    while (comp[k] != k) k = comp[k];
    return k;
  };
  auto join = [&](int a, int b) { comp[root(a)] = root(b); };
  for (int k = 0; k < 8; ++k) {
    if (r[k] && r[(k + 1) % 8]) join(k, (k + 1) % 8);
    if (k % 2 == 0 && r[k] && r[(k + 2) % 8]) join(k, (k + 2) % 8);
  }
  int fg_groups = 0;
  for (int k = 0; k < 8; ++k) fg_groups += r[k] && root(k) == k;
  if (fg_groups != 1) return false;

  if (ring_count(r) == 8) return false;
  // background runs in the circular ring; count those holding an even slot
  int start = 0;
  while (!r[start]) start = (start + 1) % 8;  // a foreground slot exists
  int runs = 0;
  bool in_run = false, touches = false;
  for (int i = 1; i <= 8; ++i) {
    const int k = (start + i) % 8;
    if (!r[k]) {
      if (!in_run) {
        in_run = true;
        touches = false;
      }
      touches = touches || k % 2 == 0;
    } else if (in_run) {
      in_run = false;
      runs += touches;
    }
  }
  return runs == 1;
}

bool zs_candidate(const Ring& r, int pass) {
  const int b = ring_count(r);
  if (b < 2 || b > 6 || transitions(r) != 1) return false;
  const bool n = r[0], e = r[2], s = r[4], w = r[6];
  if (pass == 0) return !(n && e && s) && !(e && s && w);
  return !(n && e && w) && !(n && s && w);
}

bool zs_pass(BinaryMask& m, int pass) {
  const int width = static_cast<int>(m.width());
  const int height = static_cast<int>(m.height());
  std::vector<std::size_t> marked;
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      if (m(x, y) && zs_candidate(ring_at(m, x, y), pass)) marked.push_back(m.index(x, y));
  bool changed = false;
  for (std::size_t i : marked) {
    const int x = static_cast<int>(i % width);
    const int y = static_cast<int>(i / width);
    const Ring r = ring_at(m, x, y);
    const int b = ring_count(r);
    if (b >= 2 && b <= 6 && transitions(r) == 1) {
      m[i] = 0;
      changed = true;
    }
  }
  return changed;
}

// Removes corner pixels of 4-connected staircases: a pixel with two
// orthogonal foreground 4-neighbours whose shared diagonal is background,
// provided the pixel is simple.
bool corner_pass(BinaryMask& m) {
  const int width = static_cast<int>(m.width());
  const int height = static_cast<int>(m.height());
  bool changed = false;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (!m(x, y)) continue;
      const Ring r = ring_at(m, x, y);
      bool corner = false;
      for (int k = 0; k < 8; k += 2) corner = corner || (r[k] && r[(k + 2) % 8] && !r[k + 1]);
      if (corner && ring_count(r) >= 2 && is_simple(r)) {
        m(x, y) = 0;
        changed = true;
      }
    }
  }
  return changed;
}

}  // namespace

BinaryMask threshold(const ScalarGrid& dist, float tau) {
  BinaryMask out(dist.width(), dist.height());
  for (std::size_t i = 0; i < dist.size(); ++i) out[i] = dist[i] < tau ? 1 : 0;
  return out;
}

BinaryMask thin(const BinaryMask& mask) {
  BinaryMask m = mask;
  for (auto& v : m.values()) v = v ? 1 : 0;
  bool changed = true;
  while (changed) {
    changed = false;
    changed |= zs_pass(m, 0);
    changed |= zs_pass(m, 1);
    if (!changed) changed |= corner_pass(m);
  }
  return m;
}

GeoGraph skeleton_to_graph(const BinaryMask& skel) {
  const int width = static_cast<int>(skel.width());
  auto on = [&](int x, int y) { return skel.contains(x, y) && skel(x, y) != 0; };
  auto pixel_point = [&](std::size_t i) {
    return Point{static_cast<double>(i % width), static_cast<double>(i / width)};
  };
  auto neighbours = [&](std::size_t i) {
    std::vector<std::size_t> out;
    const int x = static_cast<int>(i % width), y = static_cast<int>(i / width);
    for (int k = 0; k < 8; ++k)
      if (on(x + kDx[k], y + kDy[k])) out.push_back(skel.index(x + kDx[k], y + kDy[k]));
    return out;
  };

  std::vector<int> degree(skel.size(), 0);
  for (std::size_t i = 0; i < skel.size(); ++i)
    if (skel[i]) degree[i] = static_cast<int>(neighbours(i).size());

  // Node pixels: junction pixels grouped by 8-adjacency, other non-degree-2
  // pixels on their own.
  constexpr long kNone = -1;
  std::vector<long> node_of(skel.size(), kNone);
  std::vector<std::size_t> node_rep;
  for (std::size_t i = 0; i < skel.size(); ++i) {
    if (!skel[i] || degree[i] == 2 || node_of[i] != kNone) continue;
    const long id = static_cast<long>(node_rep.size());
    std::vector<std::size_t> members{i};
    node_of[i] = id;
    if (degree[i] >= 3) {
      for (std::size_t k = 0; k < members.size(); ++k)
        for (std::size_t n : neighbours(members[k]))
          if (degree[n] >= 3 && node_of[n] == kNone) {
            node_of[n] = id;
            members.push_back(n);
          }
    }
    double cx = 0, cy = 0;
    for (std::size_t m : members) {
      cx += pixel_point(m).x;
      cy += pixel_point(m).y;
    }
    cx /= members.size();
    cy /= members.size();
    std::sort(members.begin(), members.end());
    std::size_t rep = members.front();
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t m : members) {
      const double d = distance(pixel_point(m), {cx, cy});
      if (d < best) {
        best = d;
        rep = m;
      }
    }
    node_rep.push_back(rep);
  }

  GeoGraph g;
  for (std::size_t n = 0; n < node_rep.size(); ++n)
    g.add_node(static_cast<NodeId>(n), pixel_point(node_rep[n]));
  NodeId next_id = static_cast<NodeId>(node_rep.size());

  // Adds the chain from node `a` to node `b`; `path` holds the polyline
  // strictly between the two representative pixels, `chain` the number of
  // degree-2 pixels on it.
  auto add_chain = [&](NodeId a, NodeId b, std::vector<Point> path, std::size_t chain) {
    if (a != b) {
      g.add_edge(a, b, std::move(path));
      return;
    }
    if (chain < 2) return;  // a bump on the node itself
    const std::size_t mid = path.size() / 2;
    const NodeId m = next_id++;
    g.add_node(m, path[mid]);
    g.add_edge(a, m, std::vector<Point>(path.begin(), path.begin() + mid));
    g.add_edge(m, b, std::vector<Point>(path.begin() + mid + 1, path.end()));
  };

  std::vector<bool> visited(skel.size(), false);
  std::map<std::pair<long, long>, bool> direct;
  for (std::size_t s = 0; s < skel.size(); ++s) {
    if (node_of[s] == kNone) continue;
    const long from = node_of[s];
    for (std::size_t n : neighbours(s)) {
      if (node_of[n] != kNone) {
        if (node_of[n] == from) continue;
        const auto key = std::minmax(from, node_of[n]);
        if (direct.emplace(key, true).second) {
          std::vector<Point> path;
          if (s != node_rep[from]) path.push_back(pixel_point(s));
          if (n != node_rep[node_of[n]]) path.push_back(pixel_point(n));
          add_chain(from, node_of[n], std::move(path), 0);
        }
        continue;
      }
      if (visited[n]) continue;
      std::vector<Point> path;
      if (s != node_rep[from]) path.push_back(pixel_point(s));
      std::size_t prev = s, cur = n;
      std::size_t chain = 0;
      long to = kNone;
      while (true) {
        visited[cur] = true;
        ++chain;
        path.push_back(pixel_point(cur));
        std::size_t step = cur;
        for (std::size_t m : neighbours(cur))
          if (m != prev) step = m;
        if (step == cur) break;  // dead end inside a chain; cannot happen on degree 2
        if (node_of[step] != kNone) {
          to = node_of[step];
          if (step != node_rep[to]) path.push_back(pixel_point(step));
          break;
        }
        if (visited[step]) break;
        prev = cur;
        cur = step;
      }
      if (to == kNone) continue;
      add_chain(from, to, std::move(path), chain);
    }
  }

  // Loops without any node pixel.
  for (std::size_t s = 0; s < skel.size(); ++s) {
    if (!skel[s] || visited[s] || node_of[s] != kNone) continue;
    std::vector<std::size_t> cycle{s};
    visited[s] = true;
    std::size_t prev = s, cur = neighbours(s).front();
    while (cur != s && !visited[cur]) {
      visited[cur] = true;
      cycle.push_back(cur);
      std::size_t step = cur;
      for (std::size_t m : neighbours(cur))
        if (m != prev) step = m;
      prev = cur;
      cur = step;
    }
    if (cycle.size() < 3) continue;
    const std::size_t anti = cycle.size() / 2;
    const NodeId a = next_id++, b = next_id++;
    g.add_node(a, pixel_point(cycle[0]));
    g.add_node(b, pixel_point(cycle[anti]));
    std::vector<Point> first, second;
    for (std::size_t k = 1; k < anti; ++k) first.push_back(pixel_point(cycle[k]));
    for (std::size_t k = anti + 1; k < cycle.size(); ++k) second.push_back(pixel_point(cycle[k]));
    g.add_edge(a, b, std::move(first));
    g.add_edge(b, a, std::move(second));
  }
  return g;
}

GeoGraph prune(const GeoGraph& graph, double min_spur) {
  if (min_spur <= 0.0) return graph;

  struct WorkEdge {
    Edge edge;
    double length;
    bool alive;
  };
  std::vector<WorkEdge> edges;
  for (std::size_t e = 0; e < graph.edge_count(); ++e)
    edges.push_back({graph.edges()[e], graph.edge_length(e), true});
  std::map<NodeId, int> degree;
  for (const auto& n : graph.nodes()) degree[n.id] = 0;
  for (const auto& e : edges) {
    ++degree[e.edge.a];
    ++degree[e.edge.b];
  }

  std::vector<NodeId> touched;
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto& e : edges) {
      if (!e.alive || e.length >= min_spur) continue;
      if (degree[e.edge.a] != 1 && degree[e.edge.b] != 1) continue;
      e.alive = false;
      --degree[e.edge.a];
      --degree[e.edge.b];
      touched.push_back(e.edge.a);
      touched.push_back(e.edge.b);
      changed = true;
    }
  }

  // Join the two edges of each node brought down to degree 2.
  std::sort(touched.begin(), touched.end());
  touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
  std::map<NodeId, Point> pos;
  for (const auto& n : graph.nodes()) pos[n.id] = n.pos;
  for (NodeId n : touched) {
    if (degree[n] != 2) continue;
    std::vector<std::size_t> inc;
    for (std::size_t i = 0; i < edges.size(); ++i)
      if (edges[i].alive && (edges[i].edge.a == n || edges[i].edge.b == n)) inc.push_back(i);
    if (inc.size() != 2) continue;
    auto oriented_from = [&](const Edge& e, NodeId start) {
      // interior points ordered from `start` to the opposite end
      std::vector<Point> pts = e.via;
      if (e.a != start) std::reverse(pts.begin(), pts.end());
      return pts;
    };
    const Edge& e1 = edges[inc[0]].edge;
    const Edge& e2 = edges[inc[1]].edge;
    const NodeId x = e1.a == n ? e1.b : e1.a;
    const NodeId y = e2.a == n ? e2.b : e2.a;
    if (x == y) continue;
    std::vector<Point> via = oriented_from(e1, x);
    via.push_back(pos[n]);
    const auto tail = oriented_from(e2, n);
    via.insert(via.end(), tail.begin(), tail.end());
    Edge joined{x, y, std::move(via)};
    const double len = edges[inc[0]].length + edges[inc[1]].length;
    edges[inc[1]].alive = false;
    edges[inc[0]] = {std::move(joined), len, true};
    degree[n] = 0;
  }

  GeoGraph out;
  for (const auto& n : graph.nodes())
    if (degree[n.id] > 0) out.add_node(n.id, n.pos);
  for (const auto& e : edges)
    if (e.alive) out.add_edge(e.edge.a, e.edge.b, e.edge.via);
  return out;
}

GeoGraph extract_graph(const ScalarGrid& dist, float tau, double min_spur) {
  return prune(skeleton_to_graph(thin(threshold(dist, tau))), min_spur);
}

}  // namespace topoloss
