#include "topoloss/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>
#include <random>
#include <tuple>
#include <vector>

#include "topoloss/annotation.hpp"
#include "topoloss/error.hpp"

namespace topoloss {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Independent stream per (seed, purpose, sample index), so results do not
// depend on evaluation order.
std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) {
  auto mix = [](std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  };
  return std::mt19937_64(mix(mix(mix(seed) ^ stream) ^ index));
}

struct Location {
  std::size_t edge = 0;
  double offset = 0.0;  // arc length from the edge's first node
};

struct MetricEdge {
  std::size_t u = 0;
  std::size_t v = 0;
  std::vector<Point> pts;   // full polyline u..v
  std::vector<double> cum;  // arc length at each polyline vertex
  double length() const { return cum.back(); }
};

// Graph with arc-length parametrised edges. Node i corresponds to the i-th
// node of the GeoGraph it was built from.
class MetricGraph {
 public:
  MetricGraph() = default;
  explicit MetricGraph(const GeoGraph& g) {
    for (const auto& n : g.nodes()) add_node(n.pos);
    for (std::size_t e = 0; e < g.edge_count(); ++e)
      add_edge(*g.node_index(g.edges()[e].a), *g.node_index(g.edges()[e].b), g.polyline(e));
  }

  std::size_t add_node(Point p) {
    nodes_.push_back(p);
    adj_.emplace_back();
    return nodes_.size() - 1;
  }

  void add_edge(std::size_t u, std::size_t v, std::vector<Point> pts) {
    MetricEdge e{u, v, std::move(pts), {}};
    e.cum.assign(e.pts.size(), 0.0);
    for (std::size_t i = 1; i < e.pts.size(); ++i)
      e.cum[i] = e.cum[i - 1] + distance(e.pts[i - 1], e.pts[i]);
    adj_[u].push_back(edges_.size());
    if (v != u) adj_[v].push_back(edges_.size());
    edges_.push_back(std::move(e));
  }

  const std::vector<Point>& nodes() const { return nodes_; }
  const std::vector<MetricEdge>& edges() const { return edges_; }

  Point point_at(const Location& loc) const {
    const auto& e = edges_[loc.edge];
    const double s = std::clamp(loc.offset, 0.0, e.length());
    auto it = std::upper_bound(e.cum.begin(), e.cum.end(), s);
    if (it == e.cum.end()) return e.pts.back();
    const std::size_t i = static_cast<std::size_t>(it - e.cum.begin());
    const double seg = e.cum[i] - e.cum[i - 1];
    const double t = seg > 0.0 ? (s - e.cum[i - 1]) / seg : 0.0;
    return {e.pts[i - 1].x + t * (e.pts[i].x - e.pts[i - 1].x),
            e.pts[i - 1].y + t * (e.pts[i].y - e.pts[i - 1].y)};
  }

  // Polyline pieces before and after arc length `s`; both contain the cut point.
  std::pair<std::vector<Point>, std::vector<Point>> cut(std::size_t edge, double s) const {
    const auto& e = edges_[edge];
    const Point p = point_at({edge, s});
    std::vector<Point> head, tail;
    std::size_t i = 0;
    while (i < e.pts.size() && e.cum[i] < s) head.push_back(e.pts[i++]);
    head.push_back(p);
    tail.push_back(p);
    while (i < e.pts.size() && e.cum[i] <= s) ++i;
    for (; i < e.pts.size(); ++i) tail.push_back(e.pts[i]);
    return {std::move(head), std::move(tail)};
  }

  // Copy with the location turned into a node; returns that node's index.
  std::pair<MetricGraph, std::size_t> split_at(const Location& loc) const {
    MetricGraph out;
    out.nodes_ = nodes_;
    out.adj_.assign(nodes_.size(), {});
    for (std::size_t e = 0; e < edges_.size(); ++e)
      if (e != loc.edge) out.add_edge(edges_[e].u, edges_[e].v, edges_[e].pts);
    auto [head, tail] = cut(loc.edge, loc.offset);
    const std::size_t x = out.add_node(point_at(loc));
    out.add_edge(edges_[loc.edge].u, x, std::move(head));
    out.add_edge(x, edges_[loc.edge].v, std::move(tail));
    return {std::move(out), x};
  }

  // Extra control points every `spacing` along edges longer than it.
  MetricGraph densified(double spacing) const {
    if (spacing <= 0.0) return *this;
    MetricGraph out;
    out.nodes_ = nodes_;
    out.adj_.assign(nodes_.size(), {});
    for (std::size_t e = 0; e < edges_.size(); ++e) {
      const auto& edge = edges_[e];
      std::size_t prev = edge.u;
      double start = 0.0;
      std::vector<Point> rest = edge.pts;
      MetricGraph piece;  // re-parametrise the remaining polyline as we cut
      for (double s = spacing; s < edge.length() - 1e-9; s += spacing) {
        MetricGraph tmp;
        tmp.add_node(rest.front());
        tmp.add_node(rest.back());
        tmp.add_edge(0, 1, rest);
        auto [head, tail] = tmp.cut(0, s - start);
        const std::size_t mid = out.add_node(tail.front());
        out.add_edge(prev, mid, std::move(head));
        prev = mid;
        start = s;
        rest = std::move(tail);
      }
      out.add_edge(prev, edge.v, std::move(rest));
    }
    return out;
  }

  std::vector<double> dijkstra(const std::vector<std::pair<std::size_t, double>>& seeds) const {
    std::vector<double> dist(nodes_.size(), kInf);
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    for (const auto& [n, d] : seeds) {
      if (d < dist[n]) {
        dist[n] = d;
        queue.push({d, n});
      }
    }
    while (!queue.empty()) {
      const auto [d, n] = queue.top();
      queue.pop();
      if (d > dist[n]) continue;
      for (std::size_t ei : adj_[n]) {
        const auto& e = edges_[ei];
        const std::size_t m = e.u == n ? e.v : e.u;
        const double nd = d + e.length();
        if (nd < dist[m]) {
          dist[m] = nd;
          queue.push({nd, m});
        }
      }
    }
    return dist;
  }

  std::vector<double> from_location(const Location& loc) const {
    const auto& e = edges_[loc.edge];
    return dijkstra({{e.u, loc.offset}, {e.v, e.length() - loc.offset}});
  }

  // Shortest distance between two locations given distances from `a`.
  double between(const std::vector<double>& from_a, const Location& a, const Location& b) const {
    const auto& e = edges_[b.edge];
    double best = std::min(from_a[e.u] + b.offset, from_a[e.v] + e.length() - b.offset);
    if (a.edge == b.edge) best = std::min(best, std::abs(a.offset - b.offset));
    return best;
  }

  // Nearest point on any edge within `radius`.
  std::optional<Location> snap(const Point& p, double radius) const {
    double best = kInf;
    Location loc;
    for (std::size_t ei = 0; ei < edges_.size(); ++ei) {
      const auto& e = edges_[ei];
      for (std::size_t i = 1; i < e.pts.size(); ++i) {
        const Point& a = e.pts[i - 1];
        const Point& b = e.pts[i];
        const double dx = b.x - a.x, dy = b.y - a.y;
        const double len2 = dx * dx + dy * dy;
        double t = len2 > 0.0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
        t = std::clamp(t, 0.0, 1.0);
        const double d = distance(p, {a.x + t * dx, a.y + t * dy});
        if (d < best) {
          best = d;
          loc = {ei, e.cum[i - 1] + t * (e.cum[i] - e.cum[i - 1])};
        }
      }
    }
    if (best > radius) return std::nullopt;
    return loc;
  }

  std::vector<std::size_t> components() const {
    std::vector<std::size_t> comp(nodes_.size(), kUnset);
    std::size_t next = 0;
    for (std::size_t s = 0; s < nodes_.size(); ++s) {
      if (comp[s] != kUnset) continue;
      std::vector<std::size_t> todo{s};
      comp[s] = next;
      while (!todo.empty()) {
        const std::size_t n = todo.back();
        todo.pop_back();
        for (std::size_t ei : adj_[n]) {
          const std::size_t m = edges_[ei].u == n ? edges_[ei].v : edges_[ei].u;
          if (comp[m] == kUnset) {
            comp[m] = next;
            todo.push_back(m);
          }
        }
      }
      ++next;
    }
    return comp;
  }

  double total_length() const {
    double len = 0.0;
    for (const auto& e : edges_) len += e.length();
    return len;
  }

 private:
  static constexpr std::size_t kUnset = std::numeric_limits<std::size_t>::max();
  std::vector<Point> nodes_;
  std::vector<MetricEdge> edges_;
  std::vector<std::vector<std::size_t>> adj_;
};

using NodePair = std::pair<std::size_t, std::size_t>;

// Control-point pairs joined by a path: every pair when there are at most
// `samples` of them, otherwise `samples` draws uniform over connected pairs.
std::vector<NodePair> control_pairs(const MetricGraph& g, const MetricConfig& cfg) {
  const auto comp = g.components();
  std::map<std::size_t, std::vector<std::size_t>> members;
  for (std::size_t n = 0; n < comp.size(); ++n) members[comp[n]].push_back(n);
  std::vector<const std::vector<std::size_t>*> groups;
  std::vector<double> weights;
  double total = 0.0;
  for (const auto& [c, nodes] : members) {
    if (nodes.size() < 2) continue;
    groups.push_back(&nodes);
    const double pairs = 0.5 * double(nodes.size()) * double(nodes.size() - 1);
    weights.push_back(pairs);
    total += pairs;
  }
  std::vector<NodePair> out;
  if (total <= double(cfg.samples)) {
    for (const auto* nodes : groups)
      for (std::size_t i = 0; i < nodes->size(); ++i)
        for (std::size_t j = i + 1; j < nodes->size(); ++j) out.push_back({(*nodes)[i], (*nodes)[j]});
    return out;
  }
  for (std::size_t i = 0; i < cfg.samples; ++i) {
    auto rng = sample_rng(cfg.seed, 1, i);
    std::discrete_distribution<std::size_t> pick_group(weights.begin(), weights.end());
    const auto& nodes = *groups[pick_group(rng)];
    std::uniform_int_distribution<std::size_t> first(0, nodes.size() - 1);
    std::uniform_int_distribution<std::size_t> second(0, nodes.size() - 2);
    const std::size_t a = first(rng);
    std::size_t b = second(rng);
    if (b >= a) ++b;
    out.push_back({nodes[a], nodes[b]});
  }
  return out;
}

// Per-pair path lengths in the reference graph and in the other graph after
// snapping both control points; the latter is nullopt on failure.
struct PathComparison {
  double reference = 0.0;
  std::optional<double> other;
};

std::vector<PathComparison> compare_paths(const GeoGraph& from, const GeoGraph& to,
                                          const MetricConfig& cfg) {
  const MetricGraph ref = MetricGraph(from).densified(cfg.densify);
  const MetricGraph other(to);
  const auto pairs = control_pairs(ref, cfg);

  std::map<std::size_t, std::vector<double>> ref_dist;
  std::map<std::size_t, std::optional<Location>> snapped;
  std::map<std::size_t, std::vector<double>> other_dist;
  auto snap_of = [&](std::size_t n) -> const std::optional<Location>& {
    auto it = snapped.find(n);
    if (it == snapped.end()) it = snapped.emplace(n, other.snap(ref.nodes()[n], cfg.snap_radius)).first;
    return it->second;
  };

  std::vector<PathComparison> out;
  out.reserve(pairs.size());
  for (const auto& [a, b] : pairs) {
    auto rit = ref_dist.find(a);
    if (rit == ref_dist.end()) rit = ref_dist.emplace(a, ref.dijkstra({{a, 0.0}})).first;
    PathComparison cmp{rit->second[b], std::nullopt};
    const auto& la = snap_of(a);
    const auto& lb = snap_of(b);
    if (la && lb) {
      auto oit = other_dist.find(a);
      if (oit == other_dist.end()) oit = other_dist.emplace(a, other.from_location(*la)).first;
      const double len = other.between(oit->second, *la, *lb);
      if (std::isfinite(len)) cmp.other = len;
    }
    out.push_back(cmp);
  }
  return out;
}

std::vector<Point> markers(const MetricGraph& g, const Location& start, double spacing,
                           double budget) {
  auto [h, x] = g.split_at(start);
  const auto dist = h.dijkstra({{x, 0.0}});
  std::vector<Point> out{h.nodes()[x]};
  const int levels = static_cast<int>(std::floor(budget / spacing + 1e-9));
  for (int k = 1; k <= levels; ++k) {
    const double t = k * spacing;
    for (std::size_t n = 0; n < h.nodes().size(); ++n)
      if (std::abs(dist[n] - t) < 1e-9) out.push_back(h.nodes()[n]);
    for (std::size_t ei = 0; ei < h.edges().size(); ++ei) {
      const auto& e = h.edges()[ei];
      const double du = dist[e.u], dv = dist[e.v], len = e.length();
      if (!std::isfinite(du) && !std::isfinite(dv)) continue;
      double split = !std::isfinite(dv) ? len : !std::isfinite(du) ? 0.0 : (dv + len - du) / 2.0;
      split = std::clamp(split, 0.0, len);
      if (std::isfinite(du)) {
        const double s = t - du;
        if (s > 1e-9 && s < len - 1e-9 && s <= split) out.push_back(h.point_at({ei, s}));
      }
      if (std::isfinite(dv)) {
        const double s = len - (t - dv);
        if (s > 1e-9 && s < len - 1e-9 && s > split) out.push_back(h.point_at({ei, s}));
      }
    }
  }
  return out;
}

// Greedy one-to-one matching by increasing distance; ties by index.
std::size_t greedy_match(const std::vector<Point>& a, const std::vector<Point>& b, double radius) {
  std::vector<std::tuple<double, std::size_t, std::size_t>> cand;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double d = distance(a[i], b[j]);
      if (d <= radius) cand.push_back({d, i, j});
    }
  std::sort(cand.begin(), cand.end());
  std::vector<bool> used_a(a.size(), false), used_b(b.size(), false);
  std::size_t matched = 0;
  for (const auto& [d, i, j] : cand) {
    if (used_a[i] || used_b[j]) continue;
    used_a[i] = used_b[j] = true;
    ++matched;
  }
  return matched;
}

}  // namespace

void MetricConfig::validate() const {
  if (samples < 1) throw InvalidArgument("samples must be >= 1");
  if (!(buffer > 0.0)) throw InvalidArgument("buffer must be > 0");
  if (!(snap_radius > 0.0)) throw InvalidArgument("snap radius must be > 0");
  if (!(hm_radius > 0.0)) throw InvalidArgument("hm radius must be > 0");
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw InvalidArgument("rel_tol must be in (0, 1)");
  if (!(hm_budget > 0.0)) throw InvalidArgument("hm budget must be > 0");
  if (!(densify >= 0.0)) throw InvalidArgument("densify spacing must be >= 0");
}

double harmonic_mean(double a, double b) noexcept { return a + b > 0.0 ? 2.0 * a * b / (a + b) : 0.0; }

CcqScore ccq(const GeoGraph& pred, const GeoGraph& gt, std::uint32_t width, std::uint32_t height,
             double buffer) {
  const BinaryMask p = rasterize(pred, width, height);
  const BinaryMask g = rasterize(gt, width, height);
  const auto near_gt = squared_distance_transform(g);
  const auto near_pred = squared_distance_transform(p);
  const double b2 = buffer * buffer;
  std::size_t pred_px = 0, gt_px = 0, tp = 0, fn = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i]) {
      ++pred_px;
      tp += near_gt[i] <= b2;
    }
    if (g[i]) {
      ++gt_px;
      fn += !(near_pred[i] <= b2);
    }
  }
  if (pred_px == 0 && gt_px == 0) return {1.0, 1.0, 1.0};
  if (pred_px == 0 || gt_px == 0) return {0.0, 0.0, 0.0};
  const std::size_t fp = pred_px - tp;
  CcqScore s;
  s.correctness = double(tp) / double(pred_px);
  s.completeness = double(gt_px - fn) / double(gt_px);
  s.quality = double(tp) / double(tp + fp + fn);
  return s;
}

std::optional<double> shortest_path_length(const GeoGraph& graph, NodeId a, NodeId b) {
  const auto ia = graph.node_index(a);
  const auto ib = graph.node_index(b);
  if (!ia) throw InvalidArgument("unknown node id " + std::to_string(a));
  if (!ib) throw InvalidArgument("unknown node id " + std::to_string(b));
  const MetricGraph g(graph);
  const double d = g.dijkstra({{*ia, 0.0}})[*ib];
  if (!std::isfinite(d)) return std::nullopt;
  return d;
}

double apls_pair_contribution(double reference_length, std::optional<double> other_length) {
  if (!other_length) return 0.0;
  if (reference_length <= 0.0) return *other_length <= 0.0 ? 1.0 : 0.0;
  return 1.0 - std::min(1.0, std::abs(reference_length - *other_length) / reference_length);
}

std::optional<double> apls_one_way(const GeoGraph& from, const GeoGraph& to,
                                   const MetricConfig& cfg) {
  cfg.validate();
  const auto cmp = compare_paths(from, to, cfg);
  if (cmp.empty()) return std::nullopt;
  double sum = 0.0;
  for (const auto& c : cmp) sum += apls_pair_contribution(c.reference, c.other);
  return sum / double(cmp.size());
}

double apls(const GeoGraph& pred, const GeoGraph& gt, const MetricConfig& cfg) {
  if (gt.node_count() < 2) return pred.node_count() < 2 ? 1.0 : 0.0;
  const auto forward = apls_one_way(gt, pred, cfg);
  const auto backward = apls_one_way(pred, gt, cfg);
  if (!forward && !backward) return 1.0;
  return 0.5 * (forward.value_or(0.0) + backward.value_or(0.0));
}

double tlts(const GeoGraph& pred, const GeoGraph& gt, const MetricConfig& cfg) {
  cfg.validate();
  if (gt.node_count() < 2) return pred.node_count() < 2 ? 1.0 : 0.0;
  const auto cmp = compare_paths(gt, pred, cfg);
  if (cmp.empty()) return MetricGraph(pred).components().size() == pred.node_count() ? 1.0 : 0.0;
  std::size_t correct = 0;
  for (const auto& c : cmp) {
    if (!c.other || c.reference <= 0.0) continue;
    correct += std::abs(c.reference - *c.other) / c.reference <= cfg.rel_tol;
  }
  return double(correct) / double(cmp.size());
}

JunctionScore jct(const GeoGraph& pred, const GeoGraph& gt, const MetricConfig& cfg) {
  cfg.validate();
  struct Junction {
    NodeId id;
    Point pos;
    std::size_t degree;
  };
  auto junctions = [](const GeoGraph& g) {
    std::vector<Junction> out;
    const auto deg = g.degrees();
    for (std::size_t i = 0; i < g.node_count(); ++i)
      if (deg[i] >= 3) out.push_back({g.nodes()[i].id, g.nodes()[i].pos, deg[i]});
    std::sort(out.begin(), out.end(), [](const Junction& a, const Junction& b) { return a.id < b.id; });
    return out;
  };
  const auto gj = junctions(gt);
  const auto pj = junctions(pred);

  std::vector<std::tuple<double, std::size_t, std::size_t>> cand;
  for (std::size_t i = 0; i < gj.size(); ++i)
    for (std::size_t j = 0; j < pj.size(); ++j) {
      const double d = distance(gj[i].pos, pj[j].pos);
      if (d <= cfg.snap_radius) cand.push_back({d, i, j});
    }
  std::sort(cand.begin(), cand.end());
  std::vector<bool> gused(gj.size(), false), pused(pj.size(), false);
  double recall_sum = 0.0, precision_sum = 0.0;
  for (const auto& [d, i, j] : cand) {
    if (gused[i] || pused[j]) continue;
    gused[i] = pused[j] = true;
    const double common = double(std::min(gj[i].degree, pj[j].degree));
    recall_sum += common / double(gj[i].degree);
    precision_sum += common / double(pj[j].degree);
  }
  JunctionScore s;
  s.recall = gj.empty() ? (pj.empty() ? 1.0 : 0.0) : recall_sum / double(gj.size());
  s.precision = pj.empty() ? (gj.empty() ? 1.0 : 0.0) : precision_sum / double(pj.size());
  s.f1 = harmonic_mean(s.recall, s.precision);
  return s;
}

HolesMarblesScore holes_marbles(const GeoGraph& pred, const GeoGraph& gt, const MetricConfig& cfg) {
  cfg.validate();
  const MetricGraph g(gt);
  const MetricGraph p(pred);
  if (g.edges().empty()) {
    const double s = p.edges().empty() ? 1.0 : 0.0;
    return {s, s, s};
  }
  std::vector<double> cum;
  double total = 0.0;
  for (const auto& e : g.edges()) cum.push_back(total += e.length());
  const double budget = cfg.hm_budget * cfg.hm_radius;

  std::size_t marbles = 0, holes = 0, matched = 0;
  for (std::size_t i = 0; i < cfg.samples; ++i) {
    auto rng = sample_rng(cfg.seed, 2, i);
    const double u = std::uniform_real_distribution<double>(0.0, total)(rng);
    const std::size_t e = std::min<std::size_t>(
        static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), u) - cum.begin()),
        cum.size() - 1);
    const Location start{e, u - (cum[e] - g.edges()[e].length())};
    const auto gm = markers(g, start, cfg.hm_radius, budget);
    marbles += gm.size();
    const auto snapped = p.snap(g.point_at(start), cfg.snap_radius);
    if (!snapped) continue;
    const auto ph = markers(p, *snapped, cfg.hm_radius, budget);
    holes += ph.size();
    matched += greedy_match(gm, ph, cfg.hm_radius);
  }
  HolesMarblesScore s;
  s.recall = marbles ? double(matched) / double(marbles) : 0.0;
  s.precision = holes ? double(matched) / double(holes) : 0.0;
  s.f1 = harmonic_mean(s.recall, s.precision);
  return s;
}

MetricReport evaluate(const GeoGraph& pred, const GeoGraph& gt, std::uint32_t width,
                      std::uint32_t height, const MetricConfig& cfg) {
  cfg.validate();
  MetricReport r;
  r.apls = apls(pred, gt, cfg);
  r.tlts = tlts(pred, gt, cfg);
  r.jct = jct(pred, gt, cfg);
  r.hm = holes_marbles(pred, gt, cfg);
  r.ccq = ccq(pred, gt, width, height, cfg.buffer);
  return r;
}

}  // namespace topoloss
