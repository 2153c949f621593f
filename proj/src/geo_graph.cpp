#include "topoloss/geo_graph.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "topoloss/error.hpp"

namespace topoloss {

double distance(const Point& a, const Point& b) noexcept { return std::hypot(a.x - b.x, a.y - b.y); }

double polyline_length(const std::vector<Point>& pts) noexcept {
  double len = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) len += distance(pts[i - 1], pts[i]);
  return len;
}

void GeoGraph::add_node(NodeId id, Point pos) {
  if (index_.contains(id)) throw InvalidArgument("duplicate node id " + std::to_string(id));
  if (!std::isfinite(pos.x) || !std::isfinite(pos.y))
    throw InvalidArgument("non-finite coordinate on node " + std::to_string(id));
  index_.emplace(id, nodes_.size());
  nodes_.push_back({id, pos});
}

bool GeoGraph::add_edge(NodeId a, NodeId b, std::vector<Point> via) {
  if (!has_node(a)) throw InvalidArgument("unknown node reference " + std::to_string(a));
  if (!has_node(b)) throw InvalidArgument("unknown node reference " + std::to_string(b));
  if (a == b) throw InvalidArgument("self-loop on node " + std::to_string(a));
  std::vector<Point> reversed(via.rbegin(), via.rend());
  for (const auto& e : edges_) {
    if (e.a == a && e.b == b && e.via == via) return false;
    if (e.a == b && e.b == a && e.via == reversed) return false;
  }
  edges_.push_back({a, b, std::move(via)});
  return true;
}

std::optional<std::size_t> GeoGraph::node_index(NodeId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

const Node& GeoGraph::node(NodeId id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw InvalidArgument("unknown node id " + std::to_string(id));
  return nodes_[it->second];
}

NodeId GeoGraph::max_id() const noexcept {
  NodeId m = -1;
  for (const auto& n : nodes_) m = std::max(m, n.id);
  return m;
}

std::vector<Point> GeoGraph::polyline(std::size_t e) const {
  const Edge& edge = edges_.at(e);
  std::vector<Point> pts;
  pts.reserve(edge.via.size() + 2);
  pts.push_back(node(edge.a).pos);
  pts.insert(pts.end(), edge.via.begin(), edge.via.end());
  pts.push_back(node(edge.b).pos);
  return pts;
}

double GeoGraph::edge_length(std::size_t e) const { return polyline_length(polyline(e)); }

double GeoGraph::total_length() const {
  double len = 0.0;
  for (std::size_t e = 0; e < edges_.size(); ++e) len += edge_length(e);
  return len;
}

std::vector<std::size_t> GeoGraph::degrees() const {
  std::vector<std::size_t> deg(nodes_.size(), 0);
  for (const auto& e : edges_) {
    ++deg[index_.at(e.a)];
    ++deg[index_.at(e.b)];
  }
  return deg;
}

namespace {

template <typename T>
bool parse_number(std::string_view tok, T& out) {
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> toks;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) toks.push_back(line.substr(i, j - i));
    i = j;
  }
  return toks;
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void rdp(const std::vector<Point>& pts, std::size_t lo, std::size_t hi, double tol,
         std::vector<bool>& keep) {
  if (hi <= lo + 1) return;
  const Point& a = pts[lo];
  const Point& b = pts[hi];
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double best = -1.0;
  std::size_t best_i = lo;
  for (std::size_t i = lo + 1; i < hi; ++i) {
    // distance to the segment, so points doubling back are never dropped
    const double ux = pts[i].x - a.x, uy = pts[i].y - a.y;
    const double dot = dx * ux + dy * uy;
    double d;
    if (dot <= 0.0 || len2 == 0.0) d = distance(pts[i], a);
    else if (dot >= len2) d = distance(pts[i], b);
    else d = std::abs(dy * ux - dx * uy) / std::sqrt(len2);
    if (d > best) {
      best = d;
      best_i = i;
    }
  }
  if (best > tol) {
    keep[best_i] = true;
    rdp(pts, lo, best_i, tol, keep);
    rdp(pts, best_i, hi, tol, keep);
  }
}

}  // namespace

GeoGraph parse_graph(std::istream& in) {
  GeoGraph g;
  struct PendingEdge {
    NodeId a, b;
    std::size_t line;
  };
  std::vector<PendingEdge> pending;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto toks = split_ws(line);
    if (toks.empty() || toks[0].front() == '#') continue;
    if (toks[0] == "N") {
      NodeId id = 0;
      double x = 0, y = 0;
      if (toks.size() != 4 || !parse_number(toks[1], id) || !parse_number(toks[2], x) ||
          !parse_number(toks[3], y))
        throw ParseError(lineno, "malformed node line");
      if (!std::isfinite(x) || !std::isfinite(y))
        throw ParseError(lineno, "non-finite node coordinate");
      if (g.has_node(id)) throw ParseError(lineno, "duplicate node id " + std::to_string(id));
      g.add_node(id, {x, y});
    } else if (toks[0] == "E") {
      NodeId a = 0, b = 0;
      if (toks.size() != 3 || !parse_number(toks[1], a) || !parse_number(toks[2], b))
        throw ParseError(lineno, "malformed edge line");
      if (a == b) throw ParseError(lineno, "self-loop on node " + std::to_string(a));
      pending.push_back({a, b, lineno});
    } else {
      throw ParseError(lineno, "unknown line type '" + std::string(toks[0]) + "'");
    }
  }
  for (const auto& e : pending) {
    if (!g.has_node(e.a))
      throw ParseError(e.line, "unknown node reference " + std::to_string(e.a));
    if (!g.has_node(e.b))
      throw ParseError(e.line, "unknown node reference " + std::to_string(e.b));
    g.add_edge(e.a, e.b);
  }
  return g;
}

GeoGraph parse_graph(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_graph(in);
}

GeoGraph flatten(const GeoGraph& graph, double tolerance) {
  GeoGraph out;
  std::vector<Node> sorted = graph.nodes();
  std::sort(sorted.begin(), sorted.end(), [](const Node& l, const Node& r) { return l.id < r.id; });
  for (const auto& n : sorted) out.add_node(n.id, n.pos);
  NodeId next = graph.max_id() + 1;
  for (std::size_t e = 0; e < graph.edge_count(); ++e) {
    const Edge& edge = graph.edges()[e];
    if (edge.via.empty()) {
      out.add_edge(edge.a, edge.b);
      continue;
    }
    const auto pts = graph.polyline(e);
    std::vector<bool> keep(pts.size(), false);
    keep.front() = keep.back() = true;
    rdp(pts, 0, pts.size() - 1, std::max(tolerance, 0.0), keep);
    NodeId prev = edge.a;
    for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
      if (!keep[i]) continue;
      out.add_node(next, pts[i]);
      out.add_edge(prev, next);
      prev = next++;
    }
    if (prev == edge.b) continue;
    out.add_edge(prev, edge.b);
  }
  return out;
}

void write_graph(std::ostream& out, const GeoGraph& graph) {
  const GeoGraph flat = flatten(graph);
  for (const auto& n : flat.nodes())
    out << "N " << n.id << ' ' << format_double(n.pos.x) << ' ' << format_double(n.pos.y) << '\n';
  for (const auto& e : flat.edges()) out << "E " << e.a << ' ' << e.b << '\n';
}

}  // namespace topoloss
