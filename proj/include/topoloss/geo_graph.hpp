#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace topoloss {

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

double distance(const Point& a, const Point& b) noexcept;

using NodeId = std::int64_t;

struct Node {
  NodeId id = 0;
  Point pos;
  friend bool operator==(const Node&, const Node&) = default;
};

/// Undirected edge. `via` holds interior polyline points (endpoints excluded);
/// empty for a straight segment.
struct Edge {
  NodeId a = 0;
  NodeId b = 0;
  std::vector<Point> via;
  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Undirected spatial graph in pixel coordinates.
///
/// Node ids are unique, edges reference existing nodes and never form
/// self-loops. Adding an edge identical to an existing one (same endpoints
/// in either order and same geometry) is a no-op; parallel edges are kept
/// only when their interior geometry differs.
class GeoGraph {
 public:
  void add_node(NodeId id, Point pos);
  /// Returns false when the edge duplicates an existing one.
  bool add_edge(NodeId a, NodeId b, std::vector<Point> via = {});

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }

  bool has_node(NodeId id) const { return index_.contains(id); }
  std::optional<std::size_t> node_index(NodeId id) const;
  const Node& node(NodeId id) const;
  NodeId max_id() const noexcept;

  /// Full polyline of edge `e`: endpoint a, interior points, endpoint b.
  std::vector<Point> polyline(std::size_t e) const;
  double edge_length(std::size_t e) const;
  double total_length() const;
  std::vector<std::size_t> degrees() const;

  friend bool operator==(const GeoGraph& l, const GeoGraph& r) {
    return l.nodes_ == r.nodes_ && l.edges_ == r.edges_;
  }

 private:
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::unordered_map<NodeId, std::size_t> index_;
};

double polyline_length(const std::vector<Point>& pts) noexcept;

/// Reads the line format: `N <id> <x> <y>`, `E <id> <id>`, `# comment`,
/// blank lines. Edges may precede the nodes they reference.
GeoGraph parse_graph(std::istream& in);
GeoGraph parse_graph(std::string_view text);

/// Writes nodes (ascending id) then edges. Curved edges are first expanded
/// into chains of straight edges via `flatten`.
void write_graph(std::ostream& out, const GeoGraph& graph);

/// Replaces interior polyline points by fresh degree-2 nodes, after a
/// Ramer-Douglas-Peucker pass that drops points within `tolerance` of the
/// simplified polyline. At 0 only points lying on it are dropped, so the
/// geometry is unchanged.
GeoGraph flatten(const GeoGraph& graph, double tolerance = 0.0);

}  // namespace topoloss
