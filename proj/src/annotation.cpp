#include "topoloss/annotation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

namespace topoloss {

void bresenham(long long x0, long long y0, long long x1, long long y1,
               const std::function<void(long long, long long)>& plot) {
  const long long dx = std::llabs(x1 - x0);
  const long long dy = -std::llabs(y1 - y0);
  const long long sx = x0 < x1 ? 1 : -1;
  const long long sy = y0 < y1 ? 1 : -1;
  long long err = dx + dy;
  while (true) {
    plot(x0, y0);
    if (x0 == x1 && y0 == y1) break;
    const long long e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

namespace {

struct Pixel {
  long long x, y;
};

Pixel round_checked(const Point& p, NodeId owner, std::uint32_t width, std::uint32_t height) {
  const long long x = std::llround(p.x);
  const long long y = std::llround(p.y);
  if (x < 0 || y < 0 || x >= static_cast<long long>(width) || y >= static_cast<long long>(height))
    throw RasterizeError(owner, "coordinate (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                                    ") outside " + std::to_string(width) + "x" +
                                    std::to_string(height) + " raster");
  return {x, y};
}

}  // namespace

BinaryMask rasterize(const GeoGraph& graph, std::uint32_t width, std::uint32_t height) {
  BinaryMask mask(width, height);
  auto plot = [&](long long x, long long y) {
    mask(static_cast<std::uint32_t>(x), static_cast<std::uint32_t>(y)) = 1;
  };
  for (const auto& n : graph.nodes()) {
    const Pixel p = round_checked(n.pos, n.id, width, height);
    plot(p.x, p.y);
  }
  for (std::size_t e = 0; e < graph.edge_count(); ++e) {
    const NodeId owner = graph.edges()[e].a;
    const auto pts = graph.polyline(e);
    Pixel prev = round_checked(pts.front(), owner, width, height);
    for (std::size_t i = 1; i < pts.size(); ++i) {
      const Pixel cur = round_checked(pts[i], owner, width, height);
      bresenham(prev.x, prev.y, cur.x, cur.y, plot);
      prev = cur;
    }
  }
  return mask;
}

GroundTruth build_ground_truth(const GeoGraph& graph, std::uint32_t width, std::uint32_t height,
                               int dilate_radius, float dmax) {
  if (!(dmax > 0.0f) || !std::isfinite(dmax)) throw InvalidArgument("dmax must be positive");
  const BinaryMask centerline = rasterize(graph, width, height);
  GroundTruth gt;
  gt.dmax = dmax;
  gt.region = dilate(centerline, dilate_radius);
  gt.labels = connected_components(complement(gt.region), Connectivity::four);
  gt.dist = distance_transform(centerline);
  for (auto& v : gt.dist.values()) v = std::min(v, dmax);
  return gt;
}

}  // namespace topoloss
