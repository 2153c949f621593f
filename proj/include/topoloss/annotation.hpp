#pragma once

#include <cstdint>
#include <functional>

#include "topoloss/geo_graph.hpp"
#include "topoloss/grid.hpp"

namespace topoloss {

inline constexpr int kDefaultDilateRadius = 5;
inline constexpr float kDefaultDmax = 20.0f;

/// Ground-truth bundle for one image: the dilated road region R, the
/// 4-connected components of its complement, and the capped distance map.
struct GroundTruth {
  BinaryMask region;
  LabelGrid labels;
  ScalarGrid dist;
  float dmax = kDefaultDmax;

  std::uint32_t width() const noexcept { return region.width(); }
  std::uint32_t height() const noexcept { return region.height(); }
};

/// Calls `plot(x, y)` for every pixel of the 8-connected Bresenham segment
/// between two integer points, endpoints included.
void bresenham(long long x0, long long y0, long long x1, long long y1,
               const std::function<void(long long, long long)>& plot);

/// Draws every edge (through its interior polyline points) as 8-connected
/// digital segments between rounded endpoints; isolated nodes draw one pixel.
BinaryMask rasterize(const GeoGraph& graph, std::uint32_t width, std::uint32_t height);

GroundTruth build_ground_truth(const GeoGraph& graph, std::uint32_t width, std::uint32_t height,
                               int dilate_radius = kDefaultDilateRadius,
                               float dmax = kDefaultDmax);

}  // namespace topoloss
