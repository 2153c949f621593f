#pragma once

#include <cstdint>

#include "topoloss/geo_graph.hpp"

namespace topoloss::synthetic {

/// Jittered lattice of roads running border to border. Some interior
/// segments are dropped, but never so that a node is left with degree 1,
/// so every road end lies on the image border.
GeoGraph road_lattice(std::uint64_t seed, std::uint32_t width, std::uint32_t height);

/// Regular grid of straight roads: `count` vertical and `count` horizontal
/// lines at equal spacing, with degree-4 junctions.
GeoGraph regular_grid(std::uint32_t width, std::uint32_t height, int count);

/// One polyline from a point on one border to a point on another, through a
/// random interior vertex.
GeoGraph border_polyline(std::uint64_t seed, std::uint32_t width, std::uint32_t height);

}  // namespace topoloss::synthetic
