#pragma once

#include <iosfwd>
#include <string>

#include "topoloss/geo_graph.hpp"
#include "topoloss/grid.hpp"

namespace topoloss {

// Grid file: "GRDF", u32 width, u32 height, then width*height f32 row-major,
// all little-endian, nothing after the payload.

void write_grid(std::ostream& out, const ScalarGrid& grid);
ScalarGrid read_grid(std::istream& in);

void save_grid(const std::string& path, const ScalarGrid& grid);
ScalarGrid load_grid(const std::string& path);

/// Masks travel as 0/1 grids; any nonzero value reads back as set.
void save_mask(const std::string& path, const BinaryMask& mask);
BinaryMask load_mask(const std::string& path);

void save_graph(const std::string& path, const GeoGraph& graph);
GeoGraph load_graph(const std::string& path);

}  // namespace topoloss
