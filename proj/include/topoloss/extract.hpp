#pragma once

#include "topoloss/geo_graph.hpp"
#include "topoloss/grid.hpp"

namespace topoloss {

inline constexpr float kDefaultThreshold = 4.0f;
inline constexpr double kDefaultMinSpur = 10.0;

/// Pixels whose predicted distance is strictly below `tau`.
BinaryMask threshold(const ScalarGrid& dist, float tau);

/// Zhang-Suen thinning to a fixpoint.
///
/// Candidates of each sub-iteration are collected in parallel as usual but
/// deleted one at a time, re-checking the crossing-number test against the
/// current image, so a 2x2 block or a two-pixel-thick diagonal never
/// vanishes. Staircase corners that do not carry connectivity are removed in
/// a final pass, leaving an 8-connected skeleton with clean degrees.
BinaryMask thin(const BinaryMask& mask);

/// Traces a thin skeleton into a graph. Pixels with 8-neighbour degree other
/// than 2 become nodes (8-adjacent junction pixels share one node); chains
/// of degree-2 pixels become edges whose `via` keeps the traced pixels.
/// A closed loop with no junction is split at its first raster pixel and its
/// antipode.
GeoGraph skeleton_to_graph(const BinaryMask& skel);

/// Repeatedly removes edges that end in a degree-1 node and are shorter than
/// `min_spur`, drops nodes left without edges, and joins the two edges of
/// every node whose degree fell to 2 because of a removal.
GeoGraph prune(const GeoGraph& graph, double min_spur);

/// threshold -> thin -> skeleton_to_graph -> prune.
GeoGraph extract_graph(const ScalarGrid& dist, float tau = kDefaultThreshold,
                       double min_spur = kDefaultMinSpur);

}  // namespace topoloss
