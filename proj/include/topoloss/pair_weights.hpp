#pragma once

#include <cstdint>

#include "topoloss/grid.hpp"

namespace topoloss {

/// Per-pixel pair counts from the maximin sweep.
///
/// `w[p]` counts pairs of background pixels with different labels whose
/// maximin path bottlenecks at `p` (kept only for `p` inside the region);
/// `v[p]` counts same-label pairs bottlenecked at `p` (kept only outside it).
struct PairWeights {
  Grid<std::int64_t> w;
  Grid<std::int64_t> v;
};

/// Single Kruskal sweep over the 4-adjacency graph with edge affinity
/// min(pred[p], pred[q]), processed by decreasing affinity, then by the
/// smaller endpoint index, then by the larger one. The bottleneck of a merge
/// is the endpoint with the smaller prediction (smaller index on ties).
///
/// `labels` must be 0 exactly where `region` is set.
PairWeights compute_pair_weights(const ScalarGrid& pred, const LabelGrid& labels,
                                 const BinaryMask& region);

/// Variant that confines the maximin search instead of only the attribution:
/// cross-label pairs are swept with every pixel outside the region treated as
/// +inf, same-label pairs with every region pixel treated as -inf.
PairWeights compute_pair_weights_constrained(const ScalarGrid& pred, const LabelGrid& labels,
                                             const BinaryMask& region);

/// Whichever of the two sweeps the loss was built to use
/// (TOPOLOSS_CONSTRAINED_SEARCH).
PairWeights compute_loss_pair_weights(const ScalarGrid& pred, const LabelGrid& labels,
                                      const BinaryMask& region);

}  // namespace topoloss
