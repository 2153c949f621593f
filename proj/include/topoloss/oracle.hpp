#pragma once

// Brute-force references for the pair-weight sweep. Nothing here shares code
// with pair_weights.cpp; it is slow and meant for small grids only.

#include <cstddef>
#include <cstdint>

#include "topoloss/grid.hpp"
#include "topoloss/pair_weights.hpp"

namespace topoloss::oracle {

/// Widest-path value between pixels q and r (linear indices): the maximum
/// over 4-connected paths of the smallest value on the path, endpoints
/// included.
float maximin_bruteforce(const ScalarGrid& pred, std::size_t q, std::size_t r);

/// Bottleneck pixel of the pair (q, r) under the sweep's tie rule, found by
/// growing the affinity graph edge by edge and testing reachability.
std::size_t bottleneck_pixel(const ScalarGrid& pred, std::size_t q, std::size_t r);

/// w and v obtained by visiting every pair of labelled pixels.
PairWeights bruteforce_pair_weights(const ScalarGrid& pred, const LabelGrid& labels,
                                    const BinaryMask& region);

struct PairwiseLosses {
  double dis = 0.0;
  double conn = 0.0;
};

/// Pair-sum forms of the two topological terms: squared maximin cost of each
/// cross-label pair bottlenecked in the region, and the squared target error
/// at the bottleneck of each same-label pair bottlenecked outside it.
PairwiseLosses bruteforce_pairwise_losses(const ScalarGrid& pred, const ScalarGrid& target,
                                          const LabelGrid& labels, const BinaryMask& region);

struct Instance {
  ScalarGrid pred;
  ScalarGrid target;
  BinaryMask region;
  LabelGrid labels;
};

/// Random grid of at most 6x6 whose background has 2-4 components. Odd seeds
/// draw predictions from a handful of levels so ties are common.
Instance random_instance(std::uint64_t seed);

}  // namespace topoloss::oracle
