#include "topoloss/pair_weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "topoloss/union_find.hpp"

namespace topoloss {

namespace {

struct AffinityEdge {
  float affinity;
  std::uint32_t lo;
  std::uint32_t hi;
};

void check_inputs(const ScalarGrid& pred, const LabelGrid& labels, const BinaryMask& region) {
  require_same_extent(pred, labels.ids, "pair weights: prediction/label extent mismatch");
  require_same_extent(pred, region, "pair weights: prediction/region extent mismatch");
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if ((labels[i] == 0) != (region[i] != 0))
      throw InvalidArgument("pair weights: labels must be 0 exactly on region pixels");
    if (!std::isfinite(pred[i])) throw InvalidArgument("pair weights: non-finite prediction");
  }
}

std::vector<AffinityEdge> sorted_edges(std::span<const float> values, std::uint32_t width,
                                       std::uint32_t height) {
  std::vector<AffinityEdge> edges;
  edges.reserve(2 * values.size());
  for (std::uint32_t y = 0; y < height; ++y) {
    for (std::uint32_t x = 0; x < width; ++x) {
      const std::uint32_t p = y * width + x;
      if (x + 1 < width) edges.push_back({std::min(values[p], values[p + 1]), p, p + 1});
      if (y + 1 < height) edges.push_back({std::min(values[p], values[p + width]), p, p + width});
    }
  }
  std::sort(edges.begin(), edges.end(), [](const AffinityEdge& l, const AffinityEdge& r) {
    if (l.affinity != r.affinity) return l.affinity > r.affinity;
    if (l.lo != r.lo) return l.lo < r.lo;
    return l.hi < r.hi;
  });
  return edges;
}

enum class Keep { both, cross_only, same_only };

// One sweep over `values`; pair counts are attributed with the region test
// and then filtered by `keep`.
void sweep(std::span<const float> values, const LabelGrid& labels, const BinaryMask& region,
           Keep keep, PairWeights& out) {
  const auto edges = sorted_edges(values, labels.width(), labels.height());
  LabelHistogramForest forest(labels.ids.values());
  for (const auto& e : edges) {
    const std::uint32_t ra = forest.find(e.lo);
    const std::uint32_t rb = forest.find(e.hi);
    if (ra == rb) continue;
    const auto counts = forest.merge(ra, rb);
    const std::uint32_t b = values[e.hi] < values[e.lo] ? e.hi : e.lo;
    if (region[b]) {
      if (keep != Keep::same_only) out.w[b] += counts.cross;
    } else {
      if (keep != Keep::cross_only) out.v[b] += counts.same;
    }
  }
}

PairWeights zero_weights(const ScalarGrid& pred) {
  return {Grid<std::int64_t>(pred.width(), pred.height(), 0),
          Grid<std::int64_t>(pred.width(), pred.height(), 0)};
}

}  // namespace

PairWeights compute_pair_weights(const ScalarGrid& pred, const LabelGrid& labels,
                                 const BinaryMask& region) {
  check_inputs(pred, labels, region);
  PairWeights out = zero_weights(pred);
  sweep(pred.values(), labels, region, Keep::both, out);
  return out;
}

PairWeights compute_pair_weights_constrained(const ScalarGrid& pred, const LabelGrid& labels,
                                             const BinaryMask& region) {
  check_inputs(pred, labels, region);
  PairWeights out = zero_weights(pred);
  std::vector<float> masked(pred.values().begin(), pred.values().end());
  for (std::size_t i = 0; i < masked.size(); ++i)
    if (!region[i]) masked[i] = std::numeric_limits<float>::infinity();
  sweep(masked, labels, region, Keep::cross_only, out);
  for (std::size_t i = 0; i < masked.size(); ++i)
    masked[i] = region[i] ? -std::numeric_limits<float>::infinity() : pred[i];
  sweep(masked, labels, region, Keep::same_only, out);
  return out;
}

PairWeights compute_loss_pair_weights(const ScalarGrid& pred, const LabelGrid& labels,
                                      const BinaryMask& region) {
#ifdef TOPOLOSS_CONSTRAINED_SEARCH
  return compute_pair_weights_constrained(pred, labels, region);
#else
  return compute_pair_weights(pred, labels, region);
#endif
}

}  // namespace topoloss
