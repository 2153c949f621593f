#pragma once

#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

namespace topoloss {

/// Disjoint sets over 0..n-1 with union by size and path halving.
class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n), size_(n, 1) {
    std::iota(parent_.begin(), parent_.end(), std::uint32_t{0});
  }

  std::uint32_t find(std::uint32_t x) noexcept {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  // Returns the surviving root. Both arguments must be roots.
  std::uint32_t link(std::uint32_t a, std::uint32_t b) noexcept {
    if (a == b) return a;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    return a;
  }

  std::uint32_t unite(std::uint32_t a, std::uint32_t b) noexcept { return link(find(a), find(b)); }
  std::uint32_t set_size(std::uint32_t root) const noexcept { return size_[root]; }
  std::size_t size() const noexcept { return parent_.size(); }

 private:
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint32_t> size_;
};

/// Per-set histogram of labels carried through unions. Label 0 is not
/// counted. Merging reports how many (unordered) member pairs straddle the
/// two sets with equal vs. different labels.
class LabelHistogramForest {
 public:
  struct MergeCounts {
    std::int64_t same = 0;
    std::int64_t cross = 0;
  };

  explicit LabelHistogramForest(std::span<const std::int32_t> labels)
      : sets_(labels.size()), hist_(labels.size()), total_(labels.size(), 0) {
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] > 0) {
        hist_[i].push_back({labels[i], 1});
        total_[i] = 1;
      }
    }
  }

  std::uint32_t find(std::uint32_t x) noexcept { return sets_.find(x); }

  // Merges the sets rooted at `ra` and `rb` (distinct roots).
  MergeCounts merge(std::uint32_t ra, std::uint32_t rb) {
    MergeCounts counts;
    const auto& ha = hist_[ra];
    const auto& hb = hist_[rb];
    std::vector<Bin> merged;
    if (!ha.empty() && !hb.empty()) {
      merged.reserve(ha.size() + hb.size());
      std::size_t i = 0, j = 0;
      while (i < ha.size() || j < hb.size()) {
        if (j == hb.size() || (i < ha.size() && ha[i].label < hb[j].label)) {
          merged.push_back(ha[i++]);
        } else if (i == ha.size() || hb[j].label < ha[i].label) {
          merged.push_back(hb[j++]);
        } else {
          counts.same += ha[i].count * hb[j].count;
          merged.push_back({ha[i].label, ha[i].count + hb[j].count});
          ++i;
          ++j;
        }
      }
      counts.cross = total_[ra] * total_[rb] - counts.same;
    }
    const std::int64_t total = total_[ra] + total_[rb];
    const std::uint32_t root = sets_.link(ra, rb);
    const std::uint32_t other = root == ra ? rb : ra;
    if (!merged.empty()) {
      hist_[root] = std::move(merged);
    } else if (hist_[root].empty()) {
      hist_[root] = std::move(hist_[other]);
    }
    std::vector<Bin>().swap(hist_[other]);
    total_[root] = total;
    return counts;
  }

 private:
  struct Bin {
    std::int32_t label;
    std::int64_t count;
  };

  DisjointSets sets_;
  std::vector<std::vector<Bin>> hist_;
  std::vector<std::int64_t> total_;
};

}  // namespace topoloss
