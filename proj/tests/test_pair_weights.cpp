#include <doctest.h>

#include <cmath>
#include <limits>

#include "topoloss/loss.hpp"
#include "topoloss/oracle.hpp"
#include "topoloss/pair_weights.hpp"

using namespace topoloss;

namespace {

struct Line {
  ScalarGrid pred;
  LabelGrid labels;
  BinaryMask region;
};

Line five(std::vector<float> values) {
  Line l{ScalarGrid(5, 1, std::move(values)),
         LabelGrid{Grid<std::int32_t>(5, 1, std::vector<std::int32_t>{1, 1, 0, 2, 2}), 2},
         BinaryMask(5, 1)};
  l.region[2] = 1;
  return l;
}

std::int64_t cross_pairs(const LabelGrid& labels) {
  std::int64_t n = 0;
  for (std::size_t i = 0; i < labels.size(); ++i)
    for (std::size_t j = i + 1; j < labels.size(); ++j)
      n += labels[i] > 0 && labels[j] > 0 && labels[i] != labels[j];
  return n;
}

std::int64_t sum(const Grid<std::int64_t>& g) {
  std::int64_t s = 0;
  for (auto v : g.values()) s += v;
  return s;
}

}  // namespace

TEST_CASE("maximin brute force examples") {
  const ScalarGrid line(5, 1, std::vector<float>{5, 5, 3, 5, 5});
  CHECK(oracle::maximin_bruteforce(line, 0, 4) == 3.0f);
  const ScalarGrid pair(2, 1, std::vector<float>{7, 9});
  CHECK(oracle::maximin_bruteforce(pair, 0, 1) == 7.0f);
  const ScalarGrid flat(4, 3, 2.5f);
  CHECK(oracle::maximin_bruteforce(flat, 0, 11) == 2.5f);
  CHECK(oracle::maximin_bruteforce(flat, 5, 6) == 2.5f);
  // a detour through high values beats the direct low path
  const ScalarGrid detour(3, 2, std::vector<float>{9, 1, 9, 9, 9, 9});
  CHECK(oracle::maximin_bruteforce(detour, 0, 2) == 9.0f);
}

TEST_CASE("gap fixture weights") {
  const auto l = five({5, 5, 3, 5, 5});
  const auto pw = compute_pair_weights(l.pred, l.labels, l.region);
  CHECK(pw.w.vector() == std::vector<std::int64_t>{0, 0, 4, 0, 0});
  CHECK(pw.v.vector() == std::vector<std::int64_t>{1, 0, 0, 1, 0});
  const auto slow = oracle::bruteforce_pair_weights(l.pred, l.labels, l.region);
  CHECK(slow.w == pw.w);
  CHECK(slow.v == pw.v);
  CHECK(sum(pw.w) == cross_pairs(l.labels));
}

TEST_CASE("constant prediction follows the tie rule") {
  const auto l = five({2, 2, 2, 2, 2});
  const auto pw = compute_pair_weights(l.pred, l.labels, l.region);
  // Sweep order (0,1) (1,2) (2,3) (3,4): pairs (0,3),(1,3) bottleneck at 2,
  // pairs (0,4),(1,4) at 3, which lies outside the region.
  CHECK(pw.w.vector() == std::vector<std::int64_t>{0, 0, 2, 0, 0});
  CHECK(pw.v.vector() == std::vector<std::int64_t>{1, 0, 0, 1, 0});
  const auto slow = oracle::bruteforce_pair_weights(l.pred, l.labels, l.region);
  CHECK(slow.w == pw.w);
  CHECK(slow.v == pw.v);
  CHECK(oracle::bottleneck_pixel(l.pred, 0, 4) == 3);
  CHECK(oracle::bottleneck_pixel(l.pred, 1, 3) == 2);
}

TEST_CASE("one background component and no region gives no cross weight") {
  ScalarGrid pred(4, 4);
  for (std::size_t i = 0; i < pred.size(); ++i) pred[i] = float((i * 7) % 5);
  const LabelGrid labels{Grid<std::int32_t>(4, 4, 1), 1};
  const auto pw = compute_pair_weights(pred, labels, BinaryMask(4, 4));
  CHECK(sum(pw.w) == 0);
  CHECK(sum(pw.v) == 16 * 15 / 2);
}

TEST_CASE("pair weights reject bad inputs") {
  const auto l = five({5, 5, 3, 5, 5});
  CHECK_THROWS_AS(compute_pair_weights(ScalarGrid(4, 1), l.labels, l.region), ExtentMismatch);
  auto bad = l;
  bad.region[0] = 1;
  CHECK_THROWS_AS(compute_pair_weights(bad.pred, bad.labels, bad.region), InvalidArgument);
  bad = l;
  bad.pred[1] = std::numeric_limits<float>::quiet_NaN();
  CHECK_THROWS_AS(compute_pair_weights(bad.pred, bad.labels, bad.region), InvalidArgument);
}

TEST_CASE("sweep equals brute force on random instances") {
  for (std::uint64_t seed = 1000; seed < 1150; ++seed) {
    const auto inst = oracle::random_instance(seed);
    const auto fast = compute_pair_weights(inst.pred, inst.labels, inst.region);
    const auto slow = oracle::bruteforce_pair_weights(inst.pred, inst.labels, inst.region);
    REQUIRE(fast.w == slow.w);
    REQUIRE(fast.v == slow.v);
    CHECK(sum(fast.w) <= cross_pairs(inst.labels));
    const auto pairs =
        oracle::bruteforce_pairwise_losses(inst.pred, inst.target, inst.labels, inst.region);
    CHECK(loss_dis(inst.pred, fast).value == doctest::Approx(pairs.dis).epsilon(1e-9));
    CHECK(loss_conn(inst.pred, inst.target, fast).value ==
          doctest::Approx(pairs.conn).epsilon(1e-9));
  }
}

TEST_CASE("random instances are small with 2-4 background components") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto inst = oracle::random_instance(seed);
    CHECK(inst.pred.width() <= 6);
    CHECK(inst.pred.height() <= 6);
    CHECK(inst.labels.count >= 2);
    CHECK(inst.labels.count <= 4);
  }
}

TEST_CASE("constrained sweep equals brute force on masked predictions") {
  const float big = 1e30f;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto inst = oracle::random_instance(seed);
    const auto pw = compute_pair_weights_constrained(inst.pred, inst.labels, inst.region);
    ScalarGrid lifted = inst.pred, sunk = inst.pred;
    for (std::size_t i = 0; i < lifted.size(); ++i) {
      if (!inst.region[i]) lifted[i] = big;
      if (inst.region[i]) sunk[i] = -big;
    }
    CHECK(pw.w == oracle::bruteforce_pair_weights(lifted, inst.labels, inst.region).w);
    CHECK(pw.v == oracle::bruteforce_pair_weights(sunk, inst.labels, inst.region).v);
    // with the search confined to the region every cross pair lands in it
    CHECK(sum(pw.w) == cross_pairs(inst.labels));
  }
}
