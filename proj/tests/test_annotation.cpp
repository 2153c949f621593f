#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "topoloss/annotation.hpp"
#include "topoloss/geo_graph.hpp"
#include "topoloss/synthetic.hpp"

using namespace topoloss;

namespace {

std::size_t parse_error_line(std::string_view text) {
  try {
    parse_graph(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST_CASE("parse graph text") {
  const auto g = parse_graph("N 0 1 1\nN 1 5 1\nE 0 1");
  CHECK(g.node_count() == 2);
  CHECK(g.edge_count() == 1);
  CHECK(g.edge_length(0) == 4.0);
  CHECK(parse_graph("").node_count() == 0);
  const auto c = parse_graph("# roads\n\nN 3 0.5 -2e1\n  \nN 9 1 1\n");
  CHECK(c.node_count() == 2);
  CHECK(c.node(3).pos == Point{0.5, -20.0});
}

TEST_CASE("parse errors carry the line number") {
  CHECK(parse_error_line("E 0 7") == 1);
  CHECK(parse_error_line("N 0 1 1\nN 7 2 2\n\nE 0 8") == 4);
  CHECK(parse_error_line("N 0 1 1\nN 0 2 2") == 2);
  CHECK(parse_error_line("N 0 1") == 1);
  CHECK(parse_error_line("N 0 1 1\nN 1 x 1") == 2);
  CHECK(parse_error_line("N 0 1 1\nE 0 0") == 2);
  CHECK(parse_error_line("N 0 1 1\nQ 1 2") == 2);
  CHECK(parse_error_line("N 0 nan 1") == 1);
  CHECK(parse_error_line("N 0 1 1\nN 1 2 2\nE 0 1 5") == 3);
}

TEST_CASE("graph invariants") {
  GeoGraph g;
  g.add_node(1, {0, 0});
  g.add_node(2, {3, 4});
  CHECK_THROWS_AS(g.add_node(1, {1, 1}), InvalidArgument);
  CHECK(g.add_edge(1, 2));
  CHECK_FALSE(g.add_edge(2, 1));
  CHECK_THROWS_AS(g.add_edge(1, 1), InvalidArgument);
  CHECK_THROWS_AS(g.add_edge(1, 5), InvalidArgument);
  CHECK(g.add_edge(1, 2, {{3, 0}}));
  CHECK(g.edge_count() == 2);
  CHECK(g.edge_length(1) == 7.0);
  CHECK(g.total_length() == 12.0);
  CHECK(g.degrees() == std::vector<std::size_t>{2, 2});
}

TEST_CASE("write then parse reproduces the graph") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> coord(-1e4, 1e4);
  for (int t = 0; t < 20; ++t) {
    GeoGraph g;
    const int n = 2 + int(rng() % 20);
    for (int i = 0; i < n; ++i) g.add_node(NodeId(i * 7 - 30), {coord(rng), coord(rng) / 3.0});
    for (int e = 0; e < n * 2; ++e) {
      const NodeId a = NodeId(rng() % n) * 7 - 30, b = NodeId(rng() % n) * 7 - 30;
      if (a != b) g.add_edge(a, b);
    }
    std::ostringstream out;
    write_graph(out, g);
    const auto back = parse_graph(out.str());
    REQUIRE(back.node_count() == g.node_count());
    for (const auto& node : g.nodes()) CHECK(back.node(node.id).pos == node.pos);
    CHECK(back.edges() == g.edges());
  }
}

TEST_CASE("writer emits nodes in ascending id before edges") {
  GeoGraph g;
  g.add_node(5, {1, 1});
  g.add_node(2, {0, 0});
  g.add_edge(5, 2);
  std::ostringstream out;
  write_graph(out, g);
  CHECK(out.str() == "N 2 0 0\nN 5 1 1\nE 5 2\n");
}

TEST_CASE("flatten keeps geometry") {
  GeoGraph g;
  g.add_node(0, {0, 0});
  g.add_node(1, {4, 0});
  g.add_edge(0, 1, {{1, 0}, {2, 0}, {3, 1}});
  const auto flat = flatten(g);
  // (1,0) lies on the segment (0,0)-(2,0) and is dropped
  CHECK(flat.node_count() == 4);
  CHECK(flat.total_length() == doctest::Approx(g.total_length()).epsilon(1e-12));
  const auto coarse = flatten(g, 2.0);
  CHECK(coarse.node_count() == 2);
  CHECK(coarse.total_length() == 4.0);

  GeoGraph back;
  back.add_node(0, {0, 0});
  back.add_node(1, {2, 0});
  back.add_edge(0, 1, {{4, 0}});
  CHECK(flatten(back).total_length() == 6.0);
}

TEST_CASE("rasterize examples") {
  const auto row = rasterize(parse_graph("N 0 1 1\nN 1 5 1\nE 0 1"), 8, 4);
  for (std::uint32_t y = 0; y < 4; ++y)
    for (std::uint32_t x = 0; x < 8; ++x) CHECK(bool(row(x, y)) == (y == 1 && x >= 1 && x <= 5));
  const auto diag = rasterize(parse_graph("N 0 0 0\nN 1 3 3\nE 0 1"), 4, 4);
  std::size_t set = 0;
  for (std::uint32_t y = 0; y < 4; ++y)
    for (std::uint32_t x = 0; x < 4; ++x) {
      set += diag(x, y);
      if (x == y) CHECK(diag(x, y));
    }
  CHECK(set == 4);
  const auto empty = rasterize(GeoGraph{}, 5, 5);
  CHECK(std::all_of(empty.values().begin(), empty.values().end(), [](auto v) { return v == 0; }));
}

TEST_CASE("rasterize rounds to the nearest pixel and names offending nodes") {
  const auto m = rasterize(parse_graph("N 0 0.6 1.4\nN 1 2.4 1.4\nE 0 1"), 4, 3);
  CHECK(m(1, 1));
  CHECK(m(2, 1));
  CHECK_FALSE(m(0, 1));
  try {
    rasterize(parse_graph("N 0 1 1\nN 42 9 1\nE 0 42"), 8, 8);
    FAIL("expected a rasterize error");
  } catch (const RasterizeError& e) {
    CHECK(e.node_id() == 42);
  }
  CHECK_THROWS_AS(rasterize(parse_graph("N 3 -0.6 0"), 8, 8), RasterizeError);
}

TEST_CASE("bresenham is 8-connected and symmetric in its endpoints") {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 100; ++t) {
    const long long x0 = rng() % 30, y0 = rng() % 30, x1 = rng() % 30, y1 = rng() % 30;
    std::vector<std::pair<long long, long long>> fwd, bwd;
    bresenham(x0, y0, x1, y1, [&](long long x, long long y) { fwd.push_back({x, y}); });
    bresenham(x1, y1, x0, y0, [&](long long x, long long y) { bwd.push_back({x, y}); });
    REQUIRE(fwd.front() == std::make_pair(x0, y0));
    REQUIRE(fwd.back() == std::make_pair(x1, y1));
    CHECK(fwd.size() == std::size_t(std::max(std::llabs(x1 - x0), std::llabs(y1 - y0)) + 1));
    CHECK(bwd.size() == fwd.size());
    for (std::size_t i = 1; i < fwd.size(); ++i) {
      CHECK(std::llabs(fwd[i].first - fwd[i - 1].first) <= 1);
      CHECK(std::llabs(fwd[i].second - fwd[i - 1].second) <= 1);
    }
  }
}

TEST_CASE("ground truth of an empty graph") {
  const auto gt = build_ground_truth(GeoGraph{}, 32, 32);
  CHECK(gt.labels.count == 1);
  for (std::size_t i = 0; i < gt.region.size(); ++i) {
    CHECK(gt.region[i] == 0);
    CHECK(gt.dist[i] == 20.0f);
  }
}

TEST_CASE("a vertical centerline splits the tile into two flanking components") {
  const auto gt = build_ground_truth(parse_graph("N 0 32 0\nN 1 32 63\nE 0 1"), 64, 64);
  CHECK(gt.labels.count == 2);
  for (std::uint32_t y = 0; y < 64; ++y) {
    std::size_t band = 0;
    for (std::uint32_t x = 0; x < 64; ++x) band += gt.region(x, y);
    CHECK(band == 11);
    CHECK(gt.labels.ids(0, y) == 1);
    CHECK(gt.labels.ids(63, y) == 2);
  }
}

TEST_CASE("ground truth invariants on synthetic graphs") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto graph = synthetic::road_lattice(seed, 128, 96);
    const auto centre = rasterize(graph, 128, 96);
    for (int radius : {0, 2, 5}) {
      const auto gt = build_ground_truth(graph, 128, 96, radius);
      for (std::size_t i = 0; i < gt.region.size(); ++i) {
        CHECK((gt.region[i] != 0) != (gt.labels[i] != 0));
        if (centre[i]) CHECK(gt.region[i]);
        CHECK(gt.dist[i] <= gt.dmax);
      }
      for (std::uint32_t y = 0; y < 96; ++y)
        for (std::uint32_t x = 0; x < 128; ++x) {
          const float d = gt.dist(x, y);
          if (x + 1 < 128 && d < gt.dmax && gt.dist(x + 1, y) < gt.dmax)
            CHECK(std::abs(d - gt.dist(x + 1, y)) <= 1.0f);
          if (y + 1 < 96 && d < gt.dmax && gt.dist(x, y + 1) < gt.dmax)
            CHECK(std::abs(d - gt.dist(x, y + 1)) <= 1.0f);
        }
    }
  }
}

TEST_CASE("synthetic lattices end every road on the border") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto g = synthetic::road_lattice(seed, 200, 150);
    const auto deg = g.degrees();
    for (std::size_t i = 0; i < g.node_count(); ++i) {
      const Point p = g.nodes()[i].pos;
      const bool border = p.x == 0 || p.y == 0 || p.x == 199 || p.y == 149;
      CHECK(deg[i] >= 1);
      if (deg[i] == 1) CHECK(border);
    }
  }
}
