#include "topoloss/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace topoloss::synthetic {

namespace {

std::vector<double> spaced_positions(std::mt19937_64& rng, std::uint32_t extent, int wanted) {
  const double lo = 20.0;
  const double hi = static_cast<double>(extent) - 21.0;
  const int fit = std::max(1, static_cast<int>((hi - lo) / 30.0) + 1);
  const int count = std::min(wanted, fit);
  std::uniform_real_distribution<double> pos(lo, std::max(lo, hi));
  for (int attempt = 0; attempt < 1000; ++attempt) {
    std::vector<double> xs(count);
    for (auto& x : xs) x = std::round(pos(rng));
    std::sort(xs.begin(), xs.end());
    bool ok = true;
    for (int i = 1; i < count; ++i) ok = ok && xs[i] - xs[i - 1] >= 30.0;
    if (ok) return xs;
  }
  // evenly spaced fallback
  std::vector<double> xs(count);
  for (int i = 0; i < count; ++i) xs[i] = std::round(lo + (hi - lo) * (i + 0.5) / count);
  return xs;
}

}  // namespace

GeoGraph road_lattice(std::uint64_t seed, std::uint32_t width, std::uint32_t height) {
  std::mt19937_64 rng(seed ^ 0xD1B54A32D192ED03ULL);
  std::uniform_int_distribution<int> count(1, 3);
  std::uniform_real_distribution<double> jitter(-4.0, 4.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto xs = spaced_positions(rng, width, count(rng));
  const auto ys = spaced_positions(rng, height, count(rng));
  const int nv = static_cast<int>(xs.size());
  const int nh = static_cast<int>(ys.size());
  const double right = width - 1.0;
  const double bottom = height - 1.0;

  GeoGraph g;
  auto lattice = [nh](int i, int j) { return NodeId{i} * nh + j; };
  for (int i = 0; i < nv; ++i)
    for (int j = 0; j < nh; ++j)
      g.add_node(lattice(i, j), {std::round(xs[i] + jitter(rng)), std::round(ys[j] + jitter(rng))});
  NodeId next = NodeId{nv} * nh;
  std::vector<NodeId> top(nv), low(nv), left(nh), rightn(nh);
  for (int i = 0; i < nv; ++i) {
    g.add_node(top[i] = next++, {std::round(xs[i] + jitter(rng)), 0.0});
    g.add_node(low[i] = next++, {std::round(xs[i] + jitter(rng)), bottom});
  }
  for (int j = 0; j < nh; ++j) {
    g.add_node(left[j] = next++, {0.0, std::round(ys[j] + jitter(rng))});
    g.add_node(rightn[j] = next++, {right, std::round(ys[j] + jitter(rng))});
  }

  std::vector<std::pair<NodeId, NodeId>> interior;
  for (int i = 0; i < nv; ++i) {
    g.add_edge(top[i], lattice(i, 0));
    for (int j = 0; j + 1 < nh; ++j) interior.push_back({lattice(i, j), lattice(i, j + 1)});
    g.add_edge(lattice(i, nh - 1), low[i]);
  }
  for (int j = 0; j < nh; ++j) {
    g.add_edge(left[j], lattice(0, j));
    for (int i = 0; i + 1 < nv; ++i) interior.push_back({lattice(i, j), lattice(i + 1, j)});
    g.add_edge(lattice(nv - 1, j), rightn[j]);
  }
  // drop interior segments only while both ends keep degree >= 2, so no
  // road ends inside the image
  std::vector<int> degree(static_cast<std::size_t>(next), 0);
  auto bump = [&](NodeId a, NodeId b) {
    ++degree[static_cast<std::size_t>(a)];
    ++degree[static_cast<std::size_t>(b)];
  };
  for (const auto& e : g.edges()) bump(e.a, e.b);
  for (const auto& [a, b] : interior) bump(a, b);
  for (const auto& [a, b] : interior) {
    if (unit(rng) < 0.25 && degree[static_cast<std::size_t>(a)] > 2 &&
        degree[static_cast<std::size_t>(b)] > 2) {
      --degree[static_cast<std::size_t>(a)];
      --degree[static_cast<std::size_t>(b)];
      continue;
    }
    g.add_edge(a, b);
  }
  return g;
}

GeoGraph regular_grid(std::uint32_t width, std::uint32_t height, int count) {
  GeoGraph g;
  std::vector<double> xs(count), ys(count);
  for (int i = 0; i < count; ++i) {
    xs[i] = std::round((i + 0.5) * width / count);
    ys[i] = std::round((i + 0.5) * height / count);
  }
  auto lattice = [count](int i, int j) { return NodeId{i} * count + j; };
  for (int i = 0; i < count; ++i)
    for (int j = 0; j < count; ++j) g.add_node(lattice(i, j), {xs[i], ys[j]});
  NodeId next = NodeId{count} * count;
  for (int i = 0; i < count; ++i) {
    const NodeId t = next++, b = next++;
    g.add_node(t, {xs[i], 0.0});
    g.add_node(b, {xs[i], height - 1.0});
    g.add_edge(t, lattice(i, 0));
    for (int j = 0; j + 1 < count; ++j) g.add_edge(lattice(i, j), lattice(i, j + 1));
    g.add_edge(lattice(i, count - 1), b);
  }
  for (int j = 0; j < count; ++j) {
    const NodeId l = next++, r = next++;
    g.add_node(l, {0.0, ys[j]});
    g.add_node(r, {width - 1.0, ys[j]});
    g.add_edge(l, lattice(0, j));
    for (int i = 0; i + 1 < count; ++i) g.add_edge(lattice(i, j), lattice(i + 1, j));
    g.add_edge(lattice(count - 1, j), r);
  }
  return g;
}

GeoGraph border_polyline(std::uint64_t seed, std::uint32_t width, std::uint32_t height) {
  std::mt19937_64 rng(seed ^ 0x2545F4914F6CDD1DULL);
  std::uniform_int_distribution<int> side(0, 3);
  const double w1 = width - 1.0, h1 = height - 1.0;
  auto on_side = [&](int s) {
    std::uniform_real_distribution<double> t(0.0, 1.0);
    const double u = t(rng);
    switch (s) {
      case 0: return Point{std::round(u * w1), 0.0};
      case 1: return Point{w1, std::round(u * h1)};
      case 2: return Point{std::round(u * w1), h1};
      default: return Point{0.0, std::round(u * h1)};
    }
  };
  const int sa = side(rng);
  int sb = side(rng);
  while (sb == sa) sb = side(rng);
  std::uniform_real_distribution<double> mid_x(width * 0.25, width * 0.75);
  std::uniform_real_distribution<double> mid_y(height * 0.25, height * 0.75);
  GeoGraph g;
  g.add_node(0, on_side(sa));
  g.add_node(1, {std::round(mid_x(rng)), std::round(mid_y(rng))});
  g.add_node(2, on_side(sb));
  g.add_edge(0, 1);
  g.add_edge(1, 2);
  return g;
}

}  // namespace topoloss::synthetic
