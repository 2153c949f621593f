#include "topoloss/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace topoloss {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Lower envelope of parabolas (Felzenszwalb & Huttenlocher). `f` holds
// squared distances sampled at 0..n-1, possibly +inf; result goes to `d`.
// Infinite samples never enter the envelope, so all arithmetic stays on
// exact small integers.
void squared_dt_1d(std::span<const double> f, std::span<double> d, std::vector<int>& v,
                   std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  v.assign(n, 0);
  z.assign(n + 1, 0.0);
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (f[q] == kInf) continue;
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -kInf;
      z[1] = kInf;
      continue;
    }
    double s = 0.0;
    // z[0] is -inf, so the scan stops at k == 0 at the latest
    while (true) {
      const int p = v[k];
      s = ((f[q] + double(q) * q) - (f[p] + double(p) * p)) / (2.0 * q - 2.0 * p);
      if (s > z[k]) break;
      --k;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  if (k < 0) {
    std::fill(d.begin(), d.end(), kInf);
    return;
  }
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[j + 1] < q) ++j;
    const double dq = double(q) - v[j];
    d[q] = dq * dq + f[v[j]];
  }
}

}  // namespace

std::vector<double> squared_distance_transform(const BinaryMask& mask) {
  const std::uint32_t w = mask.width();
  const std::uint32_t h = mask.height();
  std::vector<double> out(mask.size(), kInf);
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) out[i] = 0.0;

  std::vector<int> v;
  std::vector<double> z;
  std::vector<double> f(h), d(h);
  for (std::uint32_t x = 0; x < w; ++x) {
    for (std::uint32_t y = 0; y < h; ++y) f[y] = out[std::size_t{y} * w + x];
    squared_dt_1d(f, d, v, z);
    for (std::uint32_t y = 0; y < h; ++y) out[std::size_t{y} * w + x] = d[y];
  }
  std::vector<double> row(w), rd(w);
  for (std::uint32_t y = 0; y < h; ++y) {
    std::copy_n(out.begin() + std::size_t{y} * w, w, row.begin());
    squared_dt_1d(row, rd, v, z);
    std::copy(rd.begin(), rd.end(), out.begin() + std::size_t{y} * w);
  }
  return out;
}

ScalarGrid distance_transform(const BinaryMask& mask) {
  const auto sq = squared_distance_transform(mask);
  const float sentinel = static_cast<float>(mask.width()) + static_cast<float>(mask.height());
  ScalarGrid out(mask.width(), mask.height());
  for (std::size_t i = 0; i < sq.size(); ++i)
    out[i] = sq[i] == kInf ? sentinel : static_cast<float>(std::sqrt(sq[i]));
  return out;
}

BinaryMask dilate(const BinaryMask& mask, int radius) {
  if (radius < 0) throw InvalidArgument("dilation radius must be >= 0");
  if (radius == 0) return mask;
  const auto sq = squared_distance_transform(mask);
  const double r2 = double(radius) * radius;
  BinaryMask out(mask.width(), mask.height());
  for (std::size_t i = 0; i < sq.size(); ++i) out[i] = sq[i] <= r2 ? 1 : 0;
  return out;
}

LabelGrid connected_components(const BinaryMask& mask, Connectivity connectivity) {
  const int w = static_cast<int>(mask.width());
  const int h = static_cast<int>(mask.height());
  LabelGrid out{Grid<std::int32_t>(mask.width(), mask.height(), 0), 0};

  static constexpr int dx8[] = {1, -1, 0, 0, 1, 1, -1, -1};
  static constexpr int dy8[] = {0, 0, 1, -1, 1, -1, 1, -1};
  const int nbrs = connectivity == Connectivity::four ? 4 : 8;

  std::vector<std::size_t> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t start = std::size_t(y) * w + x;
      if (!mask[start] || out.ids[start] != 0) continue;
      const std::int32_t label = ++out.count;
      out.ids[start] = label;
      stack.push_back(start);
      while (!stack.empty()) {
        const std::size_t cur = stack.back();
        stack.pop_back();
        const int cx = static_cast<int>(cur % w);
        const int cy = static_cast<int>(cur / w);
        for (int k = 0; k < nbrs; ++k) {
          const int nx = cx + dx8[k];
          const int ny = cy + dy8[k];
          if (nx < 0 || ny < 0 || nx >= w || ny >= h) continue;
          const std::size_t ni = std::size_t(ny) * w + nx;
          if (mask[ni] && out.ids[ni] == 0) {
            out.ids[ni] = label;
            stack.push_back(ni);
          }
        }
      }
    }
  }
  return out;
}

std::vector<WindowSpec> tile(std::uint32_t width, std::uint32_t height, std::uint32_t win) {
  if (win < 2) throw InvalidArgument("window size must be >= 2");
  std::vector<WindowSpec> out;
  for (std::uint32_t y = 0; y < height; y += win)
    for (std::uint32_t x = 0; x < width; x += win)
      out.push_back({x, y, std::min(win, width - x), std::min(win, height - y)});
  return out;
}

namespace detail {
void check_window(std::uint32_t width, std::uint32_t height, const WindowSpec& win) {
  if (std::uint64_t{win.x0} + win.w > width || std::uint64_t{win.y0} + win.h > height)
    throw InvalidWindow("window " + std::to_string(win.w) + "x" + std::to_string(win.h) + "+" +
                        std::to_string(win.x0) + "+" + std::to_string(win.y0) +
                        " exceeds grid " + std::to_string(width) + "x" +
                        std::to_string(height));
}
}  // namespace detail

LabelGrid crop(const LabelGrid& labels, const WindowSpec& win) {
  const auto ids = crop(labels.ids, win);
  BinaryMask labelled(win.w, win.h);
  for (std::size_t i = 0; i < ids.size(); ++i) labelled[i] = ids[i] > 0 ? 1 : 0;
  return connected_components(labelled, Connectivity::four);
}

BinaryMask complement(const BinaryMask& mask) {
  BinaryMask out(mask.width(), mask.height());
  for (std::size_t i = 0; i < mask.size(); ++i) out[i] = mask[i] ? 0 : 1;
  return out;
}

}  // namespace topoloss
