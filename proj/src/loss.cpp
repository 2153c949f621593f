#include "topoloss/loss.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <random>
#include <thread>
#include <vector>

namespace topoloss {

void LossConfig::validate() const {
  if (!(alpha >= 0.0f) || !std::isfinite(alpha)) throw InvalidArgument("alpha must be >= 0");
  if (!(beta >= 0.0f) || !std::isfinite(beta)) throw InvalidArgument("beta must be >= 0");
  if (window < 2) throw InvalidArgument("window must be >= 2");
  if (!(dmax > 0.0f) || !std::isfinite(dmax)) throw InvalidArgument("dmax must be > 0");
}

TermResult loss_mse(const ScalarGrid& pred, const ScalarGrid& target) {
  require_same_extent(pred, target, "mse: extent mismatch");
  TermResult r{0.0, ScalarGrid(pred.width(), pred.height())};
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = double(pred[i]) - target[i];
    r.value += d * d;
    r.grad[i] = static_cast<float>(2.0 * d);
  }
  return r;
}

TermResult loss_dis(const ScalarGrid& pred, const PairWeights& weights) {
  require_same_extent(pred, weights.w, "dis: extent mismatch");
  TermResult r{0.0, ScalarGrid(pred.width(), pred.height())};
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (weights.w[i] == 0) continue;
    const double w = static_cast<double>(weights.w[i]);
    r.value += w * pred[i] * pred[i];
    r.grad[i] = static_cast<float>(2.0 * w * pred[i]);
  }
  return r;
}

TermResult loss_conn(const ScalarGrid& pred, const ScalarGrid& target, const PairWeights& weights) {
  require_same_extent(pred, target, "conn: extent mismatch");
  require_same_extent(pred, weights.v, "conn: extent mismatch");
  TermResult r{0.0, ScalarGrid(pred.width(), pred.height())};
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (weights.v[i] == 0) continue;
    const double v = static_cast<double>(weights.v[i]);
    const double d = double(pred[i]) - target[i];
    r.value += v * d * d;
    r.grad[i] = static_cast<float>(2.0 * v * d);
  }
  return r;
}

namespace {

void check_loss_inputs(const ScalarGrid& pred, const GroundTruth& gt, const LossConfig& cfg) {
  cfg.validate();
  require_same_extent(pred, gt.dist, "loss: prediction/ground-truth extent mismatch");
  require_same_extent(pred, gt.region, "loss: prediction/region extent mismatch");
  require_same_extent(pred, gt.labels.ids, "loss: prediction/label extent mismatch");
  for (float v : pred.values())
    if (!std::isfinite(v)) throw InvalidArgument("loss: prediction contains non-finite values");
}

ScalarGrid capped_target(const GroundTruth& gt, float dmax) {
  ScalarGrid t = gt.dist;
  for (auto& v : t.values()) v = std::min(v, dmax);
  return t;
}

void scatter(const Grid<std::int64_t>& src, const WindowSpec& win, Grid<std::int64_t>& dst) {
  for (std::uint32_t y = 0; y < win.h; ++y)
    for (std::uint32_t x = 0; x < win.w; ++x) dst(win.x0 + x, win.y0 + y) = src(x, y);
}

}  // namespace

PairWeights loss_pair_weights(const ScalarGrid& pred, const GroundTruth& gt,
                              const LossConfig& cfg) {
  check_loss_inputs(pred, gt, cfg);
  if (cfg.mode == LossMode::global) return compute_loss_pair_weights(pred, gt.labels, gt.region);

  PairWeights out{Grid<std::int64_t>(pred.width(), pred.height(), 0),
                  Grid<std::int64_t>(pred.width(), pred.height(), 0)};
  const auto windows = tile(pred.width(), pred.height(), cfg.window);
  // Tiles are disjoint, so workers write to disjoint pixels of `out`.
  auto run_window = [&](const WindowSpec& win) {
    const auto local = compute_loss_pair_weights(crop(pred, win), crop(gt.labels, win),
                                                 crop(gt.region, win));
    scatter(local.w, win, out.w);
    scatter(local.v, win, out.v);
  };

  unsigned workers = cfg.threads == 0 ? std::max(1u, std::thread::hardware_concurrency())
                                      : cfg.threads;
  workers = std::min<unsigned>(workers, static_cast<unsigned>(windows.size()));
  if (workers <= 1) {
    for (const auto& win : windows) run_window(win);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (unsigned t = 0; t < workers; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t i = next++; i < windows.size(); i = next++) run_window(windows[i]);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  pool.clear();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

LossBreakdown total_loss(const ScalarGrid& pred, const GroundTruth& gt, const LossConfig& cfg) {
  const PairWeights weights = loss_pair_weights(pred, gt, cfg);
  const ScalarGrid target = capped_target(gt, cfg.dmax);
  const double alpha = cfg.alpha;
  const double beta = cfg.beta;

  LossBreakdown out;
  out.grad = ScalarGrid(pred.width(), pred.height());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double p = pred[i];
    const double d = p - target[i];
    const double w = static_cast<double>(weights.w[i]);
    const double v = static_cast<double>(weights.v[i]);
    out.mse += d * d;
    out.dis += w * p * p;
    out.conn += v * d * d;
    out.grad[i] = static_cast<float>(2.0 * d + alpha * (2.0 * w * p + beta * 2.0 * v * d));
  }
  out.total = out.mse + alpha * (out.dis + beta * out.conn);
  return out;
}

GradCheckReport grad_check(const ScalarGrid& pred, const GroundTruth& gt, const LossConfig& cfg,
                           float eps, std::size_t samples, std::uint64_t seed) {
  if (!(eps > 0.0f)) throw InvalidArgument("grad_check: eps must be > 0");
  const LossBreakdown base = total_loss(pred, gt, cfg);

  const auto windows = cfg.mode == LossMode::global
                           ? std::vector<WindowSpec>{{0, 0, pred.width(), pred.height()}}
                           : tile(pred.width(), pred.height(), cfg.window);
  const double sep = 10.0 * eps;
  std::vector<std::size_t> eligible;
  for (const auto& win : windows) {
    std::vector<std::pair<float, std::size_t>> vals;
    vals.reserve(win.area());
    for (std::uint32_t y = 0; y < win.h; ++y)
      for (std::uint32_t x = 0; x < win.w; ++x) {
        const std::size_t i = pred.index(win.x0 + x, win.y0 + y);
        vals.push_back({pred[i], i});
      }
    std::sort(vals.begin(), vals.end());
    for (std::size_t k = 0; k < vals.size(); ++k) {
      const bool left_ok = k == 0 || double(vals[k].first) - vals[k - 1].first > sep;
      const bool right_ok =
          k + 1 == vals.size() || double(vals[k + 1].first) - vals[k].first > sep;
      if (left_ok && right_ok) eligible.push_back(vals[k].second);
    }
  }
  std::sort(eligible.begin(), eligible.end());
  std::mt19937_64 rng(seed);
  std::shuffle(eligible.begin(), eligible.end(), rng);
  eligible.resize(std::min(samples, eligible.size()));

  GradCheckReport report;
  ScalarGrid probe = pred;
  for (std::size_t i : eligible) {
    const float x = pred[i];
    const float up = x + eps;
    const float down = x - eps;
    probe[i] = up;
    const double l_up = total_loss(probe, gt, cfg).total;
    probe[i] = down;
    const double l_down = total_loss(probe, gt, cfg).total;
    probe[i] = x;
    // divide by the step actually taken after float rounding
    const double numeric = (l_up - l_down) / (double(up) - double(down));
    const double analytic = base.grad[i];
    const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
    const double rel = std::abs(analytic - numeric) / scale;
    if (rel > report.max_rel_err || report.checked == 0) {
      report.max_rel_err = std::max(report.max_rel_err, rel);
      report.worst_pixel = i;
      report.worst_analytic = analytic;
      report.worst_numeric = numeric;
    }
    ++report.checked;
  }
  return report;
}

}  // namespace topoloss
