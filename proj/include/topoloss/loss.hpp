#pragma once

#include <cstddef>
#include <cstdint>

#include "topoloss/annotation.hpp"
#include "topoloss/grid.hpp"
#include "topoloss/pair_weights.hpp"

namespace topoloss {

enum class LossMode { windowed, global };

struct LossConfig {
  float alpha = 1e-4f;
  float beta = 0.1f;
  std::uint32_t window = 64;
  LossMode mode = LossMode::windowed;
  float dmax = kDefaultDmax;
  // Worker threads for the windowed sweep; 0 picks the hardware count.
  unsigned threads = 1;

  void validate() const;
};

struct TermResult {
  double value = 0.0;
  ScalarGrid grad;
};

/// Loss values are kept in double; gradients are single precision.
struct LossBreakdown {
  double mse = 0.0;
  double dis = 0.0;
  double conn = 0.0;
  double total = 0.0;
  ScalarGrid grad;
};

/// sum (pred - target)^2, gradient 2 (pred - target).
TermResult loss_mse(const ScalarGrid& pred, const ScalarGrid& target);

/// sum w[p] pred[p]^2 with w held constant.
TermResult loss_dis(const ScalarGrid& pred, const PairWeights& weights);

/// sum v[p] (pred[p] - target[p])^2 with v held constant.
TermResult loss_conn(const ScalarGrid& pred, const ScalarGrid& target, const PairWeights& weights);

/// Full-extent pair weights under the configured mode. In windowed mode each
/// tile is swept on its own, with background labels recomputed inside it.
PairWeights loss_pair_weights(const ScalarGrid& pred, const GroundTruth& gt,
                              const LossConfig& cfg);

/// mse + alpha * (dis + beta * conn), with the matching gradient.
LossBreakdown total_loss(const ScalarGrid& pred, const GroundTruth& gt, const LossConfig& cfg);

struct GradCheckReport {
  double max_rel_err = 0.0;
  std::size_t checked = 0;
  std::size_t worst_pixel = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
};

/// Compares the analytic gradient of `total_loss` with central differences
/// at up to `samples` pixels. Only pixels whose value is more than 10*eps
/// away from every other value in their window are eligible, so the sweep
/// order (and hence the pair weights) stays fixed under the perturbation.
GradCheckReport grad_check(const ScalarGrid& pred, const GroundTruth& gt, const LossConfig& cfg,
                           float eps, std::size_t samples, std::uint64_t seed);

}  // namespace topoloss
