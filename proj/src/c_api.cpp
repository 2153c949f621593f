#include "topoloss/c_api.h"

#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <vector>

#include "topoloss/annotation.hpp"
#include "topoloss/error.hpp"
#include "topoloss/geo_graph.hpp"
#include "topoloss/loss.hpp"

struct tl_cache {
  std::vector<topoloss::ScalarGrid> grads;
  bool consumed = false;
};

namespace {

using topoloss::GroundTruth;

std::shared_mutex registry_mutex;
std::map<std::int64_t, std::shared_ptr<const GroundTruth>> registry;
thread_local std::string last_error;

int fail(int code, std::string what) {
  last_error = std::move(what);
  return code;
}

template <typename F>
int guarded(F&& body) {
  try {
    last_error.clear();
    return body();
  } catch (const topoloss::ExtentMismatch& e) {
    return fail(TL_ERR_EXTENT, e.what());
  } catch (const topoloss::ParseError& e) {
    return fail(TL_ERR_PARSE, e.what());
  } catch (const topoloss::Error& e) {
    return fail(TL_ERR_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(TL_ERR_INTERNAL, e.what());
  }
}

void store(std::int64_t id, GroundTruth gt) {
  auto ptr = std::make_shared<const GroundTruth>(std::move(gt));
  std::unique_lock lock(registry_mutex);
  registry[id] = std::move(ptr);
}

std::shared_ptr<const GroundTruth> lookup(std::int64_t id) {
  std::shared_lock lock(registry_mutex);
  auto it = registry.find(id);
  return it == registry.end() ? nullptr : it->second;
}

topoloss::LossConfig to_config(const tl_config& c) {
  topoloss::LossConfig cfg;
  cfg.alpha = c.alpha;
  cfg.beta = c.beta;
  cfg.window = c.window;
  cfg.mode = c.global ? topoloss::LossMode::global : topoloss::LossMode::windowed;
  cfg.dmax = c.dmax;
  cfg.threads = c.threads;
  cfg.validate();
  return cfg;
}

}  // namespace

extern "C" {

tl_config tl_default_config(void) {
  const topoloss::LossConfig d;
  return {d.alpha, d.beta, d.window, 0, d.dmax, 0};
}

int tl_register_gt_graph(int64_t id, const char* graph_text, uint32_t width, uint32_t height,
                         int dilate_radius, float dmax) {
  return guarded([&]() -> int {
    if (!graph_text) return fail(TL_ERR_ARGUMENT, "null graph text");
    const auto graph = topoloss::parse_graph(std::string_view(graph_text));
    store(id, topoloss::build_ground_truth(graph, width, height, dilate_radius, dmax));
    return TL_OK;
  });
}

int tl_register_gt_buffers(int64_t id, const uint8_t* region, const float* dist, uint32_t width,
                           uint32_t height, float dmax) {
  return guarded([&]() -> int {
    if (!region || !dist) return fail(TL_ERR_ARGUMENT, "null buffer");
    const std::size_t n = std::size_t{width} * height;
    GroundTruth gt;
    gt.region = topoloss::BinaryMask(width, height);
    for (std::size_t i = 0; i < n; ++i) gt.region[i] = region[i] != 0;
    gt.dist = topoloss::ScalarGrid(width, height, std::vector<float>(dist, dist + n));
    gt.labels = topoloss::connected_components(topoloss::complement(gt.region),
                                               topoloss::Connectivity::four);
    gt.dmax = dmax;
    store(id, std::move(gt));
    return TL_OK;
  });
}

int tl_unregister_gt(int64_t id) {
  std::unique_lock lock(registry_mutex);
  if (registry.erase(id) == 0) return fail(TL_ERR_UNKNOWN_GT, "unknown ground truth id");
  return TL_OK;
}

int tl_forward_batch(const tl_item* items, size_t n, const tl_config* cfg, tl_loss* losses,
                     tl_cache** cache, size_t* failed_index) {
  if (cache) *cache = nullptr;
  if ((n > 0 && (!items || !losses)) || !cache) return fail(TL_ERR_ARGUMENT, "null argument");
  std::size_t i = 0;
  auto out = std::make_unique<tl_cache>();
  const int status = guarded([&]() -> int {
    const auto config = to_config(cfg ? *cfg : tl_default_config());
    for (; i < n; ++i) {
      const auto gt = lookup(items[i].gt_id);
      if (!gt) return fail(TL_ERR_UNKNOWN_GT, "unknown ground truth id");
      if (!items[i].pred) return fail(TL_ERR_ARGUMENT, "null prediction");
      if (items[i].width != gt->width() || items[i].height != gt->height())
        return fail(TL_ERR_EXTENT, "prediction extent differs from its ground truth");
      const std::size_t len = std::size_t{items[i].width} * items[i].height;
      const topoloss::ScalarGrid pred(items[i].width, items[i].height,
                                      std::vector<float>(items[i].pred, items[i].pred + len));
      auto r = topoloss::total_loss(pred, *gt, config);
      losses[i] = {r.mse, r.dis, r.conn, r.total};
      out->grads.push_back(std::move(r.grad));
    }
    return TL_OK;
  });
  if (status != TL_OK) {
    if (failed_index) *failed_index = i;
    last_error = "item " + std::to_string(i) + ": " + last_error;
    return status;
  }
  *cache = out.release();
  return TL_OK;
}

int tl_backward_batch(tl_cache* cache, const float* upstream, float* const* grads) {
  if (!cache) return fail(TL_ERR_ARGUMENT, "null cache");
  if (cache->consumed) return fail(TL_ERR_STALE_CACHE, "cache already consumed");
  if (!cache->grads.empty() && (!upstream || !grads)) return fail(TL_ERR_ARGUMENT, "null argument");
  for (std::size_t i = 0; i < cache->grads.size(); ++i) {
    if (!grads[i]) return fail(TL_ERR_ARGUMENT, "null gradient buffer");
    const auto g = cache->grads[i].values();
    for (std::size_t k = 0; k < g.size(); ++k) grads[i][k] = upstream[i] * g[k];
  }
  cache->consumed = true;
  cache->grads.clear();
  return TL_OK;
}

size_t tl_cache_size(const tl_cache* cache) { return cache ? cache->grads.size() : 0; }

void tl_cache_free(tl_cache* cache) { delete cache; }

const char* tl_last_error(void) { return last_error.c_str(); }

}  // extern "C"
