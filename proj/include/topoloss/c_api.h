#ifndef TOPOLOSS_C_API_H
#define TOPOLOSS_C_API_H

/* Foreign-function surface for host frameworks: ground truths are
   registered once by id, then batches of predictions go through
   forward/backward with contiguous f32 buffers. All calls are thread-safe;
   the last error message is per thread. */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

enum {
  TL_OK = 0,
  TL_ERR_ARGUMENT = 1,
  TL_ERR_EXTENT = 2,
  TL_ERR_UNKNOWN_GT = 3,
  TL_ERR_STALE_CACHE = 4,
  TL_ERR_PARSE = 5,
  TL_ERR_INTERNAL = 6
};

typedef struct tl_config {
  float alpha;
  float beta;
  uint32_t window;
  int global; /* nonzero: one sweep over the whole image */
  float dmax;
  unsigned threads; /* 0: hardware count */
} tl_config;

/* Defaults used by the command-line `loss`. */
tl_config tl_default_config(void);

/* Builds the ground truth from graph text (same format as graph files). */
int tl_register_gt_graph(int64_t id, const char* graph_text, uint32_t width, uint32_t height,
                         int dilate_radius, float dmax);

/* Ground truth from a precomputed region mask (nonzero = road) and distance
   map, both width*height row-major. */
int tl_register_gt_buffers(int64_t id, const uint8_t* region, const float* dist, uint32_t width,
                           uint32_t height, float dmax);

int tl_unregister_gt(int64_t id);

typedef struct tl_item {
  const float* pred; /* width*height, row-major */
  uint32_t width;
  uint32_t height;
  int64_t gt_id;
} tl_item;

typedef struct tl_loss {
  double mse;
  double dis;
  double conn;
  double total;
} tl_loss;

typedef struct tl_cache tl_cache;

/* Per-item losses into `losses[n]`. On failure `*failed_index` (if given)
   names the offending item and no cache is returned. */
int tl_forward_batch(const tl_item* items, size_t n, const tl_config* cfg, tl_loss* losses,
                     tl_cache** cache, size_t* failed_index);

/* Writes upstream[i] * grad_i into grads[i] (width*height floats each) and
   consumes the cache; a second call on the same cache fails. */
int tl_backward_batch(tl_cache* cache, const float* upstream, float* const* grads);

size_t tl_cache_size(const tl_cache* cache);
void tl_cache_free(tl_cache* cache);

const char* tl_last_error(void);

#ifdef __cplusplus
}
#endif

#endif
