#ifndef GGEVAL_H
#define GGEVAL_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes; the numeric values are stable.
 */
typedef enum GgStatus {
  GG_STATUS_OK = 0,
  /**
   * Bad argument, null pointer or invalid parameter.
   */
  GG_STATUS_INVALID_ARGUMENT = 1,
  /**
   * Malformed or inconsistent input data.
   */
  GG_STATUS_DATA_ERROR = 2,
  /**
   * Numerical failure such as a non-converging eigensolver.
   */
  GG_STATUS_NUMERICAL = 3,
  /**
   * File could not be read or written.
   */
  GG_STATUS_IO = 4,
  /**
   * Model file of an unsupported version.
   */
  GG_STATUS_VERSION = 5,
  /**
   * Internal panic caught at the boundary.
   */
  GG_STATUS_PANIC = 6,
} GgStatus;

/**
 * Opaque row-major embedding matrix.
 */
typedef struct GgEmbedding GgEmbedding;

/**
 * Opaque set of graphs.
 */
typedef struct GgGraphSet GgGraphSet;

/**
 * Opaque trained (or untrained) GIN model.
 */
typedef struct GgModel GgModel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; empty after a success.
 * The pointer stays valid until the next call on the same thread.
 */
const char *ggeval_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ggeval_version(void);

/**
 * # Safety
 * `s` must come from this library or be null.
 */
void ggeval_string_free(char *s);

/**
 * Reads a JSON-lines graph file (`.gz` transparently).
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum GgStatus ggeval_graphset_read(const char *path, struct GgGraphSet **out);

/**
 * # Safety
 * `set` must be a live handle and `path` a NUL-terminated string.
 */
enum GgStatus ggeval_graphset_write(const struct GgGraphSet *set, const char *path);

/**
 * Builds a set from flat arrays: graph `i` has `node_counts[i]` nodes and
 * `edge_counts[i]` edges, taken in order from `edges` as `(u, v)` pairs.
 *
 * # Safety
 * The arrays must hold `graph_count` entries and `2 * sum(edge_counts)`
 * entries respectively.
 */
enum GgStatus ggeval_graphset_from_edges(size_t graph_count,
                                         const size_t *node_counts,
                                         const size_t *edge_counts,
                                         const size_t *edges,
                                         int64_t label,
                                         struct GgGraphSet **out);

/**
 * Number of graphs; 0 for a null handle.
 *
 * # Safety
 * `set` must be a live handle or null.
 */
size_t ggeval_graphset_len(const struct GgGraphSet *set);

/**
 * Node and edge count of graph `index`.
 *
 * # Safety
 * `set` must be a live handle; `nodes` and `edges` valid pointers.
 */
enum GgStatus ggeval_graphset_graph_size(const struct GgGraphSet *set,
                                         size_t index,
                                         size_t *nodes,
                                         size_t *edges);

/**
 * # Safety
 * `set` must come from this library or be null.
 */
void ggeval_graphset_free(struct GgGraphSet *set);

/**
 * Generates one of the named datasets (`BA`, `WS`, `C2L`, `C2S`, `Gr`,
 * `Ld`) at reduced (`large_scale == 0`) or full benchmark size.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a valid pointer.
 */
enum GgStatus ggeval_generate_dataset(const char *name,
                                      int32_t large_scale,
                                      uint64_t seed,
                                      struct GgGraphSet **out);

/**
 * Rewires `fraction` of the edges of every graph.
 *
 * # Safety
 * `set` must be a live handle and `out` a valid pointer.
 */
enum GgStatus ggeval_perturb(const struct GgGraphSet *set,
                             double fraction,
                             uint64_t seed,
                             struct GgGraphSet **out);

/**
 * Degree, clustering, orbit and spectral MMD as a JSON report.
 *
 * # Safety
 * `a` and `b` must be live handles and `json_out` a valid pointer.
 */
enum GgStatus ggeval_mmd_suite(const struct GgGraphSet *a,
                               const struct GgGraphSet *b,
                               double sigma,
                               char **json_out);

/**
 * # Safety
 * `path` must be a NUL-terminated string and `out` a valid pointer.
 */
enum GgStatus ggeval_model_load(const char *path, struct GgModel **out);

/**
 * Width of the model's embeddings; 0 for a null handle.
 *
 * # Safety
 * `model` must be a live handle or null.
 */
size_t ggeval_model_embedding_dim(const struct GgModel *model);

/**
 * # Safety
 * `model` must come from this library or be null.
 */
void ggeval_model_free(struct GgModel *model);

/**
 * # Safety
 * `model` and `set` must be live handles and `out` a valid pointer.
 */
enum GgStatus ggeval_embed(const struct GgModel *model,
                           const struct GgGraphSet *set,
                           uint64_t seed,
                           struct GgEmbedding **out);

/**
 * Copies `rows * cols` row-major values into a new embedding handle.
 *
 * # Safety
 * `data` must hold `rows * cols` values and `out` be a valid pointer.
 */
enum GgStatus ggeval_embedding_from_data(const double *data,
                                         size_t rows,
                                         size_t cols,
                                         struct GgEmbedding **out);

/**
 * # Safety
 * `e` must be a live handle or null.
 */
size_t ggeval_embedding_rows(const struct GgEmbedding *e);

/**
 * # Safety
 * `e` must be a live handle or null.
 */
size_t ggeval_embedding_cols(const struct GgEmbedding *e);

/**
 * Row-major values, valid while the handle lives; null for a null handle.
 *
 * # Safety
 * `e` must be a live handle or null.
 */
const double *ggeval_embedding_data(const struct GgEmbedding *e);

/**
 * # Safety
 * `e` must come from this library or be null.
 */
void ggeval_embedding_free(struct GgEmbedding *e);

/**
 * Fréchet distance between the Gaussian summaries of two embedding sets.
 *
 * # Safety
 * `a` and `b` must be live handles; `raw` and `clamped` valid pointers.
 */
enum GgStatus ggeval_frechet_distance(const struct GgEmbedding *a,
                                      const struct GgEmbedding *b,
                                      double *raw,
                                      double *clamped);

/**
 * FD (clamped and raw), precision, recall, density, coverage and both F1
 * scores as JSON.
 *
 * # Safety
 * `real` and `gen` must be live handles and `json_out` a valid pointer.
 */
enum GgStatus ggeval_eval_embed(const struct GgEmbedding *real,
                                const struct GgEmbedding *gen,
                                size_t k,
                                char **json_out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GGEVAL_H */
