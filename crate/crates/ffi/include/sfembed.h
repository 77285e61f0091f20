#ifndef SFEMBED_H
#define SFEMBED_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Outcome of a call.
 */
typedef enum {
  SF_STATUS_OK = 0,
  SF_STATUS_NULL_POINTER = 1,
  SF_STATUS_INVALID_ARGUMENT = 2,
  SF_STATUS_IO = 3,
  SF_STATUS_PARSE = 4,
  SF_STATUS_EMPTY_GRAPH = 5,
  SF_STATUS_DIMENSION_MISMATCH = 6,
  SF_STATUS_ZERO_ROW_SUM = 7,
  SF_STATUS_DISCONNECTED = 8,
  SF_STATUS_NO_CONVERGENCE = 9,
  SF_STATUS_UNFITTABLE = 10,
  SF_STATUS_INSUFFICIENT_DATA = 11,
  SF_STATUS_UNKNOWN_LABEL = 12,
  SF_STATUS_PANIC = 13,
} SfStatus;

/**
 * Opaque embedding handle; rows follow the dense vertex order of the graph
 * it was computed from.
 */
typedef struct SfEmbedding SfEmbedding;

/**
 * Opaque graph handle.
 */
typedef struct SfGraph SfGraph;

/**
 * Options for walk-based embeddings.
 */
typedef struct {
  size_t dim;
  double beta;
  size_t walks_per_vertex;
  size_t walk_length;
  size_t window;
  size_t epochs;
  uint64_t seed;
  /**
   * Uniform neighbor walks instead of degree-penalized ones.
   */
  bool uniform_walks;
  /**
   * Single-threaded, reproducible training.
   */
  bool deterministic;
  size_t workers;
} SfWalkerOptions;

/**
 * Best row of an ε sweep.
 */
typedef struct {
  double epsilon;
  /**
   * False when every reconstructed degree sequence was constant; the
   * correlations are then NaN.
   */
  bool defined;
  double pearson;
  double spearman;
  double kendall;
  size_t edge_count;
} SfSweepBest;

typedef struct {
  double alpha;
  size_t d_min;
  double ks;
  size_t n_tail;
  double norm_const;
} SfPowerLawFit;

/**
 * Sphere-packing bounds, as base-2 logarithms.
 */
typedef struct {
  size_t k;
  double lower_log2;
  double upper_log2;
  double lower_density_log2;
  double upper_density_log2;
  bool upper_valid;
} SfBounds;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. Valid until the
 * next failing call on the same thread.
 */
const char *sf_last_error(void);

/**
 * Loads a whitespace-separated edge list.
 *
 * # Safety
 * `path` must be a nul-terminated string and `out` writable.
 */
SfStatus sf_graph_load(const char *path, SfGraph **out);

/**
 * Builds a graph from `count` edges `(a[i], b[i])` of vertex labels.
 *
 * # Safety
 * `a` and `b` must point to `count` values and `out` be writable.
 */
SfStatus sf_graph_from_edges(const uint64_t *a, const uint64_t *b, size_t count, SfGraph **out);

/**
 * Preferential-attachment graph with `n` vertices, `m` edges per arrival.
 *
 * # Safety
 * `out` must be writable.
 */
SfStatus sf_graph_generate(size_t n, size_t m, uint64_t seed, SfGraph **out);

/**
 * # Safety
 * `g` must come from this library and not be used afterwards.
 */
void sf_graph_free(SfGraph *g);

/**
 * # Safety
 * `g` must be a live handle.
 */
size_t sf_graph_num_vertices(const SfGraph *g);

/**
 * # Safety
 * `g` must be a live handle.
 */
size_t sf_graph_num_edges(const SfGraph *g);

/**
 * Copies labels and degrees in dense vertex order; either buffer may be
 * NULL, and each must otherwise hold `len ≥ n` entries.
 *
 * # Safety
 * Non-null buffers must be writable for `len` elements.
 */
SfStatus sf_graph_vertices(const SfGraph *g, uint64_t *labels, size_t *degrees, size_t len);

/**
 * Spectral embedding; `baseline` selects the unpenalized adjacency
 * weights (and ignores `beta`).
 *
 * # Safety
 * `g` must be a live handle and `out` writable.
 */
SfStatus sf_embed_spectral(const SfGraph *g,
                           size_t dim,
                           double beta,
                           bool baseline,
                           uint64_t seed,
                           double tol,
                           SfEmbedding **out);

/**
 * Walk-based embedding.
 *
 * # Safety
 * `g` and `opts` must be valid pointers and `out` writable.
 */
SfStatus sf_embed_walker(const SfGraph *g, const SfWalkerOptions *opts, SfEmbedding **out);

/**
 * Default walker options.
 */
SfWalkerOptions sf_walker_options_default(void);

/**
 * # Safety
 * `e` must come from this library and not be used afterwards.
 */
void sf_embedding_free(SfEmbedding *e);

/**
 * # Safety
 * `e` must be a live handle; `n` and `k` writable or NULL.
 */
SfStatus sf_embedding_shape(const SfEmbedding *e, size_t *n, size_t *k);

/**
 * Copies the row-major `n × k` matrix into `buf` (at least `n·k` values).
 *
 * # Safety
 * `buf` must be writable for `len` doubles.
 */
SfStatus sf_embedding_copy(const SfEmbedding *e, double *buf, size_t len);

/**
 * Writes the embedding in the text format, labelling rows with `g`.
 *
 * # Safety
 * Handles must be live and `path` nul-terminated.
 */
SfStatus sf_embedding_write(const SfEmbedding *e, const SfGraph *g, const char *path);

/**
 * Reconstructed degrees at threshold `epsilon` into `degrees` (`len ≥ n`).
 *
 * # Safety
 * `degrees` must be writable for `len` elements.
 */
SfStatus sf_reconstruct_degrees(const SfEmbedding *e, double epsilon, size_t *degrees, size_t len);

/**
 * Sweeps ε from `start` to `end` by `step`, comparing with the degrees of
 * `g`, and reports the row of highest Pearson correlation.
 *
 * # Safety
 * Handles must be live and `out` writable.
 */
SfStatus sf_sweep(const SfEmbedding *e,
                  const SfGraph *g,
                  double start,
                  double end,
                  double step,
                  SfSweepBest *out);

/**
 * Fits a power law to `len` positive degrees.
 *
 * # Safety
 * `degrees` must point to `len` values and `out` be writable.
 */
SfStatus sf_fit_power_law(const size_t *degrees, size_t len, SfPowerLawFit *out);

/**
 * # Safety
 * `out` must be writable.
 */
SfStatus sf_sphere_bounds(size_t k, SfBounds *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SFEMBED_H */
