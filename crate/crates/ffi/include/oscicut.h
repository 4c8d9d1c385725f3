#ifndef OSCICUT_H
#define OSCICUT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  OSCICUT_SOLVER_SL = 0,
  OSCICUT_SOLVER_BRUTE = 1,
} OscicutSolver;

typedef enum {
  OSCICUT_STATUS_OK = 0,
  OSCICUT_STATUS_NULL_POINTER = 1,
  OSCICUT_STATUS_INVALID_ARGUMENT = 2,
  OSCICUT_STATUS_UNSUPPORTED_K = 3,
  OSCICUT_STATUS_TOO_LARGE = 4,
  OSCICUT_STATUS_NOT_CONVERGED = 5,
  OSCICUT_STATUS_IO = 6,
  OSCICUT_STATUS_PARSE = 7,
  OSCICUT_STATUS_PANIC = 8,
} OscicutStatus;

/**
 * Opaque weighted graph.
 */
typedef struct OscicutGraph OscicutGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next failing call on the same thread.
 */
const char *oscicut_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *oscicut_version(void);

/**
 * Edgeless graph on `n` vertices.
 *
 * # Safety
 * `out` must be valid for one pointer write.
 */
OscicutStatus oscicut_graph_new(size_t n, OscicutGraph **out);

/**
 * The five-vertex house graph.
 *
 * # Safety
 * `out` must be valid for one pointer write.
 */
OscicutStatus oscicut_graph_house(OscicutGraph **out);

/**
 * Complete graph with standard normal weights, seeded.
 *
 * # Safety
 * `out` must be valid for one pointer write.
 */
OscicutStatus oscicut_graph_random(size_t n, uint64_t seed, OscicutGraph **out);

/**
 * Parses a graph from JSON or edge-list text.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` valid for one pointer write.
 */
OscicutStatus oscicut_graph_parse(const char *text, OscicutGraph **out);

/**
 * Releases a graph. Null is ignored.
 *
 * # Safety
 * `g` must come from this library and not be used afterwards.
 */
void oscicut_graph_free(OscicutGraph *g);

/**
 * Vertex count, or 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a live handle.
 */
size_t oscicut_graph_n(const OscicutGraph *g);

/**
 * # Safety
 * `g` must be a live handle.
 */
OscicutStatus oscicut_graph_set_weight(OscicutGraph *g, size_t i, size_t j, double w);

/**
 * # Safety
 * `g` must be a live handle; `out` valid for one write.
 */
OscicutStatus oscicut_graph_weight(const OscicutGraph *g, size_t i, size_t j, double *out);

/**
 * Weight of the cut given by `labels` (length `n`, values below `k`).
 *
 * # Safety
 * `labels` must hold `n` bytes; `out` valid for one write.
 */
OscicutStatus oscicut_cut_weight(const OscicutGraph *g,
                                 size_t k,
                                 const uint8_t *labels,
                                 size_t n,
                                 double *out);

/**
 * Exact maximum and minimum nontrivial k-cut by enumeration. `argmax` may
 * be null; otherwise it receives `n` labels.
 *
 * # Safety
 * Output pointers must be valid; `argmax` null or `n` bytes.
 */
OscicutStatus oscicut_brute_force(const OscicutGraph *g,
                                  size_t k,
                                  double *max_weight,
                                  double *min_weight,
                                  uint8_t *argmax);

/**
 * Bins `phases` (length `n`) over `boundaries` uniform rotations and
 * returns the heaviest cut.
 *
 * # Safety
 * `phases` must hold `n` doubles; `labels` null or `n` bytes.
 */
OscicutStatus oscicut_best_cut(const OscicutGraph *g,
                               const double *phases,
                               size_t n,
                               size_t k,
                               size_t boundaries,
                               double *weight,
                               uint8_t *labels);

/**
 * Max-k-cut with the oscillator annealer (`runs` seeds from `seed`, rounded
 * over `boundaries` uniform rotations) or exactly.
 *
 * # Safety
 * `weight` valid for one write; `labels` null or `n` bytes.
 */
OscicutStatus oscicut_solve(const OscicutGraph *g,
                            OscicutSolver solver,
                            size_t k,
                            size_t boundaries,
                            size_t runs,
                            uint64_t seed,
                            double *weight,
                            uint8_t *labels);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* OSCICUT_H */
