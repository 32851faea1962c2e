#ifndef GREENSTREAM_H
#define GREENSTREAM_H

/* Generated by cbindgen from the greenstream-ffi crate. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GsAlgorithm {
  GS_ALGORITHM_HT = 0,
  GS_ALGORITHM_EFDT = 1,
  GS_ALGORITHM_GAHT = 2,
  GS_ALGORITHM_OZA_BAG = 3,
  GS_ALGORITHM_OZA_BOOST = 4,
} GsAlgorithm;

/**
 * Result code of every fallible call.
 */
typedef enum GsStatus {
  GS_STATUS_OK = 0,
  GS_STATUS_NULL_POINTER = 1,
  GS_STATUS_INVALID_ARGUMENT = 2,
  GS_STATUS_SCHEMA_MISMATCH = 3,
  GS_STATUS_IO = 4,
  GS_STATUS_PARSE = 5,
  GS_STATUS_VERSION_MISMATCH = 6,
  GS_STATUS_CORRUPT = 7,
  /**
   * A finite stream has no more examples.
   */
  GS_STATUS_EXHAUSTED = 8,
  GS_STATUS_BUFFER_TOO_SMALL = 9,
  GS_STATUS_PANIC = 10,
} GsStatus;

/**
 * Opaque learner handle.
 */
typedef struct GsLearner GsLearner;

/**
 * Opaque stream handle.
 */
typedef struct GsStream GsStream;

/**
 * Learner hyperparameters; start from [`gs_learner_config_default`].
 */
typedef struct GsLearnerConfig {
  enum GsAlgorithm algorithm;
  /**
   * Ensemble member type, `GS_ALGORITHM_HT` or `GS_ALGORITHM_GAHT`.
   */
  enum GsAlgorithm base_learner;
  size_t members;
  uint64_t nmin;
  double delta;
  double tau;
  double deactivate_threshold;
  double grow_fast_threshold;
  uint64_t seed;
} GsLearnerConfig;

typedef struct GsSchemaInfo {
  size_t attribute_count;
  size_t class_count;
} GsSchemaInfo;

typedef struct GsCounters {
  uint64_t split_evaluations;
  uint64_t gain_computations;
  uint64_t observer_updates;
  uint64_t traversal_steps;
  uint64_t instances_processed;
  uint64_t proxy_energy;
} GsCounters;

typedef struct GsCensus {
  uint64_t total_nodes;
  uint64_t split_nodes;
  uint64_t active_leaves;
  uint64_t inactive_leaves;
  uint64_t fast_nodes;
  uint64_t estimated_bytes;
} GsCensus;

typedef struct GsRunSummary {
  uint64_t instances_seen;
  double accuracy;
  /**
   * Nonzero when the stream ended before the limit.
   */
  uint8_t truncated;
} GsRunSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *gs_last_error_message(void);

struct GsLearnerConfig gs_learner_config_default(enum GsAlgorithm algorithm);

/**
 * Creates a learner for a schema given as per-attribute value counts, where
 * 0 marks a numeric attribute.
 *
 * # Safety
 * `value_counts` must point to `attribute_count` readable values and `out`
 * must be writable.
 */
enum GsStatus gs_learner_new(const uint32_t *value_counts,
                             size_t attribute_count,
                             uint32_t class_count,
                             const struct GsLearnerConfig *config,
                             struct GsLearner **out);

/**
 * Creates a learner matching a stream's schema.
 *
 * # Safety
 * `stream` must be a live handle and `out` writable.
 */
enum GsStatus gs_learner_new_for_stream(const struct GsStream *stream,
                                        const struct GsLearnerConfig *config,
                                        struct GsLearner **out);

/**
 * # Safety
 * `learner` must come from this library and not be used afterwards.
 */
void gs_learner_free(struct GsLearner *learner);

/**
 * # Safety
 * `values` must point to `len` readable doubles.
 */
enum GsStatus gs_learner_train(struct GsLearner *learner,
                               const double *values,
                               size_t len,
                               uint32_t label,
                               double weight);

/**
 * Writes per-class votes into `votes` (capacity `votes_len`, at least the
 * class count) and the predicted class into `class_out` when non-null.
 *
 * # Safety
 * Pointers must be valid for the stated lengths.
 */
enum GsStatus gs_learner_predict(const struct GsLearner *learner,
                                 const double *values,
                                 size_t len,
                                 double *votes,
                                 size_t votes_len,
                                 uint32_t *class_out);

/**
 * # Safety
 * `out` must be writable.
 */
enum GsStatus gs_learner_schema(const struct GsLearner *learner, struct GsSchemaInfo *out);

/**
 * # Safety
 * `out` must be writable.
 */
enum GsStatus gs_learner_counters(const struct GsLearner *learner, struct GsCounters *out);

/**
 * # Safety
 * `out` must be writable.
 */
enum GsStatus gs_learner_census(const struct GsLearner *learner, struct GsCensus *out);

/**
 * # Safety
 * `path` must be a NUL-terminated UTF-8 string.
 */
enum GsStatus gs_learner_save(const struct GsLearner *learner, const char *path);

/**
 * # Safety
 * `path` must be a NUL-terminated UTF-8 string and `out` writable.
 */
enum GsStatus gs_learner_load(const char *path, struct GsLearner **out);

/**
 * Opens a synthetic generator by name, e.g. `"led"` or `"randomtree"`.
 *
 * # Safety
 * `name` must be a NUL-terminated UTF-8 string and `out` writable.
 */
enum GsStatus gs_stream_synthetic(const char *name, uint64_t seed, struct GsStream **out);

/**
 * Loads an ARFF or CSV file; a negative `class_index` selects the last column.
 *
 * # Safety
 * `path` must be a NUL-terminated UTF-8 string and `out` writable.
 */
enum GsStatus gs_stream_open_file(const char *path, int64_t class_index, struct GsStream **out);

/**
 * # Safety
 * `stream` must come from this library and not be used afterwards.
 */
void gs_stream_free(struct GsStream *stream);

/**
 * # Safety
 * `out` must be writable.
 */
enum GsStatus gs_stream_schema(const struct GsStream *stream, struct GsSchemaInfo *out);

/**
 * Draws the next example into `values` (capacity `len`) and `label`.
 * Returns `GS_STATUS_EXHAUSTED` once a finite stream ends.
 *
 * # Safety
 * `values` must hold `len` writable doubles and `label` be writable.
 */
enum GsStatus gs_stream_next(struct GsStream *stream, double *values, size_t len, uint32_t *label);

/**
 * Test-then-train for up to `limit` examples of `stream`.
 *
 * # Safety
 * Handles must be live and `out` writable.
 */
enum GsStatus gs_run_prequential(struct GsLearner *learner,
                                 struct GsStream *stream,
                                 uint64_t limit,
                                 uint64_t snapshot_every,
                                 struct GsRunSummary *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GREENSTREAM_H */
