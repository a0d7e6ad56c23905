/* C interface for the linkpred temporal link prediction toolkit. */

#ifndef LINKPRED_H
#define LINKPRED_H

/* Generated by cbindgen from linkpred-capi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Metric aggregation across transitions for `lp_run_sweep`.
 */
typedef enum LpAggregate {
  /*
   Use whatever the config file declares.
   */
  LP_AGGREGATE_CONFIG = 0,
  LP_AGGREGATE_MEAN = 1,
  LP_AGGREGATE_POOLED = 2,
} LpAggregate;

/*
 Status code returned by every fallible function.
 */
typedef enum LpStatus {
  LP_OK = 0,
  /*
   File could not be read or written.
   */
  LP_ERR_IO = 1,
  /*
   Malformed input file or dataset format.
   */
  LP_ERR_PARSE = 2,
  /*
   Invalid parameter, configuration or index.
   */
  LP_ERR_INVALID = 3,
  /*
   An operation produced or received an empty result set.
   */
  LP_ERR_EMPTY = 4,
  /*
   A requested metric is undefined on the given pools.
   */
  LP_ERR_METRIC = 5,
  /*
   A required pointer argument was null or not valid UTF-8.
   */
  LP_ERR_NULL = 6,
  /*
   Internal failure.
   */
  LP_ERR_INTERNAL = 7,
} LpStatus;

/*
 Opaque dataset handle.
 */
typedef struct LpDataset LpDataset;

/*
 Opaque score map handle.
 */
typedef struct LpScores LpScores;

/*
 Predictor parameters for `lp_predict` and `lp_augmented_friendship`.
 */
typedef struct LpPredictorParams {
  /*
   EWMA smoothing weight in (0,1].
   */
  double lambda;
  /*
   Katz decay in (0,1).
   */
  double beta;
  /*
   Katz series truncation length, at least 1.
   */
  uint32_t max_length;
  /*
   Block count for the block-model predictor.
   */
  uint32_t blocks;
  /*
   Weight on the block score against the smoothed adjacency, in [0,1].
   */
  double mix;
  /*
   Seed for the block-model clustering.
   */
  uint64_t seed;
} LpPredictorParams;

/*
 Evaluation result for one transition.
 */
typedef struct LpEvalReport {
  double prauc_new;
  double auc_prev;
  double gmauc;
  uint64_t p_new;
  uint64_t n_new;
  uint64_t p_prev;
  uint64_t n_prev;
} LpEvalReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Library version as a static NUL-terminated string.
 */
const char *lp_version(void);

/*
 Message for the most recent error on this thread, or null if none.
 */
const char *lp_last_error(void);

/*
 Defaults matching the toolkit's configuration defaults.
 */
struct LpPredictorParams lp_default_params(void);

/*
 Ingest raw friendship and interaction edge files.

 # Safety
 String arguments must be valid NUL-terminated paths; `out` must be a
 valid location to store the new handle.
 */
enum LpStatus lp_dataset_ingest(const char *friend_file,
                                const char *interaction_file,
                                int64_t start,
                                int64_t end,
                                int64_t interval_secs,
                                struct LpDataset **out);

/*
 Load a serialized dataset file.

 # Safety
 See `lp_dataset_ingest`.
 */
enum LpStatus lp_dataset_load(const char *path, struct LpDataset **out);

/*
 Save a dataset to the versioned text format.

 # Safety
 `ds` must be a live handle; `path` a valid NUL-terminated string.
 */
enum LpStatus lp_dataset_save(const struct LpDataset *ds, const char *path);

/*
 Generate a synthetic coupled dataset.

 # Safety
 `out` must be a valid location to store the new handle.
 */
enum LpStatus lp_dataset_synthetic(uint32_t nodes,
                                   uint32_t snapshots,
                                   uint32_t friendship_growth,
                                   double q_friend,
                                   double q_nonfriend,
                                   double persistence_boost,
                                   uint64_t seed,
                                   struct LpDataset **out);

/*
 Keep only nodes with aggregate friendship degree >= threshold,
 producing a new dataset handle.

 # Safety
 `ds` must be a live handle; `out` a valid store location.
 */
enum LpStatus lp_dataset_filter_degree(const struct LpDataset *ds,
                                       uint32_t threshold,
                                       struct LpDataset **out);

/*
 # Safety
 `ds` must be a live handle or null.
 */
uint32_t lp_dataset_node_count(const struct LpDataset *ds);

/*
 # Safety
 `ds` must be a live handle or null.
 */
uint32_t lp_dataset_snapshot_count(const struct LpDataset *ds);

/*
 Original identifier of a node; release with `lp_string_free`.

 # Safety
 `ds` must be a live handle.
 */
char *lp_dataset_node_name(const struct LpDataset *ds, uint32_t id);

/*
 Fraction of friend pairs at `t` that interact at `t + 1`.

 # Safety
 `ds` must be a live handle; `out` a valid f64 location.
 */
enum LpStatus lp_fraction_friends_interacting(const struct LpDataset *ds, uint32_t t, double *out);

/*
 Fraction of interactions at `t + 1` occurring between friends at `t`.

 # Safety
 `ds` must be a live handle; `out` a valid f64 location.
 */
enum LpStatus lp_fraction_interactions_between_friends(const struct LpDataset *ds,
                                                       uint32_t t,
                                                       double *out);

/*
 Score interactions at `t + 1` with one of the dynamic predictors
 ("ewma", "ts_aa", "ts_katz", "dsbm"). AA/Katz-family outputs are
 normalized onto [0,1].

 # Safety
 Pointer arguments must be valid; `out` receives a new handle.
 */
enum LpStatus lp_predict(const struct LpDataset *ds,
                         const char *predictor,
                         uint32_t t,
                         const struct LpPredictorParams *params,
                         struct LpScores **out);

/*
 Augmented friendship matrix at time `t`: edges stay 1, zeros are
 replaced by normalized AA (`use_katz = false`) or Katz scores.

 # Safety
 Pointer arguments must be valid; `out` receives a new handle.
 */
enum LpStatus lp_augmented_friendship(const struct LpDataset *ds,
                                      uint32_t t,
                                      bool use_katz,
                                      const struct LpPredictorParams *params,
                                      struct LpScores **out);

/*
 Convex combination with the binary current-friendship matrix at `t`.

 # Safety
 Handles must be live; `out` receives a new handle.
 */
enum LpStatus lp_fuse_current(const struct LpScores *scores,
                              const struct LpDataset *ds,
                              uint32_t t,
                              double alpha,
                              struct LpScores **out);

/*
 Convex combination with an augmented friendship matrix.

 # Safety
 Handles must be live; `out` receives a new handle.
 */
enum LpStatus lp_fuse_predicted(const struct LpScores *scores,
                                const struct LpScores *augmented,
                                double alpha,
                                struct LpScores **out);

/*
 Evaluate a score map against the interactions at `t + 1`.

 # Safety
 Handles must be live; `report` must be a valid store location.
 */
enum LpStatus lp_evaluate(const struct LpScores *scores,
                          const struct LpDataset *ds,
                          uint32_t t,
                          struct LpEvalReport *report);

/*
 Number of stored (nonzero) pair scores.

 # Safety
 `scores` must be a live handle or null.
 */
uint64_t lp_scores_len(const struct LpScores *scores);

/*
 Score of the unordered pair (u, v); 0 when unscored. Returns NaN for
 an invalid pair.

 # Safety
 `scores` must be a live handle or null.
 */
double lp_scores_get(const struct LpScores *scores, uint32_t u, uint32_t v);

/*
 Write the `u v score` export of a score map.

 # Safety
 `scores` must be a live handle; `path` a valid NUL-terminated string.
 */
enum LpStatus lp_scores_export(const struct LpScores *scores, const char *path);

/*
 Run a full sweep from a config file, writing results.csv, summary.md,
 fractions.csv and run_meta.toml. Null overrides keep the config's
 values; `override_seed = false` keeps the config's seed.

 # Safety
 `config_path` must be valid; `out_dir` may be null.
 */
enum LpStatus lp_run_sweep(const char *config_path,
                           const char *out_dir,
                           uint64_t seed,
                           bool override_seed,
                           enum LpAggregate aggregate);

/*
 # Safety
 `ds` must be a handle obtained from this library, or null.
 */
void lp_dataset_free(struct LpDataset *ds);

/*
 # Safety
 `scores` must be a handle obtained from this library, or null.
 */
void lp_scores_free(struct LpScores *scores);

/*
 # Safety
 `s` must come from a string-returning function of this library.
 */
void lp_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LINKPRED_H */
