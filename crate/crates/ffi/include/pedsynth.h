#ifndef PEDSYNTH_H
#define PEDSYNTH_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PsExhaustion {
  PS_EXHAUSTION_CLAMP = 0,
  PS_EXHAUSTION_DROP = 1,
} PsExhaustion;

/**
 * Result codes.
 */
typedef enum PsStatus {
  PS_STATUS_OK = 0,
  PS_STATUS_NULL_POINTER = 1,
  PS_STATUS_INVALID_UTF8 = 2,
  PS_STATUS_PARSE = 3,
  PS_STATUS_STRUCTURE = 4,
  PS_STATUS_DOMAIN = 5,
  PS_STATUS_NUMERICAL = 6,
  PS_STATUS_IO = 7,
  PS_STATUS_PANIC = 8,
} PsStatus;

/**
 * Parsed annotation data.
 */
typedef struct PsDataset PsDataset;

typedef struct PsStatistics {
  size_t num_pedestrians;
  double mu_p;
  double sigma_p;
  double sigma_s;
} PsStatistics;

typedef struct PsSamplerConfig {
  size_t timesteps;
  size_t reps;
  double dt;
  double radius;
  double p_reverse;
  double trunc_max_fraction;
  uint64_t seed;
  int32_t zero_sigma_s;
  int32_t zero_sigma_p;
  enum PsExhaustion exhaustion;
  /**
   * Generate until this many frames exist; 0 uses `reps`.
   */
  size_t target_frames;
  uint64_t frame_stride;
  /**
   * 0 uses every core.
   */
  size_t threads;
} PsSamplerConfig;

typedef struct PsPredictorConfig {
  size_t observe_len;
  size_t horizon;
  size_t num_samples;
  double noise_scale;
  uint64_t seed;
} PsPredictorConfig;

typedef struct PsMetrics {
  double ade;
  double mde;
  double fde;
  size_t num_pedestrians;
  size_t horizon;
  size_t num_samples;
  size_t excluded;
} PsMetrics;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Owned by the
 * library and valid until the next call on the same thread.
 */
const char *ps_last_error_message(void);

/**
 * Releases a string returned by the library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void ps_string_free(char *s);

/**
 * Parses annotation text (`frame ped x y` per line).
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum PsStatus ps_dataset_parse(const char *text, double dt, struct PsDataset **out);

/**
 * # Safety
 * `dataset` must come from this library and not have been freed.
 */
void ps_dataset_free(struct PsDataset *dataset);

/**
 * # Safety
 * Pointers must be valid.
 */
enum PsStatus ps_dataset_num_pedestrians(const struct PsDataset *dataset, size_t *out);

/**
 * # Safety
 * Pointers must be valid.
 */
enum PsStatus ps_dataset_num_frames(const struct PsDataset *dataset, size_t *out);

/**
 * Writes the dataset in canonical text form. Free the result with
 * `ps_string_free`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum PsStatus ps_dataset_to_string(const struct PsDataset *dataset, char **out);

/**
 * Scene statistics. With `global_speed_variance` non-zero, the speed
 * spread is taken over all step speeds instead of within pedestrians.
 *
 * # Safety
 * Pointers must be valid.
 */
enum PsStatus ps_compute_statistics(const struct PsDataset *dataset,
                                    int32_t global_speed_variance,
                                    struct PsStatistics *out);

struct PsSamplerConfig ps_sampler_config_default(void);

/**
 * Generates a synthetic dataset from the statistics and paths of `real`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum PsStatus ps_generate(const struct PsDataset *real,
                          const struct PsSamplerConfig *config,
                          struct PsDataset **out);

struct PsPredictorConfig ps_predictor_config_default(void);

/**
 * Runs the constant-velocity baseline and returns predictions as text
 * (`frame ped sample x y` per line). Free with `ps_string_free`.
 *
 * # Safety
 * Pointers must be valid.
 */
enum PsStatus ps_predict_baseline(const struct PsDataset *dataset,
                                  const struct PsPredictorConfig *config,
                                  char **out);

/**
 * Scores prediction text against ground truth. If `curve` is non-null, the
 * first `min(curve_len, num_samples)` entries of the quantile curve are
 * written to it.
 *
 * # Safety
 * Pointers must be valid; `curve` must hold `curve_len` doubles.
 */
enum PsStatus ps_evaluate(const struct PsDataset *truth,
                          const char *predictions,
                          struct PsMetrics *out,
                          double *curve,
                          size_t curve_len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PEDSYNTH_H */
