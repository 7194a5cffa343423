#ifndef ENSEMBLE_CAVITY_H
#define ENSEMBLE_CAVITY_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define ECAV_DEFAULT_ABS_TOL 1e-10

#define ECAV_DEFAULT_REL_TOL 1e-9

#define ECAV_DEFAULT_THRESHOLD 1e-4

typedef enum {
  ECAV_STATUS_OK = 0,
  ECAV_STATUS_NULL_POINTER = 1,
  ECAV_STATUS_INVALID_ARGUMENT = 2,
  ECAV_STATUS_NUMERIC = 3,
  ECAV_STATUS_IO = 4,
  ECAV_STATUS_OUT_OF_RANGE = 5,
  ECAV_STATUS_PANIC = 6,
} EcavStatus;

/**
 * Result of a single-scenario run.
 */
typedef struct EcavSimulation EcavSimulation;

/**
 * Sign matrix over all configurations.
 */
typedef struct EcavTable EcavTable;

/**
 * Model parameters, field for field.
 */
typedef struct {
  double delta_a;
  double delta_b;
  double delta_c;
  double g_a;
  double g_b;
  double chi;
  double gamma_a;
  double gamma_b;
  double gamma_c;
  double n_a;
  double n_b;
  double n_c;
} EcavParams;

/**
 * One cell of the sign matrix. `config` indexes AA, AN, NA, NN in that order.
 */
typedef struct {
  uint32_t config;
  double chi;
  bool tick;
  double min;
  double argmin;
} EcavTableCell;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread. Returns the message
 * length; 0 when the last call succeeded.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t ecav_last_error(char *buf, size_t len);

/**
 * Parameters of the preset `label` ("AA", "AN", "NA" or "NN") with drive `chi`.
 *
 * # Safety
 * `label` must be a NUL-terminated string and `out` a valid pointer.
 */
EcavStatus ecav_preset_params(const char *label, double chi, EcavParams *out_params);

/**
 * Checks finiteness and sign constraints.
 *
 * # Safety
 * `params` must be a valid pointer.
 */
EcavStatus ecav_validate_params(const EcavParams *params);

/**
 * Integrates one scenario from occupations `init_n[0..3]` and evaluates
 * every witness at `samples` evenly spaced times in [0, t_max].
 *
 * # Safety
 * `params` must be valid, `init_n` must point to three doubles and `out_sim`
 * must be writable.
 */
EcavStatus ecav_simulate(const EcavParams *params,
                         const double *init_n,
                         double t_max,
                         size_t samples,
                         double abs_tol,
                         double rel_tol,
                         EcavSimulation **out_sim);

/**
 * Number of samples; 0 for a null handle.
 *
 * # Safety
 * `sim` must be null or a live handle.
 */
size_t ecav_simulation_len(const EcavSimulation *sim);

/**
 * # Safety
 * `sim` must be a live handle and `out_t` writable.
 */
EcavStatus ecav_simulation_time(const EcavSimulation *sim, size_t k, double *out_t);

/**
 * Moment `moment` (see [`ecav_moment_name`]) at sample `k`.
 *
 * # Safety
 * `sim` must be a live handle; `out_re` and `out_im` writable.
 */
EcavStatus ecav_simulation_moment(const EcavSimulation *sim,
                                  size_t k,
                                  size_t moment,
                                  double *out_re,
                                  double *out_im);

/**
 * Witness column `column` (see [`ecav_witness_column_name`]) at sample `k`.
 * Undefined values come back as NaN.
 *
 * # Safety
 * `sim` must be a live handle and `out_value` writable.
 */
EcavStatus ecav_simulation_witness(const EcavSimulation *sim,
                                   size_t k,
                                   size_t column,
                                   double *out_value);

/**
 * Writes the moment trajectory (`moments` true) or every witness column as CSV.
 *
 * # Safety
 * `sim` must be a live handle and `path` a NUL-terminated string.
 */
EcavStatus ecav_simulation_write_csv(const EcavSimulation *sim, const char *path, bool moments);

/**
 * # Safety
 * `sim` must be null or a handle from [`ecav_simulate`] not yet freed.
 */
void ecav_simulation_free(EcavSimulation *sim);

size_t ecav_moment_count(void);

/**
 * Name of moment `index`; returns its length, or 0 when out of range.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t ecav_moment_name(size_t index, char *buf, size_t len);

size_t ecav_witness_column_count(void);

/**
 * Name of witness column `index`; returns its length, or 0 when out of range.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t ecav_witness_column_name(size_t index, char *buf, size_t len);

/**
 * Sign matrix for every configuration at chi = 0 and 0.2.
 *
 * # Safety
 * `out_table` must be writable.
 */
EcavStatus ecav_table(double t_max,
                      size_t samples,
                      double threshold,
                      double init_n,
                      EcavTable **out_table);

/**
 * Number of cells; 0 for a null handle.
 *
 * # Safety
 * `table` must be null or a live handle.
 */
size_t ecav_table_len(const EcavTable *table);

/**
 * # Safety
 * `table` must be a live handle and `out_cell` writable.
 */
EcavStatus ecav_table_cell(const EcavTable *table, size_t i, EcavTableCell *out_cell);

/**
 * Witness label of cell `i` (for example `steering_AB`); returns its
 * length, or 0 when out of range.
 *
 * # Safety
 * `table` must be a live handle; `buf` null or `len` writable bytes.
 */
size_t ecav_table_cell_label(const EcavTable *table, size_t i, char *buf, size_t len);

/**
 * # Safety
 * `table` must be a live handle and `path` a NUL-terminated string.
 */
EcavStatus ecav_table_write_csv(const EcavTable *table, const char *path);

/**
 * # Safety
 * `table` must be null or a handle from [`ecav_table`] not yet freed.
 */
void ecav_table_free(EcavTable *table);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ENSEMBLE_CAVITY_H */
