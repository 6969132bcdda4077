#ifndef GIBBSSAT_H
#define GIBBSSAT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible entry point.
 */
typedef enum GsStatus {
  GS_STATUS_OK = 0,
  GS_STATUS_NULL_POINTER = 1,
  GS_STATUS_INVALID_ARGUMENT = 2,
  GS_STATUS_PARSE = 3,
  GS_STATUS_TOO_LARGE = 4,
  GS_STATUS_IO = 5,
  GS_STATUS_INTERNAL = 6,
} GsStatus;

/**
 * Decision procedure for [`gs_solve`].
 */
typedef enum GsSolver {
  /**
   * Implication graph for width 2, DPLL otherwise.
   */
  GS_SOLVER_AUTO = 0,
  GS_SOLVER_TWO_SAT = 1,
  GS_SOLVER_DPLL = 2,
} GsSolver;

/**
 * Opaque CNF formula.
 */
typedef struct GsFormula GsFormula;

/**
 * Opaque energy histogram.
 */
typedef struct GsHistogram GsHistogram;

typedef struct GsWorkStats {
  uint64_t decisions;
  uint64_t propagations;
  uint64_t conflicts;
  double wall_time_secs;
} GsWorkStats;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or null if the last
 * call succeeded. Valid until the next call into this library on the same
 * thread.
 */
const char *gs_last_error_message(void);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void gs_string_free(char *s);

/**
 * Random k-SAT instance with `n_clauses` clauses over `n_vars` variables.
 *
 * # Safety
 * `out` must be a valid pointer to write a handle to.
 */
enum GsStatus gs_formula_generate(size_t n_vars,
                                  size_t n_clauses,
                                  size_t k,
                                  uint64_t seed,
                                  struct GsFormula **out);

/**
 * Parses DIMACS CNF text of `len` bytes.
 *
 * # Safety
 * `data` must point to `len` readable bytes; `out` must be writable.
 */
enum GsStatus gs_formula_parse_dimacs(const uint8_t *data, size_t len, struct GsFormula **out);

/**
 * # Safety
 * `formula` must be null or a handle from this library, not yet freed.
 */
void gs_formula_free(struct GsFormula *formula);

/**
 * DIMACS text of `formula`; free with [`gs_string_free`].
 *
 * # Safety
 * `formula` must be a live handle; `out` must be writable.
 */
enum GsStatus gs_formula_to_dimacs(const struct GsFormula *formula, char **out);

/**
 * # Safety
 * `formula` must be null or a live handle. Returns 0 for null.
 */
size_t gs_formula_n_vars(const struct GsFormula *formula);

/**
 * # Safety
 * `formula` must be null or a live handle. Returns 0 for null.
 */
size_t gs_formula_n_clauses(const struct GsFormula *formula);

/**
 * # Safety
 * `formula` must be null or a live handle. Returns 0 for null.
 */
size_t gs_formula_k(const struct GsFormula *formula);

/**
 * Number of clauses violated by an assignment given as `len` bytes, one per
 * variable, non-zero meaning true.
 *
 * # Safety
 * `values` must point to `len` readable bytes; `out_violated` must be writable.
 */
enum GsStatus gs_formula_evaluate(const struct GsFormula *formula,
                                  const uint8_t *values,
                                  size_t len,
                                  size_t *out_violated);

/**
 * Decides satisfiability.
 *
 * `witness` may be null. Otherwise it must hold `n_vars` bytes and receives
 * a satisfying assignment (1 = true) when one exists. `stats` may be null.
 *
 * # Safety
 * Pointers must be valid as described above.
 */
enum GsStatus gs_solve(const struct GsFormula *formula,
                       enum GsSolver solver,
                       bool *out_satisfiable,
                       uint8_t *witness,
                       struct GsWorkStats *stats);

/**
 * Minimum violated-clause count and the number of assignments attaining it,
 * by exhaustive search over at most `2^limit` assignments.
 *
 * # Safety
 * `formula` must be a live handle; out-pointers must be writable.
 */
enum GsStatus gs_max_sat_bruteforce(const struct GsFormula *formula,
                                    size_t limit,
                                    size_t *out_lambda_min,
                                    uint64_t *out_degeneracy);

/**
 * Ising Hamiltonian of `formula` as JSON; free with [`gs_string_free`].
 *
 * # Safety
 * `formula` must be a live handle; `out` must be writable.
 */
enum GsStatus gs_embed_json(const struct GsFormula *formula, char **out);

/**
 * Exact energy histogram of `formula`, refusing more than `limit` variables.
 *
 * # Safety
 * `formula` must be a live handle; `out` must be writable.
 */
enum GsStatus gs_histogram_enumerate(const struct GsFormula *formula,
                                     size_t limit,
                                     struct GsHistogram **out);

/**
 * Reads a histogram from its JSON form.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum GsStatus gs_histogram_from_json(const char *json, struct GsHistogram **out);

/**
 * # Safety
 * `hist` must be null or a handle from this library, not yet freed.
 */
void gs_histogram_free(struct GsHistogram *hist);

/**
 * # Safety
 * `hist` must be a live handle; `out` must be writable.
 */
enum GsStatus gs_histogram_to_json(const struct GsHistogram *hist, char **out);

/**
 * # Safety
 * `hist` must be null or a live handle. Returns 0 for null.
 */
size_t gs_histogram_lambda_min(const struct GsHistogram *hist);

/**
 * # Safety
 * `hist` must be null or a live handle. Returns 0 for null.
 */
uint64_t gs_histogram_degeneracy(const struct GsHistogram *hist);

/**
 * Configurations at energy `level`.
 *
 * # Safety
 * `hist` must be null or a live handle. Returns 0 for null.
 */
uint64_t gs_histogram_count(const struct GsHistogram *hist, size_t level);

/**
 * Gibbs probability of the ground level at inverse temperature `beta`.
 *
 * # Safety
 * `hist` must be a live handle; `out` must be writable.
 */
enum GsStatus gs_ground_occupancy(const struct GsHistogram *hist, double beta, double *out);

/**
 * Smallest inverse temperature whose ground occupancy reaches `threshold`,
 * located to within `tol`.
 *
 * # Safety
 * `hist` must be a live handle; `out` must be writable.
 */
enum GsStatus gs_min_beta(const struct GsHistogram *hist,
                          double threshold,
                          double tol,
                          double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GIBBSSAT_H */
