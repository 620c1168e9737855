#ifndef MARKOV_ELIM_H
#define MARKOV_ELIM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result code of every fallible call.
 */
typedef enum MeStatus {
  ME_STATUS_OK = 0,
  ME_STATUS_NULL_POINTER = 1,
  ME_STATUS_INVALID_ARGUMENT = 2,
  ME_STATUS_NOT_HERMITIAN = 3,
  ME_STATUS_NO_CONVERGENCE = 4,
  ME_STATUS_SINGULAR_BLOCK = 5,
  ME_STATUS_NOT_POSITIVE_DEFINITE = 6,
  ME_STATUS_DIMENSION_MISMATCH = 7,
  ME_STATUS_NON_FINITE = 8,
  ME_STATUS_INVALID_SCENARIO = 9,
  ME_STATUS_UNSUPPORTED_ORDER = 10,
  ME_STATUS_SEARCH_FAILED = 11,
  ME_STATUS_INVALID_STATE = 12,
  ME_STATUS_INVALID_GRID = 13,
  ME_STATUS_BUFFER_TOO_SMALL = 14,
  ME_STATUS_PANIC = 15,
} MeStatus;

/*
 Truncation order of the effective Hamiltonian.
 */
typedef enum MeOrder {
  ME_ORDER_MARKOV0 = 0,
  ME_ORDER_MARKOV1 = 1,
  ME_ORDER_MARKOV1_DRESSED = 2,
} MeOrder;

/*
 How the picture shift is chosen. `Fixed` uses the `fixed_shift` argument.
 */
typedef enum MeCondition {
  ME_CONDITION_TRACE_ZERO = 0,
  ME_CONDITION_MIN_OP_NORM = 1,
  ME_CONDITION_MIN_TRACE_NORM = 2,
  ME_CONDITION_FIXED = 3,
} MeCondition;

/*
 An effective Hamiltonian on the relevant states.
 */
typedef struct MeModel MeModel;

/*
 A Hamiltonian with labels and a relevant/irrelevant split.
 */
typedef struct MeScenario MeScenario;

/*
 Sampled amplitudes of a propagated state.
 */
typedef struct MeTrajectory MeTrajectory;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Copies the message of the last failed call on this thread into `buf`
 (NUL-terminated, truncated to `len`). Returns the full message length
 excluding the terminator; 0 when the last call succeeded.

 # Safety
 `buf` must be null or valid for `len` bytes.
 */
size_t me_last_error_message(char *buf, size_t len);

/*
 Static, NUL-terminated name of a status code.
 */
const char *me_status_name(enum MeStatus status);

/*
 Builds a named preset (`lambda`, `four_level`, `rydberg`, `two_atom`)
 from its parameters in declaration order.

 # Safety
 `name` must be a NUL-terminated string, `params` valid for `n_params`
 values and `out` a writable handle pointer.
 */
enum MeStatus me_scenario_preset(const char *name,
                                 const double *params,
                                 size_t n_params,
                                 struct MeScenario **out);

/*
 Wraps a `dim`×`dim` Hermitian matrix (row-major; `im` may be null for a
 real matrix) with the given relevant states; all others are eliminated
 in one step.

 # Safety
 `re` and `im` (if non-null) must hold `dim*dim` values, `relevant`
 `n_relevant` indices, and `out` must be a writable handle pointer.
 */
enum MeStatus me_scenario_from_matrix(size_t dim,
                                      const double *re,
                                      const double *im,
                                      const size_t *relevant,
                                      size_t n_relevant,
                                      struct MeScenario **out);

/*
 # Safety
 `scenario` must be null or a handle from this library not yet freed.
 */
void me_scenario_free(struct MeScenario *scenario);

/*
 Dimension of the full Hilbert space, 0 for a null handle.

 # Safety
 `scenario` must be null or a live handle.
 */
size_t me_scenario_dim(const struct MeScenario *scenario);

/*
 Number of relevant states, 0 for a null handle.

 # Safety
 `scenario` must be null or a live handle.
 */
size_t me_scenario_relevant_count(const struct MeScenario *scenario);

/*
 Copies the full Hamiltonian (row-major, `dim*dim` entries) into `re`/`im`.

 # Safety
 `re` must hold `len` values; `im` may be null or hold `len` values.
 */
enum MeStatus me_scenario_matrix(const struct MeScenario *scenario,
                                 double *re,
                                 double *im,
                                 size_t len);

/*
 Oscillation frequency of the exact dynamics: the smallest gap among the
 eigenstates with the most weight on the relevant states.

 # Safety
 `scenario` must be a live handle and `out` writable.
 */
enum MeStatus me_scenario_rabi_exact(const struct MeScenario *scenario, double *out);

/*
 Eliminates the scenario's irrelevant states. Inner stages of a
 multi-step split use zeroth order; `order` applies to the final stage.

 # Safety
 `scenario` must be a live handle and `out` a writable handle pointer.
 */
enum MeStatus me_model_build(const struct MeScenario *scenario,
                             enum MeOrder order,
                             enum MeCondition condition,
                             double fixed_shift,
                             struct MeModel **out);

/*
 # Safety
 `model` must be null or a handle from this library not yet freed.
 */
void me_model_free(struct MeModel *model);

/*
 Number of relevant states, 0 for a null handle.

 # Safety
 `model` must be null or a live handle.
 */
size_t me_model_dim(const struct MeModel *model);

/*
 Picture shift used by the model, NaN for a null handle.

 # Safety
 `model` must be null or a live handle.
 */
double me_model_shift(const struct MeModel *model);

/*
 Copies the effective Hamiltonian (row-major, `m*m` entries). For the
 undressed first order this is the non-Hermitian generator.

 # Safety
 `re` must hold `len` values; `im` may be null or hold `len` values.
 */
enum MeStatus me_model_h_eff(const struct MeModel *model, double *re, double *im, size_t len);

/*
 Smallest gap of the effective spectrum.

 # Safety
 `model` must be a live handle and `out` writable.
 */
enum MeStatus me_model_rabi(const struct MeModel *model, double *out);

/*
 Propagates `psi0` (full dimension; `im` may be null) with the exact
 Hamiltonian on `steps + 1` equally spaced times in `[0, t_max]`.

 # Safety
 `psi_re`/`psi_im` must hold `dim` values and `out` be writable.
 */
enum MeStatus me_evolve_exact(const struct MeScenario *scenario,
                              const double *psi_re,
                              const double *psi_im,
                              size_t dim,
                              double t_max,
                              size_t steps,
                              struct MeTrajectory **out);

/*
 Propagates `psi0` (full dimension, supported on the relevant states)
 with an effective model. Irrelevant amplitudes are estimated.

 # Safety
 `psi_re`/`psi_im` must hold `dim` values and `out` be writable.
 */
enum MeStatus me_evolve_effective(const struct MeModel *model,
                                  const double *psi_re,
                                  const double *psi_im,
                                  size_t dim,
                                  double t_max,
                                  size_t steps,
                                  struct MeTrajectory **out);

/*
 # Safety
 `traj` must be null or a handle from this library not yet freed.
 */
void me_trajectory_free(struct MeTrajectory *traj);

/*
 Number of time samples, 0 for a null handle.

 # Safety
 `traj` must be null or a live handle.
 */
size_t me_trajectory_len(const struct MeTrajectory *traj);

/*
 Number of basis states per sample, 0 for a null handle.

 # Safety
 `traj` must be null or a live handle.
 */
size_t me_trajectory_dim(const struct MeTrajectory *traj);

/*
 Copies the sample times (`len` of them).

 # Safety
 `out` must hold `cap` values.
 */
enum MeStatus me_trajectory_times(const struct MeTrajectory *traj, double *out, size_t cap);

/*
 Copies populations as a row-major `len × dim` array.

 # Safety
 `out` must hold `cap` values.
 */
enum MeStatus me_trajectory_populations(const struct MeTrajectory *traj, double *out, size_t cap);

/*
 Copies amplitudes as row-major `len × dim` arrays; `im` may be null.

 # Safety
 `re` must hold `cap` values; `im` may be null or hold `cap` values.
 */
enum MeStatus me_trajectory_amplitudes(const struct MeTrajectory *traj,
                                       double *re,
                                       double *im,
                                       size_t cap);

/*
 Norm of the state in the propagation metric at each sample (1 for exact
 and zeroth-order runs).

 # Safety
 `out` must hold `cap` values.
 */
enum MeStatus me_trajectory_conserved_norm(const struct MeTrajectory *traj,
                                           double *out,
                                           size_t cap);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MARKOV_ELIM_H */
