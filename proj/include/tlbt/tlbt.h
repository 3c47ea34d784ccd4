#ifndef TLBT_TLBT_H
#define TLBT_TLBT_H

/* C interface to the time-limited balanced truncation library.
 *
 * All matrices are dense, column-major. Functions return a tlbt_status;
 * on failure the message is available from tlbt_last_error() on the same
 * thread until the next call. Handles are opaque and must be released with
 * the matching *_free function. Distinct handles may be used concurrently.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(TLBT_BUILDING_LIBRARY)
#define TLBT_API __declspec(dllexport)
#else
#define TLBT_API __declspec(dllimport)
#endif
#else
#define TLBT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tlbt_status {
  TLBT_OK = 0,
  TLBT_ERR_INVALID_ARGUMENT = 1,
  TLBT_ERR_DIMENSION = 2,
  TLBT_ERR_PARSE = 3,
  TLBT_ERR_IO = 4,
  TLBT_ERR_SINGULAR = 5,
  TLBT_ERR_NOT_SEPARATED = 6,
  TLBT_ERR_NOT_PSD = 7,
  TLBT_ERR_UNSTABLE = 8,
  TLBT_ERR_ORDER = 9,
  TLBT_ERR_DEGENERATE = 10,
  TLBT_ERR_OVERFLOW = 11,
  TLBT_ERR_NUMERICAL = 12,
  TLBT_ERR_VERIFICATION_UNAVAILABLE = 13,
  TLBT_ERR_INTERNAL = 14
} tlbt_status;

typedef struct tlbt_system tlbt_system;
typedef struct tlbt_reduction tlbt_reduction;
typedef struct tlbt_input tlbt_input;
typedef struct tlbt_trajectory tlbt_trajectory;

TLBT_API const char* tlbt_version(void);
TLBT_API const char* tlbt_status_name(tlbt_status status);
/* Message of the last failed call on this thread ("" if none). */
TLBT_API const char* tlbt_last_error(void);
/* Releases strings returned through char** out-parameters. */
TLBT_API void tlbt_string_free(char* s);

/* ---- systems ---- */

/* 1-D heat equation, n interior nodes; B = first m unit vectors, C = last p rows of I. */
TLBT_API tlbt_status tlbt_system_generate_heat(int n, int m, int p, tlbt_system** out);
/* Reads a JSON manifest {"A": path, "B": path, "C": path, "E": optional path}. */
TLBT_API tlbt_status tlbt_system_load(const char* manifest_path, tlbt_system** out);
/* Copies the matrices; e may be NULL. */
TLBT_API tlbt_status tlbt_system_create(int n, int m, int p, const double* a, const double* b,
                                        const double* c, const double* e, tlbt_system** out);
/* Writes A.mtx, B.mtx, C.mtx (E.mtx) and manifest.json into dir. */
TLBT_API tlbt_status tlbt_system_save(const tlbt_system* sys, const char* dir);
TLBT_API tlbt_status tlbt_system_dims(const tlbt_system* sys, int* n, int* m, int* p);
TLBT_API tlbt_status tlbt_system_name(const tlbt_system* sys, char** name);
TLBT_API void tlbt_system_free(tlbt_system* sys);

/* ---- reduction ---- */

/* Balanced truncation with Gramians on [0, tbar]; tbar = INFINITY gives
 * classical BT. Exactly one of order > 0 or tol > 0 must be given; with tol
 * the order is the smallest r whose singular value tail sum is <= tol. */
TLBT_API tlbt_status tlbt_reduce(const tlbt_system* sys, double tbar, int order, double tol,
                                 tlbt_reduction** out);
TLBT_API tlbt_status tlbt_reduction_order(const tlbt_reduction* red, int* order);
TLBT_API tlbt_status tlbt_reduction_horizon(const tlbt_reduction* red, double* tbar);
/* Number of retained (numerically nonzero) singular values in *count; copies
 * min(*count, capacity) of them into values when values is not NULL. */
TLBT_API tlbt_status tlbt_reduction_singular_values(const tlbt_reduction* red, double* values,
                                                    int capacity, int* count);
/* Copies A11 (r x r), B1 (r x m), C1 (p x r); any pointer may be NULL. */
TLBT_API tlbt_status tlbt_reduction_matrices(const tlbt_reduction* red, double* a11, double* b1,
                                             double* c1);
/* Writes the reduced model like tlbt_system_save. */
TLBT_API tlbt_status tlbt_reduction_save(const tlbt_reduction* red, const char* dir);
/* Output error bound epsilon: max_{t<=tbar} |y - y_r| <= epsilon |u|_{L2(0,tbar)}. */
TLBT_API tlbt_status tlbt_reduction_bound(const tlbt_reduction* red, double* epsilon);
/* Bound report as JSON. With verify != 0 the balanced-coordinate terms are
 * added (requires n <= 500). */
TLBT_API tlbt_status tlbt_reduction_bound_json(const tlbt_reduction* red, int verify, char** json);
/* 2 (sigma_{r+1} + ... ) for the reduction's singular values. */
TLBT_API tlbt_status tlbt_reduction_hinf_bound(const tlbt_reduction* red, double* bound);
TLBT_API void tlbt_reduction_free(tlbt_reduction* red);

/* ---- inputs ---- */

/* spec: "const:<c>", "star", "zero", "table:<path>" or "random[:<pieces>]".
 * horizon and seed are used by random inputs only. */
TLBT_API tlbt_status tlbt_input_parse(const char* spec, int m, double horizon, uint64_t seed,
                                      tlbt_input** out);
/* Piecewise-constant, uniform on [-1, 1], unit L2 norm on [0, horizon], zero afterwards. */
TLBT_API tlbt_status tlbt_input_random(int m, int pieces, double horizon, uint64_t seed,
                                       tlbt_input** out);
TLBT_API tlbt_status tlbt_input_dimension(const tlbt_input* u, int* m);
/* values receives m entries. */
TLBT_API tlbt_status tlbt_input_eval(const tlbt_input* u, double t, double* values);
/* Trapezoid approximation of the L2 norm on [0, horizon] with step dt. */
TLBT_API tlbt_status tlbt_input_l2_norm(const tlbt_input* u, double horizon, double dt, double* norm);
TLBT_API void tlbt_input_free(tlbt_input* u);

/* ---- simulation ---- */

/* Implicit midpoint rule from x(0) = 0 on [0, t_end] with step dt. */
TLBT_API tlbt_status tlbt_simulate_system(const tlbt_system* sys, const tlbt_input* u, double t_end,
                                          double dt, tlbt_trajectory** out);
TLBT_API tlbt_status tlbt_simulate_reduced(const tlbt_reduction* red, const tlbt_input* u,
                                           double t_end, double dt, tlbt_trajectory** out);
/* Number of grid points (K + 1) and outputs p. */
TLBT_API tlbt_status tlbt_trajectory_dims(const tlbt_trajectory* traj, int* points, int* p);
/* times: points entries; outputs: p x points column-major. Either may be NULL. */
TLBT_API tlbt_status tlbt_trajectory_data(const tlbt_trajectory* traj, double* times, double* outputs);
/* CSV "t,y_1,...,y_p" with 17 significant digits, written atomically. */
TLBT_API tlbt_status tlbt_trajectory_write_csv(const tlbt_trajectory* traj, const char* path);
/* Pointwise |y - y_r|_2; series (points entries) may be NULL. */
TLBT_API tlbt_status tlbt_output_error(const tlbt_trajectory* full, const tlbt_trajectory* reduced,
                                       double tbar, double* series, double* max_on_horizon,
                                       double* max_overall);
TLBT_API void tlbt_trajectory_free(tlbt_trajectory* traj);

/* ---- files ---- */

/* Writes contents to path via a temporary file and rename; creates parent directories. */
TLBT_API tlbt_status tlbt_write_file(const char* path, const char* contents);

#ifdef __cplusplus
}
#endif

#endif
