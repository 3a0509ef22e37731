/* critwave C API: numerical laboratory for the blowup/scattering threshold
 * of the radial quintic wave equation around the ground-state soliton.
 *
 * All handles are opaque; every fallible call returns a cw_status and leaves
 * a human-readable detail retrievable with cw_last_error() (thread-local).
 */
#ifndef CRITWAVE_H
#define CRITWAVE_H

#include <stddef.h>

#if defined(_WIN32)
#define CW_API __declspec(dllexport)
#else
#define CW_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cw_status {
    CW_OK = 0,
    CW_ERR_INVALID_ARGUMENT = 1,
    CW_ERR_CONFIG = 2,
    CW_ERR_UNDETERMINED = 3,
    CW_ERR_NUMERICAL = 4,
    CW_ERR_IO = 5
} cw_status;

CW_API const char* cw_version(void);
CW_API const char* cw_status_name(cw_status s);

/* Copies the calling thread's last error detail into buf (NUL-terminated,
 * truncated to len); returns the full message length. */
CW_API size_t cw_last_error(char* buf, size_t len);

/* ---- radial grid -------------------------------------------------------- */

typedef struct cw_grid cw_grid;

/* n_points >= 16, dr > 0 */
CW_API cw_status cw_grid_create(int n_points, double dr, cw_grid** out);
CW_API void cw_grid_free(cw_grid* g);
CW_API int cw_grid_n_points(const cw_grid* g);
CW_API double cw_grid_dr(const cw_grid* g);

/* Samples of the soliton W_lambda(r) = sqrt(lambda) W(lambda r); `values`
 * must hold n_points doubles. */
CW_API cw_status cw_ground_state(const cw_grid* g, double lambda, double* values);

/* ---- spectrum of H = -Laplacian - 5 W^4 --------------------------------- */

typedef struct cw_spectrum cw_spectrum;

/* Runs both the matrix and the shooting eigen-solver on the grid. */
CW_API cw_status cw_spectrum_compute(const cw_grid* g, cw_spectrum** out);
CW_API void cw_spectrum_free(cw_spectrum* s);

CW_API double cw_spectrum_k0(const cw_spectrum* s);
CW_API double cw_spectrum_k0_shooting(const cw_spectrum* s);
CW_API double cw_spectrum_k0_matrix(const cw_spectrum* s);
CW_API double cw_spectrum_residual_eig(const cw_spectrum* s);
CW_API double cw_spectrum_residual_res(const cw_spectrum* s);
CW_API int cw_spectrum_negative_count(const cw_spectrum* s);
/* L2-normalized unstable mode g0; `values` must hold n_points doubles. */
CW_API cw_status cw_spectrum_mode(const cw_spectrum* s, double* values);

/* ---- experiments --------------------------------------------------------- */

typedef struct cw_threshold_result {
    double h_star;
    double bracket_width;
    int runs;
    int upper_is_blowup; /* 1 expected */
    int lower_is_decay;  /* 1 expected */
    double family_norm;
} cw_threshold_result;

/* Bisects the blowup/scattering threshold for the family described by the
 * `key = value` config text (same schema as the CLI; empty string = all
 * defaults, the (0,0) family). */
CW_API cw_status cw_find_threshold(const char* config_text, cw_threshold_result* out);

/* Runs a full subcommand (spectrum | evolve | threshold | ejection |
 * bootstrap | hscaling | dispersive) with the given config text, writing
 * CSVs, SVG plots and manifest.txt under out_dir. The returned status uses
 * the same numbering as the CLI exit codes. */
CW_API cw_status cw_run(const char* subcommand, const char* config_text, const char* out_dir);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* CRITWAVE_H */
