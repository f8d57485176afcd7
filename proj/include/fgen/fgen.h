/* C interface to the functional-generation engine.
 *
 * Objects are opaque handles created by fgen_*_create-style functions and
 * released with the matching *_free. Every fallible call returns an
 * fgen_status; on failure fgen_last_error() describes the problem (the
 * message is per thread and valid until the next failing call on it).
 * Output arrays are caller-allocated; sizes follow from the _length/_dim
 * accessors. Matrices are row-major, one row per grid point.
 */
#ifndef FGEN_FGEN_H
#define FGEN_FGEN_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define FGEN_API __declspec(dllexport)
#else
#define FGEN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fgen_status {
    FGEN_OK = 0,
    FGEN_ERR_VALIDATION = 2, /* malformed parameters or config */
    FGEN_ERR_RUNTIME = 3,    /* numerical failure, I/O failure, failed check */
    FGEN_ERR_ARGUMENT = 4    /* null handle, index out of range, size mismatch */
} fgen_status;

typedef enum fgen_mode {
    FGEN_MODE_ADDITIVE = 1,
    FGEN_MODE_MULTIPLICATIVE = 2
} fgen_mode;

typedef struct fgen_path fgen_path;
typedef struct fgen_generator fgen_generator;
typedef struct fgen_strategy fgen_strategy;

FGEN_API const char* fgen_last_error(void);
FGEN_API const char* fgen_version(void);

/* ---- market paths ---- */

/* times: len points; caps: len * d capitalizations. */
FGEN_API fgen_status fgen_path_from_caps(const double* times, size_t len, const double* caps, size_t d,
                                         fgen_path** out);
/* Path `path_index` of the ensemble described by a scenario config (JSON text). */
FGEN_API fgen_status fgen_path_simulate(const char* config_json, size_t path_index, fgen_path** out);
FGEN_API void fgen_path_free(fgen_path* path);
FGEN_API size_t fgen_path_length(const fgen_path* path);
FGEN_API size_t fgen_path_dim(const fgen_path* path);
FGEN_API fgen_status fgen_path_times(const fgen_path* path, double* out);
FGEN_API fgen_status fgen_path_weights(const fgen_path* path, double* out);
FGEN_API fgen_status fgen_path_caps(const fgen_path* path, double* out);

/* ---- generating functions ---- */

/* kind: entropy, quadratic, gini, large_cap, small_cap, geometric_mean.
 * c is used by quadratic, m by large_cap/small_cap. */
FGEN_API fgen_status fgen_generator_builtin(const char* kind, double c, size_t m, fgen_generator** out);
FGEN_API fgen_status fgen_generator_normalize(const fgen_generator* g, const double* mu0, size_t d,
                                              fgen_generator** out);
FGEN_API void fgen_generator_free(fgen_generator* g);
FGEN_API fgen_status fgen_generator_value(const fgen_generator* g, const double* x, size_t d, double* out);
FGEN_API fgen_status fgen_generator_gradient(const fgen_generator* g, const double* x, size_t d, double* out);
/* Gamma along a path into out[fgen_path_length(path)]; analytic != 0 selects
 * the closed-form recipe instead of the defining identity. */
FGEN_API fgen_status fgen_gamma(const fgen_generator* g, const fgen_path* path, int analytic, double* out);

/* ---- strategies ---- */

FGEN_API fgen_status fgen_strategy_generate(const fgen_generator* g, const fgen_path* path, fgen_mode mode,
                                            fgen_strategy** out);
FGEN_API void fgen_strategy_free(fgen_strategy* s);
FGEN_API size_t fgen_strategy_length(const fgen_strategy* s);
FGEN_API size_t fgen_strategy_dim(const fgen_strategy* s);
FGEN_API fgen_status fgen_strategy_value(const fgen_strategy* s, double* out);
FGEN_API fgen_status fgen_strategy_holdings(const fgen_strategy* s, double* out);
FGEN_API fgen_status fgen_strategy_gamma(const fgen_strategy* s, double* out);
/* Multiplicative strategies only: |V - G K| / V per grid point. */
FGEN_API fgen_status fgen_strategy_master_residual(const fgen_strategy* s, double* out);

/* ---- diagnostics ---- */

FGEN_API fgen_status fgen_find_shift_c(double kappa, double epsilon, double* out);
/* kind: entropy or quadratic; diversity <= 0 means none. */
FGEN_API fgen_status fgen_horizon_bound(const char* kind, const double* mu0, size_t d, double eta,
                                        double diversity, double* out);

/* ---- scenarios ---- */

/* command: simulate, generate, outperform, counterexample. out_dir may be
 * NULL (then $FGEN_OUT_DIR, else "out"); seed_override may be NULL. */
FGEN_API fgen_status fgen_run_command(const char* command, const char* config_file, const char* out_dir,
                                      const uint64_t* seed_override, unsigned threads);
FGEN_API fgen_status fgen_run_report(const char* const* summary_files, size_t count, const char* out_dir);
/* Newline-separated artifact paths written by the last successful run on
 * this thread. */
FGEN_API const char* fgen_last_artifacts(void);

#ifdef __cplusplus
}
#endif

#endif
