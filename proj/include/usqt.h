/* usqt — quantitative ultrasound tissue characterization toolkit.
 *
 * C interface to the processing pipeline: synthetic phantom simulation,
 * envelope detection, parametric-map + multiscale feature extraction, and
 * cross-validated classification. All entry points are thread-safe as long
 * as each usqt_config / usqt_result instance is confined to one thread.
 *
 * Every function that can fail returns an int status from usqt_status;
 * USQT_OK (0) means success. On failure, usqt_last_error() returns a
 * human-readable message describing the most recent failure on the calling
 * thread.
 */
#ifndef USQT_H
#define USQT_H

#include <stddef.h>

#if defined(_WIN32)
#if defined(USQT_BUILD)
#define USQT_API __declspec(dllexport)
#else
#define USQT_API __declspec(dllimport)
#endif
#else
#define USQT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum usqt_status {
    USQT_OK = 0,
    USQT_ERR_ARGUMENT = 1,        /* caller violated a precondition */
    USQT_ERR_PARAM_DOMAIN = 2,    /* distribution parameter out of domain */
    USQT_ERR_DEGENERATE_DATA = 3, /* data carries no usable information */
    USQT_ERR_CONVERGENCE = 4,     /* iterative routine exhausted its budget */
    USQT_ERR_FORMAT = 5,          /* malformed file content */
    USQT_ERR_IO = 6,              /* filesystem failure */
    USQT_ERR_CONFIG = 7,          /* bad configuration key or value */
    USQT_ERR_INTERNAL = 8,        /* unexpected internal failure */
    USQT_ERR_OUT_OF_MEMORY = 9
} usqt_status;

/* Opaque handle holding a pipeline configuration. */
typedef struct usqt_config usqt_config;

/* Opaque handle holding the outcome of one pipeline run. */
typedef struct usqt_result usqt_result;

/* Library version as "major.minor.patch". Never NULL. */
USQT_API const char* usqt_version(void);

/* Message of the most recent failure on the calling thread; empty string if
 * the last call succeeded. The pointer stays valid until the next usqt call
 * on the same thread. Never NULL. */
USQT_API const char* usqt_last_error(void);

/* Short identifier ("ok", "argument", "io", ...) for a usqt_status value. */
USQT_API const char* usqt_status_name(int status);

/* Creates a configuration populated with defaults. NULL on allocation
 * failure. Free with usqt_config_free. */
USQT_API usqt_config* usqt_config_new(void);
USQT_API void usqt_config_free(usqt_config* config);

/* Replaces the configuration with the contents of a key=value file.
 * On failure the configuration is left unchanged. */
USQT_API int usqt_config_load_file(usqt_config* config, const char* path);

/* Sets one configuration key (e.g. "pipeline.models", "map.stride").
 * Unknown keys and out-of-range values fail with USQT_ERR_CONFIG. */
USQT_API int usqt_config_set(usqt_config* config, const char* key,
                             const char* value);

/* Applies one command-line style option by its long-flag name without the
 * leading dashes (e.g. flag "window", value "15x15x3"). */
USQT_API int usqt_config_set_flag(usqt_config* config, const char* flag,
                                  const char* value);

/* Cross-field validation; individual setters only range-check their own
 * key. Run this (or let usqt_run do it) before relying on a config. */
USQT_API int usqt_config_validate(const usqt_config* config);

/* Writes the 16-character hex digest of the semantic configuration fields
 * (models, seed, window, wavelet, CV protocol, phantom geometry) into
 * buffer. I/O directories and thread counts do not contribute. Requires
 * capacity >= 17 (digest + NUL). */
USQT_API int usqt_config_hash(const usqt_config* config, char* buffer,
                              size_t capacity);

/* Runs one pipeline command: "simulate", "envelope", "features",
 * "evaluate", or "all". On success (*out_result) owns a result handle that
 * must be freed with usqt_result_free. Per-frame failures do not fail the
 * call; they are reported through usqt_result_failed / usqt_result_failure.
 * A status other than USQT_OK means the stage could not run at all. */
USQT_API int usqt_run(const usqt_config* config, const char* command,
                      usqt_result** out_result);

/* Number of items (frames, tables) fully processed. 0 for NULL. */
USQT_API int usqt_result_processed(const usqt_result* result);

/* Number of items that failed; details via usqt_result_failure. */
USQT_API int usqt_result_failed(const usqt_result* result);

/* Primary artifacts written by the run (manifest, feature tables, report).
 * Index out of range or NULL result yields NULL. Strings stay valid until
 * usqt_result_free. */
USQT_API size_t usqt_result_output_count(const usqt_result* result);
USQT_API const char* usqt_result_output(const usqt_result* result,
                                        size_t index);

/* Per-item failure descriptions. */
USQT_API size_t usqt_result_failure_count(const usqt_result* result);
USQT_API const char* usqt_result_failure(const usqt_result* result,
                                         size_t index);

USQT_API void usqt_result_free(usqt_result* result);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* USQT_H */
