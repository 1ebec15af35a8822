#ifndef HJBTK_H
#define HJBTK_H

/* C interface to the HJB verification toolkit. All functions that can fail
 * return an hjbtk_status; on failure hjbtk_last_error() carries a
 * human-readable message for the calling thread. Objects are opaque and
 * must be released with the matching *_free function. */

#include <stddef.h>

#if defined(_WIN32)
#if defined(HJBTK_BUILD)
#define HJBTK_API __declspec(dllexport)
#else
#define HJBTK_API __declspec(dllimport)
#endif
#else
#define HJBTK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum hjbtk_status {
  HJBTK_OK = 0,
  HJBTK_ERR_DIMENSION = 1,
  HJBTK_ERR_DOMAIN = 2,
  HJBTK_ERR_PARAMETER = 3,
  HJBTK_ERR_CONFIG = 4,
  HJBTK_ERR_CAPABILITY = 5,
  HJBTK_ERR_POLICY_RANGE = 6,
  HJBTK_ERR_DIVERGED = 7,
  HJBTK_ERR_IDENTITY = 8,
  HJBTK_ERR_IO = 9,
  HJBTK_ERR_INTERNAL = 10,
  HJBTK_ERR_INVALID_ARGUMENT = 11
} hjbtk_status;

typedef struct hjbtk_config hjbtk_config;
typedef struct hjbtk_result hjbtk_result;

HJBTK_API const char* hjbtk_version(void);
HJBTK_API const char* hjbtk_status_name(hjbtk_status s);
/* Message for the most recent failure on this thread ("" if none). */
HJBTK_API const char* hjbtk_last_error(void);

/* ------------------------------------------------------------------ config */

HJBTK_API hjbtk_status hjbtk_config_load(const char* path, hjbtk_config** out);
HJBTK_API hjbtk_status hjbtk_config_parse(const char* text, hjbtk_config** out);
/* The built-in full-verification configuration for the benchmark example. */
HJBTK_API hjbtk_status hjbtk_config_example(hjbtk_config** out);
HJBTK_API hjbtk_status hjbtk_config_set(hjbtk_config* cfg, const char* section,
                                        const char* key, const char* value);
/* HJBTK_OK if the config is runnable. Otherwise HJBTK_ERR_CONFIG; when
 * diagnostics is non-NULL it receives a newline-joined report (release with
 * hjbtk_string_free). */
HJBTK_API hjbtk_status hjbtk_config_validate(const hjbtk_config* cfg, char** diagnostics);
HJBTK_API void hjbtk_config_free(hjbtk_config* cfg);

/* --------------------------------------------------------------------- run */

/* Runs the configured experiment and writes manifest.json, results.json and
 * the CSV/SVG artifacts. out_dir NULL uses the config's [output] dir. With
 * quiet == 0 one line per check is printed to stdout. A completed run returns
 * HJBTK_OK even if checks failed; inspect hjbtk_result_all_pass. */
HJBTK_API hjbtk_status hjbtk_run(const hjbtk_config* cfg, const char* out_dir, int quiet,
                                 hjbtk_result** out);

HJBTK_API int hjbtk_result_all_pass(const hjbtk_result* res);
HJBTK_API size_t hjbtk_result_check_count(const hjbtk_result* res);
/* NULL if i is out of range. Strings live as long as the result object. */
HJBTK_API const char* hjbtk_result_check_name(const hjbtk_result* res, size_t i);
HJBTK_API int hjbtk_result_check_pass(const hjbtk_result* res, size_t i);
HJBTK_API const char* hjbtk_result_out_dir(const hjbtk_result* res);
/* The manifest.json content of the run. */
HJBTK_API const char* hjbtk_result_manifest_json(const hjbtk_result* res);
HJBTK_API void hjbtk_result_free(hjbtk_result* res);

/* ---------------------------------------------------------------- registry */

/* Newline-joined "category<TAB>name<TAB>description" listing of the named
 * fixtures configs may reference. Release with hjbtk_string_free. */
HJBTK_API hjbtk_status hjbtk_list_fixtures(char** out);

HJBTK_API void hjbtk_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* HJBTK_H */
