#ifndef LOCIDX_H
#define LOCIDX_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LocidxStatus {
  LOCIDX_STATUS_OK = 0,
  LOCIDX_STATUS_NULL_POINTER = 1,
  LOCIDX_STATUS_INVALID_UTF8 = 2,
  LOCIDX_STATUS_IO = 3,
  LOCIDX_STATUS_PARSE = 4,
  LOCIDX_STATUS_UNSUPPORTED = 5,
  LOCIDX_STATUS_INTERNAL = 6,
} LocidxStatus;

/**
 * A parsed model manifest.
 */
typedef struct LocidxModel LocidxModel;

/**
 * The result of a verification run.
 */
typedef struct LocidxReport LocidxReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next failing call on the same thread; do not free.
 */
const char *locidx_last_error(void);

/**
 * Library version as a static string.
 */
const char *locidx_version(void);

/**
 * Parses manifest text into a new model handle.
 *
 * # Safety
 * `text` is a NUL-terminated string; `out` points to writable storage.
 */
enum LocidxStatus locidx_model_parse(const char *text, struct LocidxModel **out);

/**
 * Reads and parses a manifest file.
 *
 * # Safety
 * `path` is a NUL-terminated string; `out` points to writable storage.
 */
enum LocidxStatus locidx_model_load(const char *path, struct LocidxModel **out);

/**
 * # Safety
 * `m` is null or a handle from `locidx_model_parse`/`locidx_model_load` not yet freed.
 */
void locidx_model_free(struct LocidxModel *m);

/**
 * Runs the verification. Failing theorems still return `Ok` with a FAIL report.
 *
 * # Safety
 * `m` is a live model handle; `out` points to writable storage.
 */
enum LocidxStatus locidx_verify(const struct LocidxModel *m, struct LocidxReport **out);

/**
 * 1 when the report's verdict is PASS, 0 otherwise (also for null).
 *
 * # Safety
 * `r` is null or a live report handle.
 */
int32_t locidx_report_passed(const struct LocidxReport *r);

/**
 * Report as JSON; free with `locidx_string_free`. Null on a null handle.
 *
 * # Safety
 * `r` is null or a live report handle.
 */
char *locidx_report_json(const struct LocidxReport *r);

/**
 * Report as an aligned text table; free with `locidx_string_free`.
 *
 * # Safety
 * `r` is null or a live report handle.
 */
char *locidx_report_text(const struct LocidxReport *r);

/**
 * # Safety
 * `r` is null or a report handle not yet freed.
 */
void locidx_report_free(struct LocidxReport *r);

/**
 * Exact residue of `object` (null for the first object) at `point`, given as
 * `y=0` or `y=1/2, z=i` in the tangential coordinates of `chart`. The value
 * is written to `out` as a string such as `-3/2` or `1/2+1/3i`.
 *
 * # Safety
 * String arguments are NUL-terminated (`object` may be null); `out` is writable.
 */
enum LocidxStatus locidx_residue(const struct LocidxModel *m,
                                 const char *object,
                                 const char *chart,
                                 const char *point,
                                 char **out);

/**
 * # Safety
 * `s` is null or a string returned by this library, not yet freed.
 */
void locidx_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LOCIDX_H */
