/* C ABI for the skillmatch CV / job-post matching engine. */

#ifndef SKILLMATCH_H
#define SKILLMATCH_H

/* Generated with cbindgen:0.29.4 */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible call.
typedef enum SmStatus {
  SM_STATUS_OK = 0,
  // Null pointer, invalid UTF-8, or malformed argument.
  SM_STATUS_INVALID_ARGUMENT = 1,
  // Document or concept not found.
  SM_STATUS_NOT_FOUND = 2,
  // Schema or semantic validation failure.
  SM_STATUS_VALIDATION = 3,
  // Config or data file failed to parse.
  SM_STATUS_PARSE = 4,
  SM_STATUS_IO = 5,
  // Unexpected internal failure (a bug; see `sm_last_error`).
  SM_STATUS_INTERNAL = 6,
} SmStatus;

// Opaque engine handle.
typedef struct SmEngine SmEngine;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// ABI revision; bump on any breaking change to this surface.
uint32_t sm_abi_version(void);

// Last error message for this thread, or null when the previous call
// succeeded. The pointer stays valid until the next failing call on the
// same thread; do not free it.
const char *sm_last_error(void);

// Create an engine from a config file (see the repo docs for the format).
// On success writes the handle to `out_engine` and returns `SM_STATUS_OK`.
//
// # Safety
// `config_path` must be a valid NUL-terminated string; `out_engine` must
// point to writable memory.
enum SmStatus sm_engine_new(const char *config_path, struct SmEngine **out_engine);

// Release an engine. Null is a no-op.
//
// # Safety
// `engine` must be a pointer from [`sm_engine_new`] not yet freed.
void sm_engine_free(struct SmEngine *engine);

// Release a string returned by this library. Null is a no-op.
//
// # Safety
// `s` must be a string pointer returned by this library, not yet freed.
void sm_string_free(char *s);

// One-to-one match. `weights` is `skills=2,domain=2,culture=2,required=0`
// or null for the config default; `explain` adds per-axis evidence. The
// report JSON lands in `out_json`.
//
// # Safety
// Pointer arguments must satisfy the conventions above.
enum SmStatus sm_match_one(const struct SmEngine *engine,
                           const char *cv_id,
                           const char *job_id,
                           const char *weights,
                           bool explain,
                           char **out_json);

// Many-to-one ranking. `cv_ids` is a comma-separated id list or null for
// every stored CV; the `RankedList` JSON lands in `out_json`.
//
// # Safety
// Pointer arguments must satisfy the conventions above.
enum SmStatus sm_rank(const struct SmEngine *engine,
                      const char *job_id,
                      const char *cv_ids,
                      const char *weights,
                      char **out_json);

// Extract a concept graph from raw text against the general (0) or
// domain (1) ontology; the graph JSON lands in `out_json`.
//
// # Safety
// Pointer arguments must satisfy the conventions above.
enum SmStatus sm_extract(const struct SmEngine *engine,
                         const char *text,
                         uint32_t ontology,
                         char **out_json);

// Validate and store one document given as JSON; `kind` is 0 for CV,
// 1 for job post. The stored id lands in `out_id`.
//
// # Safety
// Pointer arguments must satisfy the conventions above.
enum SmStatus sm_ingest_json(const struct SmEngine *engine,
                             const char *doc_json,
                             uint32_t kind,
                             bool overwrite,
                             char **out_id);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SKILLMATCH_H */
