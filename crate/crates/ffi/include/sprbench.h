#ifndef SPRBENCH_H
#define SPRBENCH_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes. The first three mirror the command-line exit statuses.
 */
typedef enum SprStatus {
  /**
   * Success, or the relation holds.
   */
  SPR_STATUS_OK = 0,
  /**
   * The relation fails, or no homogeneous set exists.
   */
  SPR_STATUS_FAILS = 1,
  /**
   * Undecided within the budget.
   */
  SPR_STATUS_UNKNOWN = 2,
  SPR_STATUS_NULL_POINTER = 3,
  SPR_STATUS_INVALID_ARGUMENT = 4,
  SPR_STATUS_PARSE = 5,
  SPR_STATUS_PRECONDITION = 6,
  SPR_STATUS_TOO_LARGE = 7,
  SPR_STATUS_INTERNAL = 8,
  SPR_STATUS_PANIC = 9,
} SprStatus;

typedef enum SprMode {
  SPR_MODE_EXHAUSTIVE = 0,
  /**
   * `effort` is the number of sampled colorings.
   */
  SPR_MODE_RANDOMIZED = 1,
  /**
   * `effort` is the number of proposed flips.
   */
  SPR_MODE_COUNTEREXAMPLE_SEARCH = 2,
} SprMode;

/**
 * Opaque handle to a coloring; it keeps its own copy of the base structure.
 */
typedef struct SprColoring SprColoring;

/**
 * Opaque handle to a finite structure.
 */
typedef struct SprStructure SprStructure;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread; empty after a success.
 * Valid until the next call on the same thread.
 */
const char *spr_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void spr_string_free(char *s);

/**
 * Canonical `lambda`-big member of the class given as JSON, e.g.
 * `{"kind":"chi_or","chi":2}`.
 *
 * # Safety
 * `class_json` must be a valid C string and `out` a valid pointer.
 */
enum SprStatus spr_structure_canonical(const char *class_json,
                                       uint32_t lambda,
                                       struct SprStructure **out);

/**
 * # Safety
 * `json` must be a valid C string and `out` a valid pointer.
 */
enum SprStatus spr_structure_from_json(const char *json, struct SprStructure **out);

/**
 * # Safety
 * `s` must be a live handle and `out` a valid pointer.
 */
enum SprStatus spr_structure_to_json(const struct SprStructure *s, char **out);

/**
 * Universe size, or 0 for a null handle.
 *
 * # Safety
 * `s` must be null or a live handle.
 */
size_t spr_structure_size(const struct SprStructure *s);

/**
 * # Safety
 * `s` must be null or a handle from this library that has not been freed.
 */
void spr_structure_free(struct SprStructure *s);

/**
 * Number of increasing `arity`-types of the class, read at bigness `level`.
 *
 * # Safety
 * `class_json` must be a valid C string and `out` a valid pointer.
 */
enum SprStatus spr_type_count(const char *class_json, size_t arity, uint32_t level, size_t *out);

/**
 * Seeded uniform coloring of the increasing `arity`-tuples of `s`.
 *
 * # Safety
 * `s` must be a live handle and `out` a valid pointer.
 */
enum SprStatus spr_coloring_random(const struct SprStructure *s,
                                   size_t arity,
                                   uint32_t colors,
                                   uint64_t seed,
                                   struct SprColoring **out);

/**
 * # Safety
 * `s` must be a live handle, `json` a valid C string and `out` a valid pointer.
 */
enum SprStatus spr_coloring_from_json(const struct SprStructure *s,
                                      const char *json,
                                      struct SprColoring **out);

/**
 * # Safety
 * `c` must be a live handle and `out` a valid pointer.
 */
enum SprStatus spr_coloring_to_json(const struct SprColoring *c, char **out);

/**
 * # Safety
 * `c` must be null or a handle from this library that has not been freed.
 */
void spr_coloring_free(struct SprColoring *c);

/**
 * Searches for the lexicographically least `level`-big type-homogeneous
 * subset. Returns `Ok` and writes `{"subset", "witness", "nodes"}` when one
 * is found, `Fails` when the search proved there is none, and `Unknown`
 * when the node budget ran out. `out_json` is only written on `Ok`.
 *
 * # Safety
 * `c` must be a live handle and `out_json` a valid pointer.
 */
enum SprStatus spr_find_homogeneous(const struct SprColoring *c,
                                    uint32_t level,
                                    uint64_t budget,
                                    char **out_json);

/**
 * Decides `(lambda) -> (mu)^arity_colors` on the canonical member of the
 * class. The verdict JSON, including any refuting coloring, is written to
 * `out_json`; the status is `Ok`, `Fails` or `Unknown` accordingly.
 *
 * # Safety
 * `class_json` must be a valid C string and `out_json` a valid pointer.
 */
enum SprStatus spr_arrow_check(const char *class_json,
                               uint32_t lambda,
                               uint32_t mu,
                               size_t arity,
                               uint32_t colors,
                               enum SprMode mode,
                               uint64_t effort,
                               uint64_t seed,
                               char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPRBENCH_H */
