#ifndef NEWSPACE_H
#define NEWSPACE_H

/* Generated by cbindgen from newspace-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes mirroring the CLI exit contract.
 */
typedef enum {
  /**
   * The call succeeded and every executed check passed.
   */
  NEWSPACE_STATUS_OK = 0,
  /**
   * The call succeeded but at least one certified identity failed.
   */
  NEWSPACE_STATUS_CHECK_FAILED = 1,
  /**
   * Invalid parameters (bad primes, level shape, unknown names).
   */
  NEWSPACE_STATUS_INVALID_ARGUMENT = 2,
  /**
   * Internal error (allocation, serialization, panic).
   */
  NEWSPACE_STATUS_INTERNAL = 3,
  /**
   * A required pointer argument was null.
   */
  NEWSPACE_STATUS_NULL_POINTER = 4,
} NewspaceStatus;

/**
 * Opaque handle to a symbol space at one `(level, weight)`, together with
 * the cache of lower-level spaces its computations need.
 */
typedef struct NewspaceSpace NewspaceSpace;

/**
 * Library version as a static string; do not free.
 */
const char *newspace_version(void);

/**
 * Release a string returned by any `*_json` function.
 *
 * # Safety
 * `s` must be a pointer previously returned through an out-parameter of
 * this library and not yet freed; null is ignored.
 */
void newspace_string_free(char *s);

/**
 * Build the symbol space at `(level, weight)` and return an opaque handle.
 *
 * # Safety
 * `out` must be a valid pointer to writable storage for one pointer.
 */
NewspaceStatus newspace_space_new(uint32_t level, uint32_t weight, NewspaceSpace **out);

/**
 * Release a space handle; null is ignored.
 *
 * # Safety
 * `space` must come from [`newspace_space_new`] and not be freed twice.
 */
void newspace_space_free(NewspaceSpace *space);

/**
 * Dimensions of the space behind a handle: the full quotient, the cuspidal
 * subspace, and the new subspace of the cuspidal space.
 *
 * # Safety
 * `space` must be a live handle; out-pointers may be null to skip a field.
 */
NewspaceStatus newspace_space_dims(const NewspaceSpace *space,
                                   uintptr_t *full_dim,
                                   uintptr_t *cuspidal_dim,
                                   uintptr_t *new_dim);

/**
 * Verify the finite Hecke algebra relations at `(p, n)`; the JSON report
 * lands in `out_json`.
 *
 * # Safety
 * `out_json` must be a valid pointer to writable storage for one pointer.
 */
NewspaceStatus newspace_local_verify(uint64_t p, uint32_t n, char **out_json);

/**
 * Eigenvector table of the finite Hecke algebra at `(p, n)` as JSON.
 *
 * # Safety
 * `out_json` must be a valid pointer to writable storage for one pointer.
 */
NewspaceStatus newspace_local_table(uint64_t p, uint32_t n, char **out_json);

/**
 * Decomposition of the induced representation at `(p, n)` as a JSON report.
 *
 * # Safety
 * `out_json` must be a valid pointer to writable storage for one pointer.
 */
NewspaceStatus newspace_local_decompose(uint64_t p, uint32_t n, char **out_json);

/**
 * Run a theorem or lemma family on a space handle.
 *
 * `theorem` is one of `auto`, `T1`, `T2`, `T2prime`, `T3`, `T5`, `lemmas`,
 * `section6`; `star_restrict != 0` reports multiplicity-one dimensions.
 *
 * # Safety
 * `space` must be a live handle, `theorem` a NUL-terminated string, and
 * `out_json` valid writable storage for one pointer.
 */
NewspaceStatus newspace_check(const NewspaceSpace *space,
                              const char *theorem,
                              uint8_t star_restrict,
                              char **out_json);

/**
 * Export an operator matrix from a space handle as exact rationals in the
 * `newspace.matrix/1` JSON schema. Integer parameters follow the CLI flags
 * of `newspace emit`; pass 0 for parameters the operator does not use.
 *
 * # Safety
 * `space` must be a live handle, `op` a NUL-terminated string, and
 * `out_json` valid writable storage for one pointer.
 */
NewspaceStatus newspace_emit(const NewspaceSpace *space,
                             const char *op,
                             uint64_t p,
                             uint64_t q,
                             uint32_t r,
                             uint32_t j,
                             uint32_t d,
                             char **out_json);

#endif /* NEWSPACE_H */
