#ifndef TOWERLEN_H
#define TOWERLEN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result codes.
 */
typedef enum TowerlenStatus {
  TOWERLEN_STATUS_OK = 0,
  TOWERLEN_STATUS_PARSE = 1,
  TOWERLEN_STATUS_SHAPE = 2,
  TOWERLEN_STATUS_PRECONDITION = 3,
  TOWERLEN_STATUS_INEXACT = 4,
  TOWERLEN_STATUS_NULL_ARGUMENT = 5,
  TOWERLEN_STATUS_INVALID_UTF8 = 6,
  TOWERLEN_STATUS_PANIC = 7,
} TowerlenStatus;

/**
 * A built tower. Create with [`towerlen_tower_from_json`], release with
 * [`towerlen_tower_free`].
 */
typedef struct TowerlenTower TowerlenTower;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null. Owned by the
 * library and valid until the next call on the same thread.
 */
const char *towerlen_last_error(void);

/**
 * Frees a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void towerlen_string_free(char *s);

/**
 * Builds a tower from its JSON description.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
enum TowerlenStatus towerlen_tower_from_json(const char *json, struct TowerlenTower **out);

/**
 * Releases a tower. Null is ignored.
 *
 * # Safety
 * `t` must come from [`towerlen_tower_from_json`] and not have been freed.
 */
void towerlen_tower_free(struct TowerlenTower *t);

/**
 * Rank of level `n`.
 *
 * # Safety
 * `t` must be a live tower and `out` a valid pointer.
 */
enum TowerlenStatus towerlen_tower_dim(const struct TowerlenTower *t, uintptr_t n, uintptr_t *out);

/**
 * Mittag-Leffler verdict as JSON. A `depth` of zero picks the default.
 *
 * # Safety
 * `t` must be a live tower and `out` a valid pointer.
 */
enum TowerlenStatus towerlen_tower_mittag_leffler(const struct TowerlenTower *t,
                                                  uint32_t depth,
                                                  char **out);

/**
 * Mittag-Leffler length report as JSON, searching ordinals up to `max_alpha`
 * (null means `w`). A `depth` of zero picks the default.
 *
 * # Safety
 * `t` must be a live tower, `max_alpha` null or a NUL-terminated string and
 * `out` a valid pointer.
 */
enum TowerlenStatus towerlen_tower_length(const struct TowerlenTower *t,
                                          const char *max_alpha,
                                          uint32_t depth,
                                          char **out);

/**
 * Runs a named verification suite and writes its report as JSON.
 * A `depth` of zero picks the suite default.
 *
 * # Safety
 * `suite` must be a NUL-terminated string and `out` a valid pointer.
 */
enum TowerlenStatus towerlen_verify(const char *suite, uint64_t seed, uint32_t depth, char **out);

/**
 * Runs the command line with `args_json`, a JSON array of argument strings
 * without the program name. Output goes to `out` and the process exit code to
 * `exit_code`.
 *
 * # Safety
 * `args_json` must be a NUL-terminated string; `out` and `exit_code` valid pointers.
 */
enum TowerlenStatus towerlen_run(const char *args_json, char **out, int32_t *exit_code);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TOWERLEN_H */
