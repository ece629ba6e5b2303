#ifndef BRAIDLEG_H
#define BRAIDLEG_H

/* This file is generated by cbindgen; edit cbindgen.toml and the Rust sources instead. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Status codes returned by every fallible call.
 */
typedef enum BraidlegStatus {
  BRAIDLEG_STATUS_OK = 0,
  /*
   Null pointer, bad UTF-8, or an argument outside its domain.
   */
  BRAIDLEG_STATUS_INVALID_ARGUMENT = 1,
  /*
   The expression text failed to parse.
   */
  BRAIDLEG_STATUS_PARSE_ERROR = 2,
  /*
   A validation error from the engine (indices, dimensions, caps).
   */
  BRAIDLEG_STATUS_ENGINE_ERROR = 3,
  /*
   An internal-consistency guarantee failed; indicates a bug.
   */
  BRAIDLEG_STATUS_INTERNAL_ERROR = 4,
} BraidlegStatus;

/*
 Opaque computation context (dimension and braiding assignment).
 */
typedef struct BraidlegContext BraidlegContext;

/*
 Opaque algebra element.
 */
typedef struct BraidlegElement BraidlegElement;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 The message of the most recent error on this thread. The pointer stays
 valid until the next failing call on the same thread. Never null.
 */
const char *braidleg_last_error(void);

/*
 Create a context. `q_mode` is one of `"symbolic"`, `"ones"`, `"side"`.

 # Safety
 `q_mode` must be a valid NUL-terminated string and `out` a valid pointer.
 */
enum BraidlegStatus braidleg_context_new(size_t s,
                                         const char *q_mode,
                                         struct BraidlegContext **out);

/*
 Release a context created by [`braidleg_context_new`].

 # Safety
 `ctx` must be a pointer from `braidleg_context_new` or null.
 */
void braidleg_context_free(struct BraidlegContext *ctx);

/*
 Parse an expression into a normal-formed element.

 # Safety
 All pointers must be valid; `text` NUL-terminated.
 */
enum BraidlegStatus braidleg_element_parse(const struct BraidlegContext *ctx,
                                           const char *text,
                                           struct BraidlegElement **out);

/*
 Release an element.

 # Safety
 `elem` must come from this library or be null.
 */
void braidleg_element_free(struct BraidlegElement *elem);

/*
 Render an element in the canonical textual form. The returned string is
 released with [`braidleg_string_free`].

 # Safety
 All pointers must be valid.
 */
enum BraidlegStatus braidleg_element_to_string(const struct BraidlegElement *elem, char **out);

/*
 Release a string returned by this library.

 # Safety
 `text` must come from this library or be null.
 */
void braidleg_string_free(char *text);

/*
 Sum of two elements.

 # Safety
 All pointers must be valid handles from this library.
 */
enum BraidlegStatus braidleg_element_add(const struct BraidlegContext *ctx,
                                         const struct BraidlegElement *a,
                                         const struct BraidlegElement *b,
                                         struct BraidlegElement **out);

/*
 Braided product of two elements.

 # Safety
 All pointers must be valid handles from this library.
 */
enum BraidlegStatus braidleg_element_mul(const struct BraidlegContext *ctx,
                                         const struct BraidlegElement *a,
                                         const struct BraidlegElement *b,
                                         struct BraidlegElement **out);

/*
 Braided Poisson bracket of two elements.

 # Safety
 All pointers must be valid handles from this library.
 */
enum BraidlegStatus braidleg_element_bracket(const struct BraidlegContext *ctx,
                                             const struct BraidlegElement *a,
                                             const struct BraidlegElement *b,
                                             struct BraidlegElement **out);

/*
 Exact syntactic equality of normal forms. Returns 0/1; null handles
 compare unequal.

 # Safety
 Handles must be valid or null.
 */
int32_t braidleg_element_eq(const struct BraidlegElement *a, const struct BraidlegElement *b);

/*
 True when the element has no terms.

 # Safety
 `a` must be a valid handle.
 */
int32_t braidleg_element_is_zero(const struct BraidlegElement *a);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BRAIDLEG_H */
