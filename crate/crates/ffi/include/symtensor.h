#ifndef SYMTENSOR_H
#define SYMTENSOR_H

/* Generated from the symtensor-ffi crate sources; regenerate with a build, do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every library call. `StOk` is zero; anything else leaves an
 * explanatory message in `st_last_error_message`.
 */
typedef enum {
  StOk = 0,
  /**
   * A required pointer argument was null.
   */
  StNullPointer = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  StInvalidUtf8 = 2,
  /**
   * The expression or tensor text failed to parse.
   */
  StParseError = 3,
  /**
   * Flags or numeric arguments outside the supported range.
   */
  StInvalidArgument = 4,
  /**
   * A spectral weight is singular on an occupied slice.
   */
  StSingularSpectrum = 5,
  /**
   * Operands belong to different geometries.
   */
  StGeometryMismatch = 6,
  /**
   * The operation is not defined on this background.
   */
  StUnsupported = 7,
  /**
   * Numerical failure (for the simulator: leaving the half-space).
   */
  StRuntimeError = 8,
  /**
   * A defect inside the library; please report the last error message.
   */
  StInternal = 9,
} StStatus;

/**
 * Opaque background handle: dimension, signature, metric and curvature
 * tables.
 */
typedef struct StGeometry StGeometry;

/**
 * Opaque symmetric-tensor field handle.
 */
typedef struct StTensor StTensor;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread. The pointer stays
 * valid until the next failing call from the same thread.
 */
const char *st_last_error_message(void);

/**
 * Release a string returned by this library. Null is ignored.
 */
void st_string_free(char *s);

/**
 * Flat background with `positive` +1 legs followed by `negative` -1 legs.
 */
StStatus st_geometry_flat(uint32_t positive, uint32_t negative, StGeometry **out);

/**
 * Hyperbolic background of dimension `dim` (upper half-space model).
 */
StStatus st_geometry_hyperbolic(size_t dim, StGeometry **out);

/**
 * Dimension of the background; zero if the handle is null.
 */
uint32_t st_geometry_dim(const StGeometry *geo);

bool st_geometry_is_flat(const StGeometry *geo);

void st_geometry_free(StGeometry *geo);

/**
 * Parse a tensor from the textual syntax (`u<k>` fiber variables, `x<k>`
 * and `y` coordinates, rational coefficients).
 */
StStatus st_tensor_parse(const StGeometry *geo, const char *text, StTensor **out);

/**
 * Seeded random tensor with every rank part up to `max_rank` populated and
 * coordinate degree at most `max_degree`.
 */
StStatus st_tensor_random(const StGeometry *geo,
                          uint64_t seed,
                          uint32_t max_rank,
                          uint32_t max_degree,
                          StTensor **out);

void st_tensor_free(StTensor *t);

/**
 * Render the tensor in the same textual syntax `st_tensor_parse` accepts.
 */
StStatus st_tensor_render(const StTensor *t, char **out);

bool st_tensor_is_zero(const StTensor *t);

/**
 * Exact equality; false when either handle is null or geometries differ.
 */
bool st_tensor_equal(const StTensor *a, const StTensor *b);

StStatus st_tensor_add(const StTensor *a, const StTensor *b, StTensor **out);

StStatus st_tensor_sub(const StTensor *a, const StTensor *b, StTensor **out);

/**
 * Apply an operator expression (the word grammar: `grad`, `div`, `tr`,
 * `g`, `N`, `box`, `gradt`, `divt`, `Ncal`, `C`, `c`, `kappa`, rational
 * coefficients, `inv(...)`, sums, powers) to a tensor.
 */
StStatus st_apply(const char *expr, const StTensor *t, StTensor **out);

/**
 * Normalize an operator expression at the given dimension and emit the
 * canonical form as a JSON array of monomials `{g, gradt, divt, tr,
 * coeff: {num, den}}`. `flat_background` selects which reordering bracket
 * the rewriter uses.
 */
StStatus st_normalize_json(const char *expr, uint32_t dim, bool flat_background, char **out);

/**
 * Split a tensor into its trace decomposition and emit the slices with
 * their spectral eigenvalues as JSON.
 */
StStatus st_decompose_json(const StTensor *t, char **out);

/**
 * Run an identity suite (`sp2`, `doublet`, `box`, `fig3`, `depth`,
 * `inversion`, `rewriter`, or `all`) on seeded random tensors and emit the
 * full verification report as JSON. The report's top-level `pass` field
 * carries the verdict; a failing report still returns `StOk` here because
 * the call itself succeeded.
 */
StStatus st_verify_json(const StGeometry *geo,
                        const char *suite,
                        uint64_t seed,
                        uint32_t trials,
                        uint32_t max_rank,
                        uint32_t max_degree,
                        char **out);

/**
 * Report on the normal form of g^m tr^m against its closed factorial
 * expressions, as JSON.
 */
StStatus st_trace_power_report_json(uint32_t m, uint32_t dim, char **out);

/**
 * Gauge and divergence residual survey for the detour operator on a flat
 * background, as JSON. Errors with `ST_UNSUPPORTED` on curved handles.
 */
StStatus st_detour_report_json(const StGeometry *geo, uint64_t seed, uint32_t trials, char **out);

/**
 * Integrate the spinning-geodesic flow with fixed-step RK4 and emit the
 * initial charges, final state, and relative conservation drift as JSON.
 * `x`, `pi`, `z_re`, `z_im` must each hold `st_geometry_dim(geo)` entries.
 */
StStatus st_simulate_json(const StGeometry *geo,
                          const double *x,
                          const double *pi,
                          const double *z_re,
                          const double *z_im,
                          double dt,
                          size_t steps,
                          char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SYMTENSOR_H */
