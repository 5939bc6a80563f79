#ifndef BLASCHKE_H
#define BLASCHKE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum BlStatus {
  BL_STATUS_OK = 0,
  BL_STATUS_NULL_POINTER = 1,
  BL_STATUS_INVALID_PARAM = 2,
  BL_STATUS_POLE_INPUT = 3,
  BL_STATUS_SOLVER_FAIL = 4,
  BL_STATUS_BUFFER_TOO_SMALL = 5,
  BL_STATUS_GUARD_EXCEEDED = 6,
  BL_STATUS_INTERNAL = 7,
} BlStatus;

/*
 Opaque product handle.
 */
typedef struct BlProduct BlProduct;

/*
 A point of the Riemann sphere; `re`, `im` are ignored when `is_infinite`.
 */
typedef struct BlPoint {
  double re;
  double im;
  bool is_infinite;
} BlPoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 The factor with zero `a` raised to the power `n`.
 */
enum BlStatus bl_single_power(double a_re, double a_im, uint32_t n, struct BlProduct **out);

enum BlStatus bl_two_zeros(double a1_re,
                           double a1_im,
                           double a2_re,
                           double a2_im,
                           uint32_t n,
                           struct BlProduct **out);

/*
 Zeros `r e^{i alpha} w_k` over the `n`-th roots of unity.
 */
enum BlStatus bl_rotational(double r, double alpha, uint32_t n, struct BlProduct **out);

enum BlStatus bl_two_rings(double r1,
                           double alpha1,
                           double r2,
                           double alpha2,
                           uint32_t n,
                           struct BlProduct **out);

/*
 First `m` zeros of the inverse-square sequence with `symmetry`-fold symmetry.
 */
enum BlStatus bl_partial_infinite(uint32_t symmetry, size_t m, struct BlProduct **out);

/*
 Simple zeros at `re[i] + i im[i]`, `i < len`.

 # Safety
 `re` and `im` must point to `len` readable doubles.
 */
enum BlStatus bl_custom(const double *re, const double *im, size_t len, struct BlProduct **out);

/*
 Release a handle; null is ignored.

 # Safety
 `b` must come from a builder and not be used afterwards.
 */
void bl_product_free(struct BlProduct *b);

/*
 Total number of zeros with multiplicity.

 # Safety
 `b` is a live handle or null; `out` is writable or null.
 */
enum BlStatus bl_degree(const struct BlProduct *b, uint32_t *out);

/*
 `B(z)` on the sphere.

 # Safety
 `b` is a live handle or null; `out` is writable or null.
 */
enum BlStatus bl_evaluate(const struct BlProduct *b, struct BlPoint z, struct BlPoint *out);

/*
 `B'(z)`; fails with `PoleInput` at a pole.

 # Safety
 `b` is a live handle or null; `out` is writable or null.
 */
enum BlStatus bl_derivative(const struct BlProduct *b, struct BlPoint z, struct BlPoint *out);

/*
 All solutions of `B(z) = w` with multiplicity. `*len` receives the count
 even when the buffer is too small.

 # Safety
 `buf` has `cap` writable slots; `len` is writable.
 */
enum BlStatus bl_fiber(const struct BlProduct *b,
                       struct BlPoint w,
                       struct BlPoint *buf,
                       size_t cap,
                       size_t *len);

/*
 Distinct critical points inside the disk with their orders.

 # Safety
 `buf` and `orders` have `cap` writable slots (`orders` may be null); `len` is writable.
 */
enum BlStatus bl_critical_points(const struct BlProduct *b,
                                 struct BlPoint *buf,
                                 uint32_t *orders,
                                 size_t cap,
                                 size_t *len);

/*
 Render with the default color scheme into `rgb`, `3 * width * height`
 bytes, rows top-down. `mode` is a [`BlMode`] value; `b` may be null in
 target mode. `threads = 0` is auto.

 # Safety
 `rgb` has `cap` writable bytes.
 */
enum BlStatus bl_render(const struct BlProduct *b,
                        double x0,
                        double x1,
                        double y0,
                        double y1,
                        uint32_t width,
                        uint32_t height,
                        uint32_t mode,
                        uint32_t threads,
                        uint8_t *rgb,
                        size_t cap);

/*
 Message for the last failed call on this thread, empty after a success.
 Valid until the next call on the same thread.
 */
const char *bl_last_error(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BLASCHKE_H */
