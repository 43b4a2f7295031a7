/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#ifndef REVGEO_H
#define REVGEO_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum RevgeoFamily {
  REVGEO_FAMILY_RING = 0,
  REVGEO_FAMILY_HORN = 1,
  REVGEO_FAMILY_SPINDLE = 2,
  REVGEO_FAMILY_SPHERE = 3,
} RevgeoFamily;

typedef enum RevgeoStatus {
  REVGEO_STATUS_OK = 0,
  REVGEO_STATUS_NULL_POINTER = 1,
  // Arguments outside the domain of the operation.
  REVGEO_STATUS_DOMAIN = 2,
  // A root, quadrature or integration failed to converge.
  REVGEO_STATUS_NUMERICAL = 3,
  // An internal panic was caught at the boundary.
  REVGEO_STATUS_INTERNAL = 4,
} RevgeoStatus;

// Opaque surface handle.
typedef struct RevgeoSurface RevgeoSurface;

// Opaque integrated trace handle.
typedef struct RevgeoTrace RevgeoTrace;

typedef struct RevgeoProfile {
  double radius;
  double radius_slope;
  double height_slope;
} RevgeoProfile;

// `chi_max` and `r_max` are NaN for orbits that never turn.
typedef struct RevgeoTurningPoint {
  double chi_max;
  double r_max;
} RevgeoTurningPoint;

// Optional angles are NaN when they do not exist on the surface.
typedef struct RevgeoCriticalAngles {
  double beta_crit;
  double beta_polar;
  double chi_inflection;
} RevgeoCriticalAngles;

// `chi_max` is NaN for unbound orbits.
typedef struct RevgeoClosed {
  double beta0;
  double start_r;
  double energy_at_unit_ell;
  double chi_max;
  double period_length;
  double closure_residual;
} RevgeoClosed;

typedef struct RevgeoState {
  double r;
  double theta;
  double vr;
  double vtheta;
  double lambda;
} RevgeoState;

typedef struct RevgeoDrift {
  double energy;
  double ell;
  double clairaut;
} RevgeoDrift;

typedef struct RevgeoApsides {
  double pericenter;
  double apocenter;
  double apsidal_angle;
  double precession;
} RevgeoApsides;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Copies the last error message of this thread into `buf` (NUL-terminated,
// truncated to `len`) and returns the full message length without the NUL.
// Returns 0 when there is no error. `buf` may be null to query the length.
//
// # Safety
// `buf` must be null or valid for `len` bytes.
uintptr_t revgeo_last_error_message(char *buf, uintptr_t len);

// Creates a torus with tube center distance `a` and tube radius `b`.
//
// # Safety
// `out` must be valid for writes.
enum RevgeoStatus revgeo_surface_new(double a, double b, struct RevgeoSurface **out);

// # Safety
// `s` must be null or a handle from [`revgeo_surface_new`] not yet freed.
void revgeo_surface_free(struct RevgeoSurface *s);

// # Safety
// `s` must be a live surface handle and `out` valid for writes.
enum RevgeoStatus revgeo_surface_family(const struct RevgeoSurface *s, enum RevgeoFamily *out);

// Profile radius and slopes at meridian arc length `r`.
//
// # Safety
// `s` must be a live surface handle and `out` valid for writes.
enum RevgeoStatus revgeo_surface_profile(const struct RevgeoSurface *s,
                                         double r,
                                         struct RevgeoProfile *out);

// # Safety
// `s` must be a live surface handle and `out` valid for writes.
enum RevgeoStatus revgeo_gaussian_curvature(const struct RevgeoSurface *s, double r, double *out);

// # Safety
// `s` must be a live surface handle and `out` valid for writes.
enum RevgeoStatus revgeo_effective_potential(const struct RevgeoSurface *s,
                                             double ell,
                                             double r,
                                             double *out);

// # Safety
// `s` must be a live surface handle and `out` valid for writes.
enum RevgeoStatus revgeo_turning_point(const struct RevgeoSurface *s,
                                       double beta0,
                                       struct RevgeoTurningPoint *out);

// # Safety
// `s` must be a live surface handle and `out` valid for writes.
enum RevgeoStatus revgeo_critical_angles(const struct RevgeoSurface *s,
                                         struct RevgeoCriticalAngles *out);

// Azimuthal advance per radial period, as a frequency `2 pi / delta_theta`,
// for a unit-speed launch at `beta0` from the outer equator.
//
// # Safety
// `s` must be a live surface handle and `out` valid for writes.
enum RevgeoStatus revgeo_theta_frequency(const struct RevgeoSurface *s, double beta0, double *out);

// Solves the closed geodesic with label `[m,n;p]`.
//
// # Safety
// `s` must be a live surface handle and `out` valid for writes.
enum RevgeoStatus revgeo_find_closed(const struct RevgeoSurface *s,
                                     uint32_t m,
                                     uint32_t n,
                                     uint8_t p,
                                     struct RevgeoClosed *out);

// Integrates a unit-speed geodesic from `(r0, theta0)` at angle `beta0` to the
// meridian up to affine time `max_lambda`. A non-positive `rel_tol` selects
// the default tolerances.
//
// # Safety
// `s` must be a live surface handle and `out` valid for writes.
enum RevgeoStatus revgeo_integrate(const struct RevgeoSurface *s,
                                   double r0,
                                   double theta0,
                                   double beta0,
                                   double max_lambda,
                                   double rel_tol,
                                   struct RevgeoTrace **out);

// # Safety
// `t` must be null or a handle from [`revgeo_integrate`] not yet freed.
void revgeo_trace_free(struct RevgeoTrace *t);

// Number of stored states; 0 for a null handle.
//
// # Safety
// `t` must be null or a live trace handle.
uintptr_t revgeo_trace_len(const struct RevgeoTrace *t);

// # Safety
// `t` must be a live trace handle and `out` valid for writes.
enum RevgeoStatus revgeo_trace_state(const struct RevgeoTrace *t,
                                     uintptr_t index,
                                     struct RevgeoState *out);

// State interpolated at affine time `lambda` within the trace.
//
// # Safety
// `t` must be a live trace handle and `out` valid for writes.
enum RevgeoStatus revgeo_trace_state_at(const struct RevgeoTrace *t,
                                        double lambda,
                                        struct RevgeoState *out);

// # Safety
// `t` must be a live trace handle and `out` valid for writes.
enum RevgeoStatus revgeo_trace_drift(const struct RevgeoTrace *t, struct RevgeoDrift *out);

// Length of the closed geodesic `[m,n]` on the unit flat square torus.
//
// # Safety
// `out` must be valid for writes.
enum RevgeoStatus revgeo_flat_length(uint32_t m, uint32_t n, double *out);

// Apsides of a bound orbit in the potential `-k1/r - k2/r^3`.
//
// # Safety
// `out` must be valid for writes.
enum RevgeoStatus revgeo_kepler_apsides(double k1,
                                        double k2,
                                        double ell,
                                        double energy,
                                        struct RevgeoApsides *out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* REVGEO_H */
