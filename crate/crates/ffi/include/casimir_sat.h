#ifndef CASIMIR_SAT_H
#define CASIMIR_SAT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum CsRoute {
  CS_ROUTE_ZERO_TEMPERATURE = 0,
  CS_ROUTE_MATSUBARA = 1,
  CS_ROUTE_REAL_AXIS = 2,
  CS_ROUTE_HYBRID = 3,
} CsRoute;

typedef enum CsSaturationKind {
  CS_SATURATION_KIND_NONE = 0,
  /*
   Shifted Bose distribution, parameter D.
   */
  CS_SATURATION_KIND_SHIFTED = 1,
  /*
   Occupation cap, parameter M.
   */
  CS_SATURATION_KIND_CUTOFF = 2,
} CsSaturationKind;

typedef enum CsScope {
  CS_SCOPE_ALL_MODES = 0,
  CS_SCOPE_TE_EVANESCENT = 1,
  CS_SCOPE_ZERO_TERM = 2,
} CsScope;

typedef enum CsStatus {
  CS_STATUS_OK = 0,
  CS_STATUS_NULL_POINTER = 1,
  CS_STATUS_VALIDATION = 2,
  CS_STATUS_CONVERGENCE = 3,
  CS_STATUS_PANIC = 4,
} CsStatus;

/*
 Opaque dielectric model.
 */
typedef struct CsMaterial CsMaterial;

/*
 Mirrors the library quadrature settings; see `cs_quadrature_default`.
 */
typedef struct CsQuadrature {
  double rel_tol;
  double abs_tol;
  uintptr_t max_subdivisions;
  double matsubara_rel_tol;
  uintptr_t max_matsubara_terms;
  double k_cutoff_multiplier;
  double omega_cutoff_multiplier;
} CsQuadrature;

typedef struct CsSaturation {
  enum CsSaturationKind kind;
  double parameter;
  enum CsScope scope;
} CsSaturation;

/*
 Energy (J/m^2) or pressure (Pa) with its split; parts are valid when has_parts != 0.
 */
typedef struct CsEvaluation {
  double total;
  double tm;
  double te;
  int32_t has_parts;
  double tm_propagating;
  double tm_evanescent;
  double te_propagating;
  double te_evanescent;
} CsEvaluation;

typedef struct CsAtom {
  /*
   m^3 (Gaussian).
   */
  double static_polarizability;
  /*
   rad/s.
   */
  double resonance;
} CsAtom;

typedef struct CsTrap {
  double amplitude;
  double thomas_fermi_radius;
  double mass;
  double trap_frequency;
} CsTrap;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Library defaults for the quadrature settings.
 */
struct CsQuadrature cs_quadrature_default(void);

/*
 Drude metal; frequencies in rad/s.

 # Safety
 `out` must be a valid pointer to writable storage for one handle.
 */
enum CsStatus cs_material_drude(double plasma_frequency,
                                double relaxation_rate,
                                struct CsMaterial **out);

/*
 Lossless plasma metal; frequency in rad/s.

 # Safety
 `out` must be a valid pointer to writable storage for one handle.
 */
enum CsStatus cs_material_plasma(double plasma_frequency, struct CsMaterial **out);

/*
 Ideal reflector.

 # Safety
 `out` must be a valid pointer to writable storage for one handle.
 */
enum CsStatus cs_material_perfect(struct CsMaterial **out);

/*
 Lorentz oscillators plus an optional conductivity (s^-1, Gaussian; 0 for none).

 # Safety
 The three arrays must hold `count` values each (they may be null when `count` is 0);
 `out` must be a valid pointer to writable storage for one handle.
 */
enum CsStatus cs_material_oscillators(uintptr_t count,
                                      const double *strengths,
                                      const double *resonances,
                                      const double *dampings,
                                      double conductivity,
                                      struct CsMaterial **out);

/*
 Releases a handle; null is ignored.

 # Safety
 `m` must come from a `cs_material_*` constructor and not be used afterwards.
 */
void cs_material_free(struct CsMaterial *m);

/*
 eps(i xi) for xi > 0 (rad/s).

 # Safety
 `m` must be a live handle and `out` writable.
 */
enum CsStatus cs_material_eps_imag(const struct CsMaterial *m, double xi, double *out);

/*
 Plate-plate energy per unit area (J/m^2) at separation d (m) and temperature (K).
 `sat` and `quad` may be null for no saturation and default quadrature.

 # Safety
 Handles must be live; non-null pointers must be valid; `out` writable.
 */
enum CsStatus cs_plate_energy(const struct CsMaterial *m1,
                              const struct CsMaterial *m2,
                              double d,
                              double temperature,
                              enum CsRoute route,
                              const struct CsSaturation *sat,
                              const struct CsQuadrature *quad,
                              struct CsEvaluation *out);

/*
 Plate-plate pressure (Pa, positive = attraction); arguments as `cs_plate_energy`.

 # Safety
 As `cs_plate_energy`.
 */
enum CsStatus cs_plate_pressure(const struct CsMaterial *m1,
                                const struct CsMaterial *m2,
                                double d,
                                double temperature,
                                enum CsRoute route,
                                const struct CsSaturation *sat,
                                const struct CsQuadrature *quad,
                                struct CsEvaluation *out);

/*
 Atom-wall potential, J (negative = attraction).

 # Safety
 `wall` must be live; `sat`/`quad` null or valid; `out` writable.
 */
enum CsStatus cs_atom_potential(const struct CsMaterial *wall,
                                struct CsAtom atom,
                                double d,
                                double temperature,
                                const struct CsSaturation *sat,
                                const struct CsQuadrature *quad,
                                double *out);

/*
 Atom-wall force -dV/dd, N (negative = toward the wall).

 # Safety
 As `cs_atom_potential`.
 */
enum CsStatus cs_atom_force(const struct CsMaterial *wall,
                            struct CsAtom atom,
                            double d,
                            double temperature,
                            const struct CsSaturation *sat,
                            const struct CsQuadrature *quad,
                            double *out);

/*
 Fractional trap-frequency shift (dimensionless).

 # Safety
 As `cs_atom_potential`; `trap` must be valid.
 */
enum CsStatus cs_gamma_x(const struct CsMaterial *wall,
                         struct CsAtom atom,
                         const struct CsTrap *trap,
                         double d,
                         double temperature,
                         const struct CsSaturation *sat,
                         const struct CsQuadrature *quad,
                         double *out);

/*
 Ideal-plate zero-temperature energy -pi^2 hbar c / (720 d^3), J/m^2.
 */
double cs_ideal_energy(double d);

/*
 Length in bytes of the calling thread's last error message (0 if none).
 */
uintptr_t cs_last_error_length(void);

/*
 Copies the last error message, NUL-terminated and truncated to `len - 1` bytes.
 Returns the full message length; pass a null buffer to query it.

 # Safety
 `buf` must be null or point to at least `len` writable bytes.
 */
uintptr_t cs_last_error_message(char *buf, uintptr_t len);

/*
 Library version, static NUL-terminated string.
 */
const char *cs_version(void);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* CASIMIR_SAT_H */
