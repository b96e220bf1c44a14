#ifndef PLAP_BOUNDS_H
#define PLAP_BOUNDS_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every call.
 */
typedef enum PlbStatus {
  PLB_STATUS_OK = 0,
  PLB_STATUS_NULL_POINTER = 1,
  PLB_STATUS_INVALID_ARGUMENT = 2,
  PLB_STATUS_GEOMETRY = 3,
  PLB_STATUS_RADIAL = 4,
  PLB_STATUS_ORACLE = 5,
  PLB_STATUS_OUT_OF_RANGE = 6,
  PLB_STATUS_PANIC = 7,
} PlbStatus;

typedef enum PlbMethod {
  PLB_METHOD_BOGGIO = 0,
  PLB_METHOD_HARDY = 1,
  PLB_METHOD_RADIAL_HARDY = 2,
  PLB_METHOD_MIXED = 3,
  PLB_METHOD_BOX = 4,
  PLB_METHOD_ANNULUS = 5,
  PLB_METHOD_CONVEX = 6,
  PLB_METHOD_MONOTONICITY = 7,
} PlbMethod;

typedef enum PlbLabel {
  PLB_LABEL_DIRICHLET = 0,
  PLB_LABEL_NEUMANN = 1,
} PlbLabel;

typedef enum PlbArrangement {
  PLB_ARRANGEMENT_NEUMANN_INNER_DIRICHLET_OUTER = 0,
  PLB_ARRANGEMENT_DIRICHLET_INNER_NEUMANN_OUTER = 1,
  PLB_ARRANGEMENT_DIRICHLET_BOTH = 2,
} PlbArrangement;

/**
 * Opaque list of certificates, best first.
 */
typedef struct PlbCertificates PlbCertificates;

/**
 * Opaque validated domain.
 */
typedef struct PlbDomain PlbDomain;

/**
 * Bound settings; obtain defaults from [`plb_config_default`].
 */
typedef struct PlbConfig {
  double grid_h;
  uintptr_t n_angles;
  uintptr_t n_boundary_samples;
  double tol;
  uintptr_t gamma_steps;
} PlbConfig;

/**
 * Flattened view of one certificate.
 */
typedef struct PlbCertificate {
  enum PlbMethod method;
  bool applicable;
  /**
   * Meaningful only when `applicable`.
   */
  double value;
  bool has_witness;
  double witness_x;
  double witness_y;
} PlbCertificate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null.
 *
 * The pointer stays valid until the next call on the same thread.
 */
const char *plb_last_error_message(void);

/**
 * Static name of a [`PlbMethod`] code, such as `"Box"`; null for an
 * unknown code.
 */
const char *plb_method_name(uint32_t method);

struct PlbConfig plb_config_default(void);

/**
 * Builds a simply connected domain.
 *
 * # Safety
 * `xy` holds `2 * n_vertices` doubles and `labels` holds `n_vertices`
 * [`PlbLabel`] codes, label `i` belonging to the edge from vertex `i` to
 * `i + 1`.
 * `normals` is null or holds `2 * n_vertices` doubles; `origin` is null or
 * holds 2 doubles. `out` must be writable.
 */
enum PlbStatus plb_domain_new(const double *xy,
                              uintptr_t n_vertices,
                              const uint32_t *labels,
                              const double *normals,
                              const double *origin,
                              struct PlbDomain **out);

/**
 * Parses a TOML domain file, holes and superdomain included. `p_out` and
 * `d_out` receive the file's exponent and dimension when not null.
 *
 * # Safety
 * `text` is a nul-terminated UTF-8 string; `out` must be writable.
 */
enum PlbStatus plb_domain_from_toml(const char *text,
                                    struct PlbDomain **out,
                                    double *p_out,
                                    uint32_t *d_out);

/**
 * # Safety
 * `domain` is null or a handle from this library not yet freed.
 */
void plb_domain_free(struct PlbDomain *domain);

/**
 * # Safety
 * `domain` is a live handle and `out` is writable.
 */
enum PlbStatus plb_domain_contains(const struct PlbDomain *domain, double x, double y, bool *out);

/**
 * # Safety
 * `domain` is a live handle and `out` is writable.
 */
enum PlbStatus plb_domain_area(const struct PlbDomain *domain, double *out);

/**
 * One-dimensional constant `mu_I` for exponent `p`.
 *
 * # Safety
 * `out` is writable.
 */
enum PlbStatus plb_mu_interval(double p, double *out);

/**
 * Fundamental eigenvalue of the annulus `r_inner < |x| < r_outer` in
 * dimension `d`; `arrangement` is a [`PlbArrangement`] code.
 *
 * # Safety
 * `out` is writable.
 */
enum PlbStatus plb_radial_eigenvalue(double r_inner,
                                     double r_outer,
                                     double p,
                                     uint32_t d,
                                     uint32_t arrangement,
                                     double *out);

/**
 * Grid estimate of the fundamental eigenvalue at spacing `h`.
 *
 * # Safety
 * `domain` is a live handle and `out` is writable.
 */
enum PlbStatus plb_oracle_eigenvalue(const struct PlbDomain *domain,
                                     double p,
                                     double h,
                                     double *out);

/**
 * Runs every bound. `config` may be null for the defaults.
 *
 * # Safety
 * `domain` is a live handle, `config` is null or readable, `out` is
 * writable. Release the result with [`plb_certificates_free`].
 */
enum PlbStatus plb_best_bounds(const struct PlbDomain *domain,
                               double p,
                               uint32_t d,
                               const struct PlbConfig *config,
                               struct PlbCertificates **out);

/**
 * Number of certificates; 0 for a null handle.
 *
 * # Safety
 * `list` is null or a live handle.
 */
uintptr_t plb_certificates_len(const struct PlbCertificates *list);

/**
 * # Safety
 * `list` is a live handle and `out` is writable.
 */
enum PlbStatus plb_certificates_get(const struct PlbCertificates *list,
                                    uintptr_t index,
                                    struct PlbCertificate *out);

/**
 * # Safety
 * `list` is null or a handle from [`plb_best_bounds`] not yet freed.
 */
void plb_certificates_free(struct PlbCertificates *list);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PLAP_BOUNDS_H */
