#ifndef ANNULUS_OPS_H
#define ANNULUS_OPS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status code returned by every fallible call.
typedef enum AnnulusStatus {
  ANNULUS_STATUS_OK = 0,
  ANNULUS_STATUS_NULL_POINTER = 1,
  ANNULUS_STATUS_INVALID_MATRIX = 2,
  ANNULUS_STATUS_DIMENSION_MISMATCH = 3,
  ANNULUS_STATUS_INVALID_PARAMS = 4,
  ANNULUS_STATUS_NUMERICAL_FAILURE = 5,
  ANNULUS_STATUS_STALL = 6,
  ANNULUS_STATUS_SINGULAR_OPERATOR = 7,
  ANNULUS_STATUS_NOT_AR_UNITARY = 8,
  ANNULUS_STATUS_NOT_AR_ISOMETRY = 9,
  ANNULUS_STATUS_NOT_A_CANDIDATE = 10,
  ANNULUS_STATUS_NOT_CNU = 11,
  ANNULUS_STATUS_MIXED_TYPE = 12,
  ANNULUS_STATUS_NOT_DOUBLY_COMMUTING = 13,
  ANNULUS_STATUS_NOT_COMMUTING = 14,
  ANNULUS_STATUS_EXPLICIT_CAP = 15,
  ANNULUS_STATUS_BAD_MULTI_INDEX = 16,
  ANNULUS_STATUS_EIGENVALUE_OFF_BOUNDARY = 17,
  ANNULUS_STATUS_WINDOW_TOO_SMALL = 18,
  ANNULUS_STATUS_INCONSISTENT_BLOCKS = 19,
  ANNULUS_STATUS_PARSE = 20,
  ANNULUS_STATUS_IO = 21,
  ANNULUS_STATUS_BUFFER_TOO_SMALL = 22,
  ANNULUS_STATUS_INDEX_OUT_OF_RANGE = 23,
  ANNULUS_STATUS_PANIC = 99,
} AnnulusStatus;

typedef enum AnnulusAtom {
  ANNULUS_ATOM_TU = 0,
  ANNULUS_ATOM_TC = 1,
  ANNULUS_ATOM_NON_ATOM = 2,
} AnnulusAtom;

// Single-operator decomposition kinds.
typedef enum AnnulusDecomposeKind {
  ANNULUS_DECOMPOSE_KIND_UNITARY = 0,
  ANNULUS_DECOMPOSE_KIND_WOLD = 1,
  ANNULUS_DECOMPOSE_KIND_CANONICAL = 2,
  ANNULUS_DECOMPOSE_KIND_LEVAN = 3,
} AnnulusDecomposeKind;

// Joint decomposition kinds.
typedef enum AnnulusFamilyKind {
  ANNULUS_FAMILY_KIND_CANONICAL = 0,
  ANNULUS_FAMILY_KIND_WOLD = 1,
  ANNULUS_FAMILY_KIND_UNITARY = 2,
  ANNULUS_FAMILY_KIND_LEVAN = 3,
  ANNULUS_FAMILY_KIND_BURDAK = 4,
} AnnulusFamilyKind;

// Opaque result of a decomposition: labelled parts and, for the commuting
// split, a remainder.
typedef struct AnnulusDecomposition AnnulusDecomposition;

// Opaque square complex matrix.
typedef struct AnnulusMatrix AnnulusMatrix;

// Annulus radius and tolerances.
typedef struct AnnulusParams {
  double r;
  double tol_rank;
  double tol_id;
  double tol_spec;
} AnnulusParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. The pointer stays
// valid until the next failing call on the same thread.
const char *annulus_last_error_message(void);

// Static name of a status code.
const char *annulus_status_name(enum AnnulusStatus status);

// Default tolerances for radius `r`, honouring the tolerance profile
// environment variable. Falls back to the default profile if the variable
// holds an unknown name.
struct AnnulusParams annulus_params_default(double r);

// Creates a `dim x dim` matrix from `2 * dim * dim` interleaved doubles.
//
// # Safety
// `data` must point to `2 * dim * dim` readable doubles and `out` must be a
// valid pointer.
enum AnnulusStatus annulus_matrix_new(size_t dim, const double *data, struct AnnulusMatrix **out);

// Parses a matrix file body `{"dim": N, "data": [[re, im], ...]}`.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer.
enum AnnulusStatus annulus_matrix_from_json(const char *json, struct AnnulusMatrix **out);

// Serializes a matrix as a matrix file body. Release the string with
// [`annulus_string_free`].
//
// # Safety
// `m` must be a live handle and `out` a valid pointer.
enum AnnulusStatus annulus_matrix_to_json(const struct AnnulusMatrix *m, char **out);

// # Safety
// `s` must come from this library or be null.
void annulus_string_free(char *s);

// # Safety
// `m` must come from this library or be null.
void annulus_matrix_free(struct AnnulusMatrix *m);

// Dimension of `m`, or 0 for a null handle.
//
// # Safety
// `m` must be a live handle or null.
size_t annulus_matrix_dim(const struct AnnulusMatrix *m);

// Copies the entries into `out` (`2 * dim * dim` doubles).
//
// # Safety
// `m` must be a live handle and `out` must hold `len` writable doubles.
enum AnnulusStatus annulus_matrix_copy_data(const struct AnnulusMatrix *m, double *out, size_t len);

// `||T|| <= 1 + tol_id`.
//
// # Safety
// `m` and `params` must be valid, `out` writable.
enum AnnulusStatus annulus_is_contraction(const struct AnnulusMatrix *m,
                                          const struct AnnulusParams *params,
                                          bool *out);

// Normality to tolerance.
//
// # Safety
// `m` and `params` must be valid, `out` writable.
enum AnnulusStatus annulus_is_normal(const struct AnnulusMatrix *m,
                                     const struct AnnulusParams *params,
                                     bool *out);

// Normal with spectrum on the two boundary circles.
//
// # Safety
// `m` and `params` must be valid, `out` writable.
enum AnnulusStatus annulus_is_ar_unitary(const struct AnnulusMatrix *m,
                                         const struct AnnulusParams *params,
                                         bool *out);

// Invertible and satisfying the A_r-isometry identity.
//
// # Safety
// `m` and `params` must be valid, `out` writable.
enum AnnulusStatus annulus_is_ar_isometry(const struct AnnulusMatrix *m,
                                          const struct AnnulusParams *params,
                                          bool *out);

// Necessary spectral and norm conditions for an A_r-contraction.
//
// # Safety
// `m` and `params` must be valid, `out` writable.
enum AnnulusStatus annulus_is_candidate(const struct AnnulusMatrix *m,
                                        const struct AnnulusParams *params,
                                        bool *out);

// Atom type of a candidate.
//
// # Safety
// `m` and `params` must be valid, `out` writable.
enum AnnulusStatus annulus_classify_atom(const struct AnnulusMatrix *m,
                                         const struct AnnulusParams *params,
                                         enum AnnulusAtom *out);

// Orthogonal decomposition of one operator. Part labels: `u, r` (unitary),
// `u, r, p` (Wold), `u, r, c` (canonical), `iso, cni` (Levan).
//
// # Safety
// `m` and `params` must be valid, `out` writable.
enum AnnulusStatus annulus_decompose(const struct AnnulusMatrix *m,
                                     enum AnnulusDecomposeKind kind,
                                     const struct AnnulusParams *params,
                                     struct AnnulusDecomposition **out);

// Joint decomposition of `n` operators. Part labels look like `(t_u,t_c)`;
// the commuting split also has a remainder.
//
// # Safety
// `ops` must point to `n` live handles; `params` valid; `out` writable.
enum AnnulusStatus annulus_family(const struct AnnulusMatrix *const *ops,
                                  size_t n,
                                  enum AnnulusFamilyKind kind,
                                  const struct AnnulusParams *params,
                                  struct AnnulusDecomposition **out);

// # Safety
// `d` must come from this library or be null.
void annulus_decomposition_free(struct AnnulusDecomposition *d);

// Number of labelled parts (the remainder is not counted).
//
// # Safety
// `d` must be a live handle or null.
size_t annulus_decomposition_part_count(const struct AnnulusDecomposition *d);

// Label of part `i`, valid while `d` is alive; null when out of range.
//
// # Safety
// `d` must be a live handle or null.
const char *annulus_decomposition_part_label(const struct AnnulusDecomposition *d, size_t i);

// Ambient dimension and dimension of part `i`.
//
// # Safety
// `d` must be a live handle; `ambient` and `dim` writable.
enum AnnulusStatus annulus_decomposition_part_dim(const struct AnnulusDecomposition *d,
                                                  size_t i,
                                                  size_t *ambient,
                                                  size_t *dim);

// Orthonormal basis of part `i` as an `ambient x dim` row-major array of
// interleaved doubles (`2 * ambient * dim` entries).
//
// # Safety
// `d` must be a live handle and `out` must hold `len` writable doubles.
enum AnnulusStatus annulus_decomposition_part_basis(const struct AnnulusDecomposition *d,
                                                    size_t i,
                                                    double *out,
                                                    size_t len);

// Dimension of the remainder; `has_remainder` is false for splits that
// have none.
//
// # Safety
// `d` must be a live handle; outputs writable.
enum AnnulusStatus annulus_decomposition_remainder_dim(const struct AnnulusDecomposition *d,
                                                       bool *has_remainder,
                                                       size_t *dim);

// Brehmer positivity: writes the minimum eigenvalue of `S(u)` for each of
// the `2^n - 1` nonempty subsets (by size, then lexicographic) into
// `min_eigs` and sets `passed`.
//
// # Safety
// `ops` must point to `n` live handles; `min_eigs` must hold `len` doubles.
enum AnnulusStatus annulus_check_brehmer(const struct AnnulusMatrix *const *ops,
                                         size_t n,
                                         const struct AnnulusParams *params,
                                         double *min_eigs,
                                         size_t len,
                                         bool *passed);

// `||Δ_m^k - (1 - r^2)^{|k| - m} S(u)||` for the subset `members` (0-based,
// `m` entries) and exponents `k` (`m` entries).
//
// # Safety
// `ops` must point to `n` live handles; `members` and `k` to `m` entries.
enum AnnulusStatus annulus_bp_identity_residual(const struct AnnulusMatrix *const *ops,
                                                size_t n,
                                                const size_t *members,
                                                const uint32_t *k,
                                                size_t m,
                                                const struct AnnulusParams *params,
                                                double *out);

// Diagonal A_r-unitary from `n_unit` unimodular and `n_r` modulus-`r`
// eigenvalues (interleaved doubles).
//
// # Safety
// `eigs_unit` must hold `2 * n_unit` doubles, `eigs_r` `2 * n_r`.
enum AnnulusStatus annulus_gen_ar_unitary(const double *eigs_unit,
                                          size_t n_unit,
                                          const double *eigs_r,
                                          size_t n_r,
                                          const struct AnnulusParams *params,
                                          struct AnnulusMatrix **out);

// `C_N ⊕ r C_M`.
//
// # Safety
// `params` valid, `out` writable.
enum AnnulusStatus annulus_gen_cyclic(size_t n,
                                      size_t m,
                                      const struct AnnulusParams *params,
                                      struct AnnulusMatrix **out);

// Truncated weighted shift on the window `n_min..=n_max`. When `weights` is
// non-null it receives the `n_max - n_min + 1` squared norms `c_n`.
//
// # Safety
// `out` writable; `weights` null or holding `weights_len` doubles.
enum AnnulusStatus annulus_gen_hardy_shift(double alpha,
                                           double r,
                                           int32_t n_min,
                                           int32_t n_max,
                                           double *weights,
                                           size_t weights_len,
                                           struct AnnulusMatrix **out);

// `(S_α, S_α^2)` on the window; `r_squared` receives the annulus parameter
// of the pair.
//
// # Safety
// All output pointers must be writable.
enum AnnulusStatus annulus_gen_sarason_pair(double alpha,
                                            double r,
                                            int32_t n_min,
                                            int32_t n_max,
                                            struct AnnulusMatrix **v1,
                                            struct AnnulusMatrix **v2,
                                            double *r_squared);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ANNULUS_OPS_H */
