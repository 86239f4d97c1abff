/* C interface to the cmcomm commutator library. */

#ifndef CMCOMM_H
#define CMCOMM_H

/* Generated by cbindgen from cmcomm-capi; edit the Rust sources, not this file. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result of every fallible call; anything but `CM_STATUS_OK` leaves a
// description in [`cm_last_error`].
typedef enum CmStatus {
  // The call succeeded and all out-parameters were written.
  CM_STATUS_OK = 0,
  // A required pointer argument was NULL.
  CM_STATUS_NULL_ARGUMENT = 1,
  // A `char *` argument was not valid UTF-8.
  CM_STATUS_INVALID_UTF8 = 2,
  // Text or JSON input could not be parsed; the message carries the
  // position of the offending byte.
  CM_STATUS_PARSE_ERROR = 3,
  // Structurally valid input that violates a documented requirement
  // (size mismatch, bad arity, out-of-range element, bad coordinate, ...).
  CM_STATUS_INVALID_INPUT = 4,
  // A partition that the relevant operation tables do not respect; the
  // message names the violated operation and a witnessing tuple.
  CM_STATUS_NOT_A_CONGRUENCE = 5,
  // The computation would exceed the configured capacity bound.
  CM_STATUS_CAPACITY_EXCEEDED = 6,
  // A supplied witness chain fails one of its defining identities.
  CM_STATUS_CHAIN_FAILED = 7,
  // The underlying file could not be read.
  CM_STATUS_IO_ERROR = 8,
} CmStatus;

// Opaque handle to a finite algebra: a universe `0..size` together with
// named operation tables.
typedef struct CmAlgebra CmAlgebra;

// Opaque handle to a fully enumerated congruence lattice.
typedef struct CmLattice CmLattice;

// Opaque handle to a partition of an algebra's universe.
typedef struct CmPartition CmPartition;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Returns the library version as a static NUL-terminated string; do not
// free it.
const char *cm_version(void);

// Returns the message recorded by the most recent failing call on this
// thread, or an empty string if none has failed yet.  The pointer stays
// valid until the next failing call on the same thread; do not free it.
const char *cm_last_error(void);

// Releases a string returned by this library.  NULL is accepted and ignored.
//
// # Safety
// `text` must have been returned by a `cm_*` function documented to require
// this call, and must not have been freed already.
void cm_string_free(char *text);

// Builds an algebra from its JSON description (`{"name", "size",
// "operations": [{"symbol", "arity", "table"}, ..]}`) and stores the new
// handle in `*out`.
//
// # Safety
// `json` must point to a NUL-terminated string and `out` to a writable
// pointer slot; both stay borrowed only for the duration of the call.
enum CmStatus cm_algebra_from_json(const char *json, struct CmAlgebra **out);

// Reads an algebra from a JSON file and stores the new handle in `*out`.
//
// # Safety
// `path` must point to a NUL-terminated string and `out` to a writable
// pointer slot; both stay borrowed only for the duration of the call.
enum CmStatus cm_algebra_load(const char *path, struct CmAlgebra **out);

// Releases an algebra handle.  NULL is accepted and ignored.
//
// # Safety
// `algebra` must be a live handle from this library or NULL; no other handle
// may still borrow from it (they never do — handles are self-contained).
void cm_algebra_free(struct CmAlgebra *algebra);

// Returns the number of elements of the algebra's universe, or 0 if
// `algebra` is NULL.
//
// # Safety
// `algebra` must be a live handle or NULL.
size_t cm_algebra_size(const struct CmAlgebra *algebra);

// Returns the algebra's name as a fresh string (release with
// [`cm_string_free`]), or NULL if `algebra` is NULL.
//
// # Safety
// `algebra` must be a live handle or NULL.
char *cm_algebra_name(const struct CmAlgebra *algebra);

// Parses a partition in block syntax (`"|0 2|1 3|"`) over the universe of
// `algebra` and stores the new handle in `*out`.  Every element must appear
// in exactly one block; the partition need not be a congruence.
//
// # Safety
// `algebra` must be a live handle, `text` a NUL-terminated string, and `out`
// a writable pointer slot.
enum CmStatus cm_partition_parse(const struct CmAlgebra *algebra,
                                 const char *text,
                                 struct CmPartition **out);

// Releases a partition handle.  NULL is accepted and ignored.
//
// # Safety
// `partition` must be a live handle from this library or NULL.
void cm_partition_free(struct CmPartition *partition);

// Renders a partition in canonical block syntax as a fresh string (release
// with [`cm_string_free`]), or NULL if `partition` is NULL.
//
// # Safety
// `partition` must be a live handle or NULL.
char *cm_partition_format(const struct CmPartition *partition);

// Returns the number of blocks of the partition, or 0 if `partition` is
// NULL.
//
// # Safety
// `partition` must be a live handle or NULL.
size_t cm_partition_block_count(const struct CmPartition *partition);

// Writes whether `a` and `b` lie in the same block into `*out_related`.
//
// # Safety
// `partition` must be a live handle and `out_related` a writable bool slot.
enum CmStatus cm_partition_related(const struct CmPartition *partition,
                                   size_t a,
                                   size_t b,
                                   bool *out_related);

// Checks whether the partition is a congruence of the algebra: returns
// `CM_STATUS_OK` if it is, `CM_STATUS_NOT_A_CONGRUENCE` (with the violated
// operation named in [`cm_last_error`]) if it is not.
//
// # Safety
// `algebra` and `partition` must be live handles.
enum CmStatus cm_partition_is_congruence(const struct CmAlgebra *algebra,
                                         const struct CmPartition *partition);

// Computes the smallest congruence of `algebra` containing the given
// element pairs and stores it in `*out`.  `pairs` is a flattened array
// `[a0, b0, a1, b1, ..]` of `2 * pair_count` entries; it may be NULL when
// `pair_count` is 0, which yields the identity partition.
//
// # Safety
// `algebra` must be a live handle, `pairs` must point to `2 * pair_count`
// readable entries (or be NULL with `pair_count == 0`), and `out` must be a
// writable pointer slot.
enum CmStatus cm_congruence_generated(const struct CmAlgebra *algebra,
                                      const size_t *pairs,
                                      size_t pair_count,
                                      struct CmPartition **out);

// Enumerates the full congruence lattice of `algebra` and stores the new
// handle in `*out`.  The lattice is ordered bottom (identity) to top (full
// relation) compatibly with inclusion.
//
// # Safety
// `algebra` must be a live handle and `out` a writable pointer slot.
enum CmStatus cm_congruence_lattice(const struct CmAlgebra *algebra, struct CmLattice **out);

// Releases a lattice handle.  NULL is accepted and ignored.
//
// # Safety
// `lattice` must be a live handle from this library or NULL.
void cm_lattice_free(struct CmLattice *lattice);

// Returns the number of congruences in the lattice, or 0 if `lattice` is
// NULL.
//
// # Safety
// `lattice` must be a live handle or NULL.
size_t cm_lattice_len(const struct CmLattice *lattice);

// Copies the congruence at `index` out of the lattice and stores the new
// partition handle in `*out`.
//
// # Safety
// `lattice` must be a live handle and `out` a writable pointer slot.
enum CmStatus cm_lattice_get(const struct CmLattice *lattice,
                             size_t index,
                             struct CmPartition **out);

// Returns whether the lattice satisfies the modular law, or `false` if
// `lattice` is NULL.
//
// # Safety
// `lattice` must be a live handle or NULL.
bool cm_lattice_is_modular(const struct CmLattice *lattice);

// Computes the higher commutator of the listed congruences and stores it in
// `*out`.
//
// `congs` holds `cong_count >= 1` partition handles, each of which must be a
// congruence of `algebra` (checked; violation reports
// `CM_STATUS_NOT_A_CONGRUENCE`).  `pivot` selects the distinguished
// coordinate in `0..cong_count`, or pass a negative value for the default
// (the last coordinate).  `cap_bits` bounds the packed cube representation;
// pass 0 for the default of 32 bits.
//
// # Safety
// `algebra` must be a live handle, `congs` must point to `cong_count` live
// partition handles, and `out` must be a writable pointer slot.
enum CmStatus cm_commutator(const struct CmAlgebra *algebra,
                            const struct CmPartition *const *congs,
                            size_t cong_count,
                            int64_t pivot,
                            uint32_t cap_bits,
                            struct CmPartition **out);

// Searches for a chain of quaternary terms witnessing that the algebra
// generates a congruence modular variety.
//
// On `CM_STATUS_OK`, `*out_chain_json` is either a fresh JSON array of the
// chain's terms (release with [`cm_string_free`]) or NULL when the search
// exhausted all quaternary term operations without finding one — which
// certifies that the variety is not congruence modular.  `table_cap` bounds
// how many distinct term tables the search may materialize (0 for the
// default of 30000); if the cap stops the search before either outcome, the
// call fails with `CM_STATUS_CAPACITY_EXCEEDED`.
//
// # Safety
// `algebra` must be a live handle and `out_chain_json` a writable pointer
// slot.
enum CmStatus cm_modularity_chain(const struct CmAlgebra *algebra,
                                  size_t table_cap,
                                  char **out_chain_json);

// Verifies a chain of quaternary terms (as produced by
// [`cm_modularity_chain`]) against the algebra: returns `CM_STATUS_OK` when
// every defining identity holds, `CM_STATUS_CHAIN_FAILED` (with the violated
// identity in [`cm_last_error`]) when one does not.
//
// # Safety
// `algebra` must be a live handle and `chain_json` a NUL-terminated string.
enum CmStatus cm_chain_verify(const struct CmAlgebra *algebra, const char *chain_json);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* CMCOMM_H */
