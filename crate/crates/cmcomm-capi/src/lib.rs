//! C interface to the commutator library.
//!
//! The API follows the usual opaque-handle conventions:
//!
//! * [`CmAlgebra`], [`CmPartition`] and [`CmLattice`] are opaque to C.
//!   Constructors hand them out through out-parameters; every handle must be
//!   released with its matching `cm_*_free` (never with `free(3)`), and a
//!   handle freed twice or used after freeing is undefined behavior.
//! * Fallible functions return a [`CmStatus`].  `CM_STATUS_OK` means every
//!   out-parameter was written; any other value means none were, and a
//!   human-readable description can be fetched with [`cm_last_error`].
//! * Strings returned as `char *` are NUL-terminated, allocated by the
//!   library, and released with [`cm_string_free`].
//! * Handles are immutable once created, so they may be shared freely across
//!   threads; the failure message of [`cm_last_error`] is the only
//!   thread-local state.
//!
//! The committed `include/cmcomm.h` is generated from this file by the build
//! script.  A minimal session:
//!
//! ```c
//! CmAlgebra *a = NULL;
//! if (cm_algebra_load("z4ring.json", &a) != CM_STATUS_OK) {
//!     fprintf(stderr, "%s\n", cm_last_error());
//!     return 1;
//! }
//! CmPartition *top = NULL, *theta = NULL, *comm = NULL;
//! cm_partition_parse(a, "|0 1 2 3|", &top);
//! cm_partition_parse(a, "|0 2|1 3|", &theta);
//! const CmPartition *congs[2] = {top, theta};
//! cm_commutator(a, congs, 2, -1, 0, &comm);
//! char *text = cm_partition_format(comm);
//! printf("%s\n", text); /* |0 2|1 3| */
//! cm_string_free(text);
//! ```

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::fmt::Display;
use std::ptr;

use cmcomm::commutator::higher_commutator_with;
use cmcomm::congruence::is_congruence;
use cmcomm::cubes::DEFAULT_CAP_BITS;
use cmcomm::dayterms::DEFAULT_CHAIN_TABLES;
use cmcomm::{
    cg, congruence_lattice, find_day_chain, generate_matrix_algebra, verify_day_chain,
    CongruenceLattice, DayChain, Error, FiniteAlgebra, Partition,
};

/// Result of every fallible call; anything but `CM_STATUS_OK` leaves a
/// description in [`cm_last_error`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmStatus {
    /// The call succeeded and all out-parameters were written.
    Ok = 0,
    /// A required pointer argument was NULL.
    NullArgument = 1,
    /// A `char *` argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Text or JSON input could not be parsed; the message carries the
    /// position of the offending byte.
    ParseError = 3,
    /// Structurally valid input that violates a documented requirement
    /// (size mismatch, bad arity, out-of-range element, bad coordinate, ...).
    InvalidInput = 4,
    /// A partition that the relevant operation tables do not respect; the
    /// message names the violated operation and a witnessing tuple.
    NotACongruence = 5,
    /// The computation would exceed the configured capacity bound.
    CapacityExceeded = 6,
    /// A supplied witness chain fails one of its defining identities.
    ChainFailed = 7,
    /// The underlying file could not be read.
    IoError = 8,
}

/// Opaque handle to a finite algebra: a universe `0..size` together with
/// named operation tables.
pub struct CmAlgebra(FiniteAlgebra);

/// Opaque handle to a partition of an algebra's universe.
pub struct CmPartition(Partition);

/// Opaque handle to a fully enumerated congruence lattice.
pub struct CmLattice(CongruenceLattice);

thread_local! {
    /// Message of the most recent failure on this thread; see [`cm_last_error`].
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

/// Records `message` for [`cm_last_error`] and passes `status` through.
fn fail(status: CmStatus, message: impl Display) -> CmStatus {
    let text = message.to_string();
    let stored = CString::new(text)
        .unwrap_or_else(|_| CString::new("failure message contained a NUL byte").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = stored);
    status
}

/// Maps a library error onto the C status it should surface as.
fn fail_with(err: Error) -> CmStatus {
    let status = match &err {
        Error::Parse { .. } | Error::Json(_) => CmStatus::ParseError,
        Error::NotACongruence { .. } => CmStatus::NotACongruence,
        Error::Capacity { .. } => CmStatus::CapacityExceeded,
        Error::ChainIdentity { .. } => CmStatus::ChainFailed,
        Error::Io(_) => CmStatus::IoError,
        _ => CmStatus::InvalidInput,
    };
    fail(status, err)
}

/// Dereferences a handle argument, failing with `NullArgument` on NULL.
unsafe fn want<'a, T>(ptr: *const T, what: &str) -> Result<&'a T, CmStatus> {
    match ptr.as_ref() {
        Some(value) => Ok(value),
        None => Err(fail(
            CmStatus::NullArgument,
            format_args!("{what} handle is NULL"),
        )),
    }
}

/// Reads a `char *` argument as UTF-8.
unsafe fn want_str<'a>(ptr: *const c_char, what: &str) -> Result<&'a str, CmStatus> {
    if ptr.is_null() {
        return Err(fail(
            CmStatus::NullArgument,
            format_args!("{what} pointer is NULL"),
        ));
    }
    CStr::from_ptr(ptr).to_str().map_err(|err| {
        fail(
            CmStatus::InvalidUtf8,
            format_args!("{what} is not valid UTF-8: {err}"),
        )
    })
}

/// Boxes `value` into `out`; the caller has already checked `out` for NULL.
unsafe fn give<T>(out: *mut *mut T, value: T) -> CmStatus {
    *out = Box::into_raw(Box::new(value));
    CmStatus::Ok
}

/// Moves a Rust string across the boundary; release with [`cm_string_free`].
fn export_string(text: String) -> *mut c_char {
    CString::new(text).map_or(ptr::null_mut(), CString::into_raw)
}

/// Returns the library version as a static NUL-terminated string; do not
/// free it.
#[no_mangle]
pub extern "C" fn cm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Returns the message recorded by the most recent failing call on this
/// thread, or an empty string if none has failed yet.  The pointer stays
/// valid until the next failing call on the same thread; do not free it.
#[no_mangle]
pub extern "C" fn cm_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Releases a string returned by this library.  NULL is accepted and ignored.
///
/// # Safety
/// `text` must have been returned by a `cm_*` function documented to require
/// this call, and must not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn cm_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(CString::from_raw(text));
    }
}

/// Builds an algebra from its JSON description (`{"name", "size",
/// "operations": [{"symbol", "arity", "table"}, ..]}`) and stores the new
/// handle in `*out`.
///
/// # Safety
/// `json` must point to a NUL-terminated string and `out` to a writable
/// pointer slot; both stay borrowed only for the duration of the call.
#[no_mangle]
pub unsafe extern "C" fn cm_algebra_from_json(
    json: *const c_char,
    out: *mut *mut CmAlgebra,
) -> CmStatus {
    if out.is_null() {
        return fail(CmStatus::NullArgument, "out-parameter is NULL");
    }
    let text = match want_str(json, "json") {
        Ok(text) => text,
        Err(status) => return status,
    };
    match FiniteAlgebra::from_json(text) {
        Ok(alg) => give(out, CmAlgebra(alg)),
        Err(err) => fail_with(err),
    }
}

/// Reads an algebra from a JSON file and stores the new handle in `*out`.
///
/// # Safety
/// `path` must point to a NUL-terminated string and `out` to a writable
/// pointer slot; both stay borrowed only for the duration of the call.
#[no_mangle]
pub unsafe extern "C" fn cm_algebra_load(
    path: *const c_char,
    out: *mut *mut CmAlgebra,
) -> CmStatus {
    if out.is_null() {
        return fail(CmStatus::NullArgument, "out-parameter is NULL");
    }
    let path = match want_str(path, "path") {
        Ok(path) => path,
        Err(status) => return status,
    };
    match FiniteAlgebra::load(path) {
        Ok(alg) => give(out, CmAlgebra(alg)),
        Err(err) => fail_with(err),
    }
}

/// Releases an algebra handle.  NULL is accepted and ignored.
///
/// # Safety
/// `algebra` must be a live handle from this library or NULL; no other handle
/// may still borrow from it (they never do — handles are self-contained).
#[no_mangle]
pub unsafe extern "C" fn cm_algebra_free(algebra: *mut CmAlgebra) {
    if !algebra.is_null() {
        drop(Box::from_raw(algebra));
    }
}

/// Returns the number of elements of the algebra's universe, or 0 if
/// `algebra` is NULL.
///
/// # Safety
/// `algebra` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn cm_algebra_size(algebra: *const CmAlgebra) -> usize {
    algebra.as_ref().map_or(0, |handle| handle.0.size)
}

/// Returns the algebra's name as a fresh string (release with
/// [`cm_string_free`]), or NULL if `algebra` is NULL.
///
/// # Safety
/// `algebra` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn cm_algebra_name(algebra: *const CmAlgebra) -> *mut c_char {
    algebra
        .as_ref()
        .map_or(ptr::null_mut(), |handle| export_string(handle.0.name.clone()))
}

/// Parses a partition in block syntax (`"|0 2|1 3|"`) over the universe of
/// `algebra` and stores the new handle in `*out`.  Every element must appear
/// in exactly one block; the partition need not be a congruence.
///
/// # Safety
/// `algebra` must be a live handle, `text` a NUL-terminated string, and `out`
/// a writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn cm_partition_parse(
    algebra: *const CmAlgebra,
    text: *const c_char,
    out: *mut *mut CmPartition,
) -> CmStatus {
    if out.is_null() {
        return fail(CmStatus::NullArgument, "out-parameter is NULL");
    }
    let alg = match want(algebra, "algebra") {
        Ok(handle) => &handle.0,
        Err(status) => return status,
    };
    let text = match want_str(text, "text") {
        Ok(text) => text,
        Err(status) => return status,
    };
    match Partition::parse(text, alg.size) {
        Ok(partition) => give(out, CmPartition(partition)),
        Err(err) => fail_with(err),
    }
}

/// Releases a partition handle.  NULL is accepted and ignored.
///
/// # Safety
/// `partition` must be a live handle from this library or NULL.
#[no_mangle]
pub unsafe extern "C" fn cm_partition_free(partition: *mut CmPartition) {
    if !partition.is_null() {
        drop(Box::from_raw(partition));
    }
}

/// Renders a partition in canonical block syntax as a fresh string (release
/// with [`cm_string_free`]), or NULL if `partition` is NULL.
///
/// # Safety
/// `partition` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn cm_partition_format(partition: *const CmPartition) -> *mut c_char {
    partition
        .as_ref()
        .map_or(ptr::null_mut(), |handle| export_string(handle.0.to_string()))
}

/// Returns the number of blocks of the partition, or 0 if `partition` is
/// NULL.
///
/// # Safety
/// `partition` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn cm_partition_block_count(partition: *const CmPartition) -> usize {
    partition.as_ref().map_or(0, |handle| handle.0.block_count())
}

/// Writes whether `a` and `b` lie in the same block into `*out_related`.
///
/// # Safety
/// `partition` must be a live handle and `out_related` a writable bool slot.
#[no_mangle]
pub unsafe extern "C" fn cm_partition_related(
    partition: *const CmPartition,
    a: usize,
    b: usize,
    out_related: *mut bool,
) -> CmStatus {
    if out_related.is_null() {
        return fail(CmStatus::NullArgument, "out-parameter is NULL");
    }
    let partition = match want(partition, "partition") {
        Ok(handle) => &handle.0,
        Err(status) => return status,
    };
    for element in [a, b] {
        if element >= partition.size() {
            return fail_with(Error::ElementOutOfRange {
                value: element,
                size: partition.size(),
            });
        }
    }
    *out_related = partition.related(a, b);
    CmStatus::Ok
}

/// Checks whether the partition is a congruence of the algebra: returns
/// `CM_STATUS_OK` if it is, `CM_STATUS_NOT_A_CONGRUENCE` (with the violated
/// operation named in [`cm_last_error`]) if it is not.
///
/// # Safety
/// `algebra` and `partition` must be live handles.
#[no_mangle]
pub unsafe extern "C" fn cm_partition_is_congruence(
    algebra: *const CmAlgebra,
    partition: *const CmPartition,
) -> CmStatus {
    let alg = match want(algebra, "algebra") {
        Ok(handle) => &handle.0,
        Err(status) => return status,
    };
    let partition = match want(partition, "partition") {
        Ok(handle) => &handle.0,
        Err(status) => return status,
    };
    match is_congruence(alg, partition) {
        Ok(()) => CmStatus::Ok,
        Err(err) => fail_with(err),
    }
}

/// Computes the smallest congruence of `algebra` containing the given
/// element pairs and stores it in `*out`.  `pairs` is a flattened array
/// `[a0, b0, a1, b1, ..]` of `2 * pair_count` entries; it may be NULL when
/// `pair_count` is 0, which yields the identity partition.
///
/// # Safety
/// `algebra` must be a live handle, `pairs` must point to `2 * pair_count`
/// readable entries (or be NULL with `pair_count == 0`), and `out` must be a
/// writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn cm_congruence_generated(
    algebra: *const CmAlgebra,
    pairs: *const usize,
    pair_count: usize,
    out: *mut *mut CmPartition,
) -> CmStatus {
    if out.is_null() {
        return fail(CmStatus::NullArgument, "out-parameter is NULL");
    }
    let alg = match want(algebra, "algebra") {
        Ok(handle) => &handle.0,
        Err(status) => return status,
    };
    if pairs.is_null() && pair_count != 0 {
        return fail(CmStatus::NullArgument, "pairs pointer is NULL");
    }
    let Some(entries) = pair_count.checked_mul(2) else {
        return fail(CmStatus::InvalidInput, "pair_count overflows");
    };
    let flat = if entries == 0 {
        &[][..]
    } else {
        std::slice::from_raw_parts(pairs, entries)
    };
    let pairs: Vec<(usize, usize)> = flat.chunks_exact(2).map(|c| (c[0], c[1])).collect();
    match cg(alg, &pairs) {
        Ok(partition) => give(out, CmPartition(partition)),
        Err(err) => fail_with(err),
    }
}

/// Enumerates the full congruence lattice of `algebra` and stores the new
/// handle in `*out`.  The lattice is ordered bottom (identity) to top (full
/// relation) compatibly with inclusion.
///
/// # Safety
/// `algebra` must be a live handle and `out` a writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn cm_congruence_lattice(
    algebra: *const CmAlgebra,
    out: *mut *mut CmLattice,
) -> CmStatus {
    if out.is_null() {
        return fail(CmStatus::NullArgument, "out-parameter is NULL");
    }
    let alg = match want(algebra, "algebra") {
        Ok(handle) => &handle.0,
        Err(status) => return status,
    };
    match congruence_lattice(alg) {
        Ok(lattice) => give(out, CmLattice(lattice)),
        Err(err) => fail_with(err),
    }
}

/// Releases a lattice handle.  NULL is accepted and ignored.
///
/// # Safety
/// `lattice` must be a live handle from this library or NULL.
#[no_mangle]
pub unsafe extern "C" fn cm_lattice_free(lattice: *mut CmLattice) {
    if !lattice.is_null() {
        drop(Box::from_raw(lattice));
    }
}

/// Returns the number of congruences in the lattice, or 0 if `lattice` is
/// NULL.
///
/// # Safety
/// `lattice` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn cm_lattice_len(lattice: *const CmLattice) -> usize {
    lattice.as_ref().map_or(0, |handle| handle.0.len())
}

/// Copies the congruence at `index` out of the lattice and stores the new
/// partition handle in `*out`.
///
/// # Safety
/// `lattice` must be a live handle and `out` a writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn cm_lattice_get(
    lattice: *const CmLattice,
    index: usize,
    out: *mut *mut CmPartition,
) -> CmStatus {
    if out.is_null() {
        return fail(CmStatus::NullArgument, "out-parameter is NULL");
    }
    let lattice = match want(lattice, "lattice") {
        Ok(handle) => &handle.0,
        Err(status) => return status,
    };
    if index >= lattice.len() {
        return fail(
            CmStatus::InvalidInput,
            format_args!(
                "lattice index {index} is out of range for {} congruences",
                lattice.len()
            ),
        );
    }
    give(out, CmPartition(lattice.get(index).clone()))
}

/// Returns whether the lattice satisfies the modular law, or `false` if
/// `lattice` is NULL.
///
/// # Safety
/// `lattice` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn cm_lattice_is_modular(lattice: *const CmLattice) -> bool {
    lattice
        .as_ref()
        .is_some_and(|handle| handle.0.modularity_violation().is_none())
}

/// Computes the higher commutator of the listed congruences and stores it in
/// `*out`.
///
/// `congs` holds `cong_count >= 1` partition handles, each of which must be a
/// congruence of `algebra` (checked; violation reports
/// `CM_STATUS_NOT_A_CONGRUENCE`).  `pivot` selects the distinguished
/// coordinate in `0..cong_count`, or pass a negative value for the default
/// (the last coordinate).  `cap_bits` bounds the packed cube representation;
/// pass 0 for the default of 32 bits.
///
/// # Safety
/// `algebra` must be a live handle, `congs` must point to `cong_count` live
/// partition handles, and `out` must be a writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn cm_commutator(
    algebra: *const CmAlgebra,
    congs: *const *const CmPartition,
    cong_count: usize,
    pivot: i64,
    cap_bits: u32,
    out: *mut *mut CmPartition,
) -> CmStatus {
    if out.is_null() {
        return fail(CmStatus::NullArgument, "out-parameter is NULL");
    }
    let alg = match want(algebra, "algebra") {
        Ok(handle) => &handle.0,
        Err(status) => return status,
    };
    if congs.is_null() {
        return fail(CmStatus::NullArgument, "congs pointer is NULL");
    }
    if cong_count == 0 {
        return fail(CmStatus::InvalidInput, "at least one congruence is required");
    }
    let handles = std::slice::from_raw_parts(congs, cong_count);
    let mut tuple = Vec::with_capacity(cong_count);
    for (i, handle) in handles.iter().enumerate() {
        let partition = match want(*handle, "congruence") {
            Ok(handle) => &handle.0,
            Err(status) => return status,
        };
        if let Err(err) = is_congruence(alg, partition) {
            return fail(CmStatus::NotACongruence, format_args!("congruence {i}: {err}"));
        }
        tuple.push(partition.clone());
    }
    let pivot = if pivot < 0 {
        cong_count - 1
    } else {
        pivot as usize
    };
    let cap_bits = if cap_bits == 0 { DEFAULT_CAP_BITS } else { cap_bits };
    let result = generate_matrix_algebra(alg, &tuple, cap_bits)
        .and_then(|m| higher_commutator_with(alg, &m, pivot));
    match result {
        Ok(partition) => give(out, CmPartition(partition)),
        Err(err) => fail_with(err),
    }
}

/// Searches for a chain of quaternary terms witnessing that the algebra
/// generates a congruence modular variety.
///
/// On `CM_STATUS_OK`, `*out_chain_json` is either a fresh JSON array of the
/// chain's terms (release with [`cm_string_free`]) or NULL when the search
/// exhausted all quaternary term operations without finding one — which
/// certifies that the variety is not congruence modular.  `table_cap` bounds
/// how many distinct term tables the search may materialize (0 for the
/// default of 30000); if the cap stops the search before either outcome, the
/// call fails with `CM_STATUS_CAPACITY_EXCEEDED`.
///
/// # Safety
/// `algebra` must be a live handle and `out_chain_json` a writable pointer
/// slot.
#[no_mangle]
pub unsafe extern "C" fn cm_modularity_chain(
    algebra: *const CmAlgebra,
    table_cap: usize,
    out_chain_json: *mut *mut c_char,
) -> CmStatus {
    if out_chain_json.is_null() {
        return fail(CmStatus::NullArgument, "out-parameter is NULL");
    }
    let alg = match want(algebra, "algebra") {
        Ok(handle) => &handle.0,
        Err(status) => return status,
    };
    let cap = if table_cap == 0 {
        DEFAULT_CHAIN_TABLES
    } else {
        table_cap
    };
    let search = match find_day_chain(alg, cap) {
        Ok(search) => search,
        Err(err) => return fail_with(err),
    };
    match (search.chain, search.complete) {
        (Some(chain), _) => {
            *out_chain_json = export_string(chain.to_json());
            CmStatus::Ok
        }
        (None, true) => {
            *out_chain_json = ptr::null_mut();
            CmStatus::Ok
        }
        (None, false) => fail(
            CmStatus::CapacityExceeded,
            format_args!(
                "chain search stopped undecided after {} term tables; raise table_cap",
                search.explored
            ),
        ),
    }
}

/// Verifies a chain of quaternary terms (as produced by
/// [`cm_modularity_chain`]) against the algebra: returns `CM_STATUS_OK` when
/// every defining identity holds, `CM_STATUS_CHAIN_FAILED` (with the violated
/// identity in [`cm_last_error`]) when one does not.
///
/// # Safety
/// `algebra` must be a live handle and `chain_json` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn cm_chain_verify(
    algebra: *const CmAlgebra,
    chain_json: *const c_char,
) -> CmStatus {
    let alg = match want(algebra, "algebra") {
        Ok(handle) => &handle.0,
        Err(status) => return status,
    };
    let text = match want_str(chain_json, "chain_json") {
        Ok(text) => text,
        Err(status) => return status,
    };
    let chain = match DayChain::from_json(text) {
        Ok(chain) => chain,
        Err(err) => return fail_with(err),
    };
    match verify_day_chain(alg, &chain) {
        Ok(_) => CmStatus::Ok,
        Err(err) => fail_with(err),
    }
}
