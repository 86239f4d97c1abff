//! Centrality conditions and the commutators they induce.
//!
//! Fix a cube algebra `M(T)` for congruences `T = (t0, .., t(k-1))` and pick
//! a coordinate `j`.  A congruence `d` *centralizes* `T` at `j` when every
//! cube whose supporting lines along `j` all lie in `d` has its pivot line in
//! `d` as well.  The commutator `[T]` is the least such `d`; it exists
//! because the condition is a Horn property, and it is computed here by the
//! obvious fixpoint: start at the identity, add every pivot pair whose
//! hypothesis currently holds, close up to a congruence, repeat.
//!
//! [`commutator_by_lattice_scan`] reaches the same congruence along an
//! entirely different route — test the centrality condition against every
//! member of the congruence lattice and meet the survivors — and exists
//! precisely so the two implementations can police each other.
//!
//! The *two-term* condition compares pairs of cubes instead of lines inside
//! one cube: if two cubes agree modulo `d` everywhere except possibly the
//! all-ones vertex, their all-ones entries must be related too.  On
//! congruence-modular varieties it defines the same commutator, and the
//! theorem sweeps check exactly that.

use std::collections::HashMap;

use crate::algebra::FiniteAlgebra;
use crate::congruence::{cg_from, CongruenceLattice, Partition};
use crate::cubes::{generate_matrix_algebra, Cube, MatrixAlgebra, DEFAULT_CAP_BITS};
use crate::error::{Error, Result};

/// Why a centrality check failed.
#[derive(Debug, Clone)]
pub enum CentralityWitness {
    /// A cube whose supporting lines lie in the congruence but whose pivot
    /// pair does not.
    Cube { cube: Cube, pivot: (u8, u8) },
    /// Two cubes agreeing modulo the congruence off the all-ones vertex but
    /// not at it (two-term condition).
    CubePair { h: Cube, g: Cube, pivot: (u8, u8) },
}

/// Outcome of a centrality check; `witness` is the first failure in cube
/// order, present exactly when `holds` is false.
#[derive(Debug, Clone)]
pub struct CentralityReport {
    pub holds: bool,
    pub witness: Option<CentralityWitness>,
}

fn rep_table(delta: &Partition) -> Vec<u8> {
    (0..delta.size()).map(|a| delta.rep(a) as u8).collect()
}

fn check_delta(m: &MatrixAlgebra, delta: &Partition) -> Result<()> {
    if delta.size() != m.n() {
        return Err(Error::UniverseMismatch {
            expected: m.n(),
            found: delta.size(),
        });
    }
    Ok(())
}

/// Does `delta` centralize the congruences behind `m` at coordinate `j`?
pub fn centrality(m: &MatrixAlgebra, j: usize, delta: &Partition) -> Result<CentralityReport> {
    check_delta(m, delta)?;
    let shifts = m.space().line_shifts(j)?;
    let (&(p0, p1), supporting) = shifts.split_last().expect("k >= 1 lines");
    let mask = m.space().digit_mask();
    let rep = rep_table(delta);
    for &w in m.packed() {
        let a = (w >> p0) & mask;
        let b = (w >> p1) & mask;
        if rep[a as usize] == rep[b as usize] {
            continue;
        }
        let hypothesis = supporting
            .iter()
            .all(|&(s0, s1)| rep[((w >> s0) & mask) as usize] == rep[((w >> s1) & mask) as usize]);
        if hypothesis {
            return Ok(CentralityReport {
                holds: false,
                witness: Some(CentralityWitness::Cube {
                    cube: Cube::new(m.k(), m.space().unpack(w))?,
                    pivot: (a as u8, b as u8),
                }),
            });
        }
    }
    Ok(CentralityReport {
        holds: true,
        witness: None,
    })
}

/// The commutator `[T]` at the default pivot coordinate `k - 1`.
pub fn higher_commutator(alg: &FiniteAlgebra, congs: &[Partition]) -> Result<Partition> {
    let m = generate_matrix_algebra(alg, congs, DEFAULT_CAP_BITS)?;
    higher_commutator_with(alg, &m, congs.len() - 1)
}

/// The commutator computed with pivot lines taken along coordinate `j`.
pub fn higher_commutator_at(
    alg: &FiniteAlgebra,
    congs: &[Partition],
    j: usize,
) -> Result<Partition> {
    let m = generate_matrix_algebra(alg, congs, DEFAULT_CAP_BITS)?;
    higher_commutator_with(alg, &m, j)
}

/// Fixpoint computation of the commutator over an already-generated cube
/// algebra; the entry point for callers that reuse `m` across computations.
pub fn higher_commutator_with(
    alg: &FiniteAlgebra,
    m: &MatrixAlgebra,
    j: usize,
) -> Result<Partition> {
    if alg.size != m.n() {
        return Err(Error::UniverseMismatch {
            expected: m.n(),
            found: alg.size,
        });
    }
    let shifts = m.space().line_shifts(j)?;
    let (&(p0, p1), supporting) = shifts.split_last().expect("k >= 1 lines");
    let mask = m.space().digit_mask();
    let mut delta = Partition::identity(alg.size);
    loop {
        let rep = rep_table(&delta);
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        'cubes: for &w in m.packed() {
            let a = ((w >> p0) & mask) as usize;
            let b = ((w >> p1) & mask) as usize;
            if rep[a] == rep[b] {
                continue;
            }
            for &(s0, s1) in supporting {
                if rep[((w >> s0) & mask) as usize] != rep[((w >> s1) & mask) as usize] {
                    continue 'cubes;
                }
            }
            pairs.push((a, b));
        }
        if pairs.is_empty() {
            return Ok(delta);
        }
        delta = cg_from(alg, &delta, &pairs)?;
    }
}

/// Independent route to the commutator: meet every member of the congruence
/// lattice that satisfies the centrality condition at `j`.
///
/// Quadratic where the fixpoint is lean, but immune to any bug in the
/// pair-collection logic; keep the two routes separate.
pub fn commutator_by_lattice_scan(
    m: &MatrixAlgebra,
    lat: &CongruenceLattice,
    j: usize,
) -> Result<Partition> {
    if lat.size() != m.n() {
        return Err(Error::UniverseMismatch {
            expected: m.n(),
            found: lat.size(),
        });
    }
    let mut result = Partition::full(m.n());
    for delta in lat.elements() {
        if centrality(m, j, delta)?.holds {
            result = result.meet(delta);
        }
    }
    Ok(result)
}

/// Does `delta` satisfy the two-term condition on `m`: cubes agreeing modulo
/// `delta` away from the all-ones vertex agree there too?
pub fn two_term_centrality(m: &MatrixAlgebra, delta: &Partition) -> Result<CentralityReport> {
    check_delta(m, delta)?;
    match two_term_scan(m, delta, true)? {
        None => Ok(CentralityReport {
            holds: true,
            witness: None,
        }),
        Some(TwoTermFailure { first, second, .. }) => Ok(CentralityReport {
            holds: false,
            witness: Some(CentralityWitness::CubePair {
                pivot: (
                    m.space().entry_at(first, m.space().cube_len() - 1),
                    m.space().entry_at(second, m.space().cube_len() - 1),
                ),
                h: Cube::new(m.k(), m.space().unpack(first))?,
                g: Cube::new(m.k(), m.space().unpack(second))?,
            }),
        }),
    }
}

/// The two-term commutator at the default pivot.
pub fn two_term_commutator(alg: &FiniteAlgebra, congs: &[Partition]) -> Result<Partition> {
    let m = generate_matrix_algebra(alg, congs, DEFAULT_CAP_BITS)?;
    two_term_commutator_with(alg, &m)
}

/// Fixpoint of the two-term condition over an existing cube algebra.
pub fn two_term_commutator_with(alg: &FiniteAlgebra, m: &MatrixAlgebra) -> Result<Partition> {
    if alg.size != m.n() {
        return Err(Error::UniverseMismatch {
            expected: m.n(),
            found: alg.size,
        });
    }
    let mut delta = Partition::identity(alg.size);
    loop {
        let pairs = two_term_pairs(m, &delta)?;
        if pairs.is_empty() {
            return Ok(delta);
        }
        delta = cg_from(alg, &delta, &pairs)?;
    }
}

struct TwoTermFailure {
    first: u64,
    second: u64,
}

/// Scans for two-term violations by bucketing cubes on their off-pivot entry
/// representatives; returns the first failure when `stop_early`.
fn two_term_scan(
    m: &MatrixAlgebra,
    delta: &Partition,
    stop_early: bool,
) -> Result<Option<TwoTermFailure>> {
    let space = m.space();
    let mask = space.digit_mask();
    let rep = rep_table(delta);
    let remap = space.byte_map(|d| rep[d as usize]);
    // Bucket key: representatives of all entries, pivot entry blanked out.
    // The pivot vertex is the all-ones index, i.e. the lowest digit.
    let mut buckets: HashMap<u64, Vec<(u8, u64)>> = HashMap::new();
    for &w in m.packed() {
        let mapped = space.apply_byte_map(&remap, w);
        let key = mapped & !mask;
        let pivot_rep = (mapped & mask) as u8;
        let classes = buckets.entry(key).or_default();
        if classes.iter().any(|&(r, _)| r == pivot_rep) {
            continue;
        }
        if let Some(&(_, first)) = classes.first() {
            if stop_early {
                return Ok(Some(TwoTermFailure { first, second: w }));
            }
        }
        classes.push((pivot_rep, w));
    }
    Ok(None)
}

/// All pivot pairs forced by the two-term condition under `delta`, each new
/// representative paired against the first cube seen in its bucket.
fn two_term_pairs(m: &MatrixAlgebra, delta: &Partition) -> Result<Vec<(usize, usize)>> {
    let space = m.space();
    let mask = space.digit_mask();
    let rep = rep_table(delta);
    let remap = space.byte_map(|d| rep[d as usize]);
    let mut buckets: HashMap<u64, Vec<(u8, u64)>> = HashMap::new();
    let mut pairs = Vec::new();
    for &w in m.packed() {
        let mapped = space.apply_byte_map(&remap, w);
        let key = mapped & !mask;
        let pivot_rep = (mapped & mask) as u8;
        let classes = buckets.entry(key).or_default();
        if classes.iter().any(|&(r, _)| r == pivot_rep) {
            continue;
        }
        if let Some(&(_, first)) = classes.first() {
            pairs.push(((first & mask) as usize, (w & mask) as usize));
        }
        classes.push((pivot_rep, w));
    }
    Ok(pairs)
}
